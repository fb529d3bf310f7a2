#pragma once

#include "cavcoord/polynomial.hpp"

namespace cavcoord {

/// Bounds on control input (m/s^2) and speed (m/s).
struct VehicleLimits {
  double u_min = -3.0;
  double u_max = 3.0;
  double v_min = 1.0;
  double v_max = 20.0;

  /// Throws ConfigError unless u_min < 0 < u_max and 0 < v_min <= v_max.
  void validate() const;
};

struct KinematicState {
  double p = 0.0;  // m
  double v = 0.0;  // m/s
  double u = 0.0;  // m/s^2
};

/// Unconstrained energy-optimal motion: p(t) = a t^3 + b t^2 + c t + d on
/// [t_start, t_end].
///
/// Coefficients are stored about t_start so that evaluation late in a long
/// simulation does not lose precision to cancellation; a()..d() expand them
/// back to absolute time.
class CubicTrajectory {
 public:
  CubicTrajectory() = default;

  /// `local` is the position polynomial in (t - t_start).
  CubicTrajectory(const Cubic& local, double t_start, double t_end);

  static CubicTrajectory from_coefficients(double a, double b, double c, double d,
                                           double t_start, double t_end);

  double a() const;
  double b() const;
  double c() const;
  double d() const;

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double duration() const { return t_end_ - t_start_; }

  /// Throws std::out_of_range when t lies outside [t_start, t_end].
  KinematicState eval(double t) const;

  /// Polynomial evaluation with no domain check.
  KinematicState eval_unchecked(double t) const;
  double position(double t) const { return local_(t - t_start_); }
  double speed(double t) const { return local_.derivative()(t - t_start_); }

  /// Position polynomial in the variable (t - origin).
  Cubic position_about(double origin) const { return local_.shifted(origin - t_start_); }
  const Cubic& local() const { return local_; }

  /// The same motion with its validity interval cut down to [from, t_end].
  CubicTrajectory restricted(double from) const {
    return CubicTrajectory(local_.shifted(from - t_start_), from, t_end_);
  }

  /// Integral of u^2 / 2 over the validity interval.
  double control_effort() const;
  /// Same integral restricted to [t_start, min(t, t_end)].
  double control_effort_until(double t) const;

 private:
  Cubic local_{};
  double t_start_ = 0.0;
  double t_end_ = 0.0;
};

/// Fits p(t0) = p0, v(t0) = v0, p(tf) = pf, u(tf) = 0.
/// Requires tf > t0, pf > p0 and v0 > 0 (std::invalid_argument otherwise).
CubicTrajectory solve_cubic(double t0, double p0, double v0, double tf, double pf);

/// Inverse of the strictly increasing position function.
///
/// Throws std::out_of_range if p is not reachable on the validity interval and
/// std::domain_error if the trajectory is not strictly increasing there.
double time_at_position(const CubicTrajectory& traj, double p);

/// True iff u stays in [u_min, u_max] and v in [v_min, v_max] over the whole
/// validity interval. u is affine so its endpoints suffice; v is quadratic so
/// its endpoints and interior vertex suffice. Comparisons allow 1e-9 of
/// floating-point slack.
bool feasibility_check(const CubicTrajectory& traj, const VehicleLimits& limits);

inline constexpr double kFeasibilitySlack = 1e-9;

}  // namespace cavcoord
