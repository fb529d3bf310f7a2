#include "cavcoord/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cavcoord/errors.hpp"

namespace cavcoord {

void VehicleLimits::validate() const {
  if (!(u_min < 0.0 && 0.0 < u_max))
    throw ConfigError(fmt::format("limits: need u_min < 0 < u_max (got {}, {})", u_min, u_max));
  if (!(0.0 < v_min && v_min <= v_max))
    throw ConfigError(
        fmt::format("limits: need 0 < v_min <= v_max (got {}, {})", v_min, v_max));
}

CubicTrajectory::CubicTrajectory(const Cubic& local, double t_start, double t_end)
    : local_(local), t_start_(t_start), t_end_(t_end) {
  if (!(t_start < t_end))
    throw std::invalid_argument(
        fmt::format("trajectory interval [{}, {}] is empty", t_start, t_end));
}

CubicTrajectory CubicTrajectory::from_coefficients(double a, double b, double c, double d,
                                                   double t_start, double t_end) {
  return CubicTrajectory(Cubic{{d, c, b, a}}.shifted(t_start), t_start, t_end);
}

// Absolute-time coefficients: expand the local polynomial about -t_start.
double CubicTrajectory::a() const { return local_.c[3]; }
double CubicTrajectory::b() const { return local_.shifted(-t_start_).c[2]; }
double CubicTrajectory::c() const { return local_.shifted(-t_start_).c[1]; }
double CubicTrajectory::d() const { return local_.shifted(-t_start_).c[0]; }

KinematicState CubicTrajectory::eval_unchecked(double t) const {
  const double x = t - t_start_;
  const auto& k = local_.c;
  return {local_(x), (3.0 * k[3] * x + 2.0 * k[2]) * x + k[1], 6.0 * k[3] * x + 2.0 * k[2]};
}

KinematicState CubicTrajectory::eval(double t) const {
  if (t < t_start_ || t > t_end_)
    throw std::out_of_range(
        fmt::format("t = {} outside trajectory interval [{}, {}]", t, t_start_, t_end_));
  return eval_unchecked(t);
}

double CubicTrajectory::control_effort_until(double t) const {
  const double x = std::clamp(t, t_start_, t_end_) - t_start_;
  const double A = local_.c[3];
  const double B = local_.c[2];
  // 0.5 * integral of (6 A x + 2 B)^2
  return 6.0 * A * A * x * x * x + 6.0 * A * B * x * x + 2.0 * B * B * x;
}

double CubicTrajectory::control_effort() const { return control_effort_until(t_end_); }

CubicTrajectory solve_cubic(double t0, double p0, double v0, double tf, double pf) {
  if (!(tf > t0))
    throw std::invalid_argument(fmt::format("solve_cubic: tf = {} must exceed t0 = {}", tf, t0));
  if (!(pf > p0))
    throw std::invalid_argument(fmt::format("solve_cubic: pf = {} must exceed p0 = {}", pf, p0));
  if (!(v0 > 0.0))
    throw std::invalid_argument(fmt::format("solve_cubic: v0 = {} must be positive", v0));

  // In local time x = t - t0 the conditions u(T) = 0 and p(T) = pf give
  // B = -3 A T and A = (v0 T - (pf - p0)) / (2 T^3).
  const double T = tf - t0;
  const double A = (v0 * T - (pf - p0)) / (2.0 * T * T * T);
  const double B = -3.0 * A * T;
  return CubicTrajectory(Cubic{{p0, v0, B, A}}, t0, tf);
}

namespace {

// Minimum of the quadratic speed profile over the local interval [0, T].
double min_speed(const Cubic& local, double T) {
  const Cubic v = local.derivative();
  double lo = std::min(v(0.0), v(T));
  if (v.c[2] > 0.0) {
    const double vertex = -v.c[1] / (2.0 * v.c[2]);
    if (vertex > 0.0 && vertex < T) lo = std::min(lo, v(vertex));
  }
  return lo;
}

}  // namespace

double time_at_position(const CubicTrajectory& traj, double p) {
  const Cubic& q = traj.local();
  const double T = traj.duration();
  const double p_lo = q(0.0);
  const double p_hi = q(T);
  if (p < p_lo || p > p_hi)
    throw std::out_of_range(
        fmt::format("position {} outside reachable range [{}, {}]", p, p_lo, p_hi));
  if (!(min_speed(q, T) > 0.0))
    throw std::domain_error("time_at_position: trajectory is not strictly increasing");
  if (p == p_lo) return traj.t_start();
  if (p == p_hi) return traj.t_end();

  // Newton iteration safeguarded by the bracket [lo, hi].
  const Cubic dq = q.derivative();
  double lo = 0.0;
  double hi = T;
  double x = T * (p - p_lo) / (p_hi - p_lo);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = q(x) - p;
    if (f == 0.0) break;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    double next = x - f / dq(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step < 1e-13 || hi - lo < 1e-12) break;
  }
  return traj.t_start() + x;
}

bool feasibility_check(const CubicTrajectory& traj, const VehicleLimits& limits) {
  const Cubic& q = traj.local();
  const double T = traj.duration();
  const Cubic v = q.derivative();
  const Cubic u = v.derivative();

  const double u0 = u(0.0);
  const double uT = u(T);
  if (std::min(u0, uT) < limits.u_min - kFeasibilitySlack) return false;
  if (std::max(u0, uT) > limits.u_max + kFeasibilitySlack) return false;

  double v_lo = std::min(v(0.0), v(T));
  double v_hi = std::max(v(0.0), v(T));
  if (v.c[2] != 0.0) {
    const double vertex = -v.c[1] / (2.0 * v.c[2]);
    if (vertex > 0.0 && vertex < T) {
      const double vv = v(vertex);
      v_lo = std::min(v_lo, vv);
      v_hi = std::max(v_hi, vv);
    }
  }
  return v_lo >= limits.v_min - kFeasibilitySlack && v_hi <= limits.v_max + kFeasibilitySlack;
}

}  // namespace cavcoord
