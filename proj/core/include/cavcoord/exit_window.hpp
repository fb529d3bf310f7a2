#pragma once

#include "cavcoord/trajectory.hpp"

namespace cavcoord {

/// Compact interval of exit times reachable by a feasible cubic.
struct ExitTimeWindow {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double t) const { return t >= lower && t <= upper; }
};

inline constexpr double kWindowTolerance = 1e-6;

/// Least and greatest exit time tf for which solve_cubic(t0, p0, v0, tf, pf)
/// passes feasibility_check.
///
/// Candidate durations are scanned on a grid between the mean-speed bounds
/// (pf - p0) / v_max and (pf - p0) / v_min, and each boundary is refined by
/// bisection to kWindowTolerance. The returned endpoints are always feasible.
/// Throws InfeasibleError when no grid point is feasible.
ExitTimeWindow exit_time_window(double t0, double p0, double v0, double pf,
                                const VehicleLimits& limits);

/// Keeps the earliest exit time computed at entry when it is later than the
/// one computed now. Throws InfeasibleError if the result is empty.
ExitTimeWindow revise_window(const ExitTimeWindow& at_entry, const ExitTimeWindow& at_tau);

}  // namespace cavcoord
