#include "cavcoord/exit_window.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "cavcoord/errors.hpp"

namespace cavcoord {

namespace {

constexpr int kGridIntervals = 2048;

struct DurationProbe {
  double t0, p0, v0, pf;
  const VehicleLimits& limits;

  bool operator()(double duration) const {
    return feasibility_check(solve_cubic(t0, p0, v0, t0 + duration, pf), limits);
  }
};

// Bisection between an infeasible and a feasible duration; returns the
// feasible end once the bracket is below tolerance.
double refine(const DurationProbe& feasible, double bad, double good) {
  while (std::abs(good - bad) > 0.5 * kWindowTolerance) {
    const double mid = 0.5 * (bad + good);
    (feasible(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace

ExitTimeWindow exit_time_window(double t0, double p0, double v0, double pf,
                                const VehicleLimits& limits) {
  if (!(p0 < pf))
    throw std::invalid_argument(fmt::format("exit_time_window: p0 = {} must be < pf = {}", p0, pf));
  if (!(v0 > 0.0))
    throw std::invalid_argument(fmt::format("exit_time_window: v0 = {} must be positive", v0));

  const double distance = pf - p0;
  const double shortest = distance / limits.v_max;
  const double longest = distance / limits.v_min;
  const DurationProbe feasible{t0, p0, v0, pf, limits};

  const double step = (longest - shortest) / kGridIntervals;
  auto grid = [&](int k) { return k == kGridIntervals ? longest : shortest + k * step; };

  // Holding the current speed is feasible whenever that speed is within
  // limits. It anchors both scans so that short windows near the exit are
  // not lost between grid points.
  std::optional<double> anchor;
  if (v0 >= limits.v_min && v0 <= limits.v_max && feasible(distance / v0))
    anchor = distance / v0;

  // Grid indices strictly below / above the anchor.
  int below_end = kGridIntervals + 1;
  int above_begin = 0;
  if (anchor) {
    below_end = 0;
    while (below_end <= kGridIntervals && grid(below_end) < *anchor) ++below_end;
    above_begin = below_end;
    while (above_begin <= kGridIntervals && grid(above_begin) <= *anchor) ++above_begin;
  }

  std::optional<double> lo;
  for (int k = 0; k < below_end; ++k) {
    if (feasible(grid(k))) {
      lo = k == 0 ? grid(0) : refine(feasible, grid(k - 1), grid(k));
      break;
    }
  }
  if (!lo && anchor) lo = below_end == 0 ? *anchor : refine(feasible, grid(below_end - 1), *anchor);
  if (!lo)
    throw InfeasibleError(fmt::format(
        "no feasible exit time from p0 = {} m, v0 = {} m/s to pf = {} m", p0, v0, pf));

  std::optional<double> hi;
  for (int k = kGridIntervals; k >= above_begin && grid(k) >= *lo; --k) {
    if (feasible(grid(k))) {
      hi = k == kGridIntervals ? grid(k) : refine(feasible, grid(k + 1), grid(k));
      break;
    }
  }
  if (!hi && anchor)
    hi = above_begin > kGridIntervals ? *anchor : refine(feasible, grid(above_begin), *anchor);
  if (!hi) hi = lo;
  return {t0 + *lo, t0 + *hi};
}

ExitTimeWindow revise_window(const ExitTimeWindow& at_entry, const ExitTimeWindow& at_tau) {
  ExitTimeWindow out{std::max(at_entry.lower, at_tau.lower), at_tau.upper};
  if (out.lower > out.upper)
    throw InfeasibleError(
        fmt::format("revised exit-time window [{}, {}] is empty", out.lower, out.upper));
  return out;
}

}  // namespace cavcoord
