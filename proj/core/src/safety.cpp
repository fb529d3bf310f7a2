#include "cavcoord/safety.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cavcoord/errors.hpp"

namespace cavcoord {

void SafetyParams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError(fmt::format("safety: gamma must be > 0 (got {})", gamma));
  if (!(phi > 0.0)) throw ConfigError(fmt::format("safety: phi must be > 0 (got {})", phi));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// gamma + phi v(t) + p(t) - offset as a polynomial in (t - origin).
Cubic headway_excess(const CubicTrajectory& traj, double origin, double offset,
                     const SafetyParams& params) {
  const Cubic p = traj.position_about(origin);
  Cubic out = p + p.derivative() * params.phi;
  out.c[0] += params.gamma - offset;
  return out;
}

double crossing_time(const CubicTrajectory& traj, double p) {
  if (p < traj.position(traj.t_start())) return -kInf;
  if (p > traj.position(traj.t_end())) return kInf;
  return time_at_position(traj, p);
}

double branch_max(const CubicTrajectory& traj, double until, double conflict_pos,
                  const SafetyParams& params) {
  const double lo = traj.t_start();
  const double hi = std::min(until, traj.t_end());
  if (hi < lo) return kUnconstrained;
  const Cubic g = headway_excess(traj, lo, conflict_pos, params);
  return poly_extremum_on_interval(g, 0.0, hi - lo).value;
}

}  // namespace

double rear_end_margin(const CubicTrajectory& follower, const CommittedPlan& leader,
                       const SafetyParams& params) {
  const CubicTrajectory& lead = leader.trajectory;
  const double lo = std::max(follower.t_start(), lead.t_start());
  const double hi = follower.t_end();
  if (hi < lo) return kUnconstrained;

  const Cubic own = headway_excess(follower, lo, 0.0, params);
  double worst = kUnconstrained;

  // Leader still on its plan.
  const double split = std::min(hi, lead.t_end());
  if (split >= lo) {
    const Cubic margin = own - lead.position_about(lo);
    worst = std::max(worst, poly_extremum_on_interval(margin, 0.0, split - lo).value);
  }
  // Leader past its exit, extrapolated at constant exit speed.
  if (hi > lead.t_end()) {
    const double from = std::max(lo, lead.t_end());
    const auto exit = lead.eval_unchecked(lead.t_end());
    const double shift = lead.t_end() - lo;
    const Cubic line{{exit.p - exit.v * shift, exit.v, 0.0, 0.0}};
    worst = std::max(worst, poly_extremum_on_interval(own - line, from - lo, hi - lo).value);
  }
  return worst;
}

double lateral_margin(const CubicTrajectory& candidate, double p_i_n, const CommittedPlan& other,
                      double p_k_n, const SafetyParams& params) {
  const double t_k_n = crossing_time(other.trajectory, p_k_n);
  const double t_i_n = crossing_time(candidate, p_i_n);
  const double after = branch_max(candidate, t_k_n, p_i_n, params);
  const double before = branch_max(other.trajectory, t_i_n, p_k_n, params);
  return std::min(after, before);
}

int nearest_leader(const CubicTrajectory& candidate, PathId cav_path,
                   std::span<const CommittedPlan> committed) {
  const double t = candidate.t_start();
  const double own = candidate.position(t);
  int best = -1;
  double best_pos = kInf;
  for (std::size_t i = 0; i < committed.size(); ++i) {
    const auto& c = committed[i];
    if (c.path_id != cav_path) continue;
    const auto& tr = c.trajectory;
    if (t > tr.t_end()) continue;
    const double pos = tr.position(std::max(t, tr.t_start()));
    if (pos <= own) continue;
    if (pos < best_pos) {
      best_pos = pos;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int nearest_follower(const CubicTrajectory& candidate, PathId cav_path,
                     std::span<const CommittedPlan> committed) {
  const double t = candidate.t_start();
  const double own = candidate.position(t);
  int best = -1;
  double best_pos = -kInf;
  for (std::size_t i = 0; i < committed.size(); ++i) {
    const auto& c = committed[i];
    if (c.path_id != cav_path) continue;
    const auto& tr = c.trajectory;
    if (t > tr.t_end() || t < tr.t_start()) continue;
    const double pos = tr.position(t);
    if (pos >= own) continue;
    if (pos > best_pos) {
      best_pos = pos;
      best = static_cast<int>(i);
    }
  }
  return best;
}

CandidateChecker::CandidateChecker(PathId cav_path, std::span<const CommittedPlan> committed,
                                   const IntersectionGeometry& geometry,
                                   const SafetyParams& params)
    : path_(cav_path), committed_(committed), params_(params) {
  for (std::size_t i = 0; i < committed.size(); ++i) {
    const auto& other = committed[i];
    if (other.path_id == cav_path) continue;
    const auto& tr = other.trajectory;
    for (const auto& x : geometry.crossings(cav_path, other.path_id)) {
      auto slot = std::find(own_positions_.begin(), own_positions_.end(), x.distance_on_a);
      if (slot == own_positions_.end()) slot = own_positions_.insert(slot, x.distance_on_a);
      conflicts_.push_back({i, static_cast<std::size_t>(slot - own_positions_.begin()),
                            x.distance_on_b, crossing_time(tr, x.distance_on_b),
                            headway_excess(tr, tr.t_start(), x.distance_on_b, params)});
    }
  }
}

SafetyVerdict CandidateChecker::check(const CubicTrajectory& candidate,
                                      bool stop_at_violation) const {
  SafetyVerdict verdict;
  auto record = [&](double margin) {
    verdict.worst_margin = std::max(verdict.worst_margin, margin);
    if (margin > 0.0) verdict.safe = false;
    return stop_at_violation && !verdict.safe;
  };

  if (const int leader = nearest_leader(candidate, path_, committed_); leader >= 0) {
    if (record(rear_end_margin(candidate, committed_[leader], params_))) return verdict;
  }
  if (conflicts_.empty()) return verdict;

  constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> own_cross(own_positions_.size(), kUnset);
  for (const auto& c : conflicts_) {
    const double p_i_n = own_positions_[c.own_slot];
    double& t_i_n = own_cross[c.own_slot];
    if (std::isnan(t_i_n)) t_i_n = crossing_time(candidate, p_i_n);

    const double after = branch_max(candidate, c.t_k_n, p_i_n, params_);
    const auto& tr = committed_[c.other].trajectory;
    const double hi = std::min(t_i_n, tr.t_end());
    const double before =
        hi < tr.t_start()
            ? kUnconstrained
            : poly_extremum_on_interval(c.other_excess, 0.0, hi - tr.t_start()).value;
    if (record(std::min(after, before))) return verdict;
  }
  return verdict;
}

SafetyVerdict check_candidate(const CubicTrajectory& candidate, PathId cav_path,
                              std::span<const CommittedPlan> committed,
                              const IntersectionGeometry& geometry, const SafetyParams& params,
                              bool stop_at_violation) {
  return CandidateChecker(cav_path, committed, geometry, params)
      .check(candidate, stop_at_violation);
}

}  // namespace cavcoord
