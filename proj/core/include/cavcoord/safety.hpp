#pragma once

#include <limits>
#include <span>
#include <vector>

#include "cavcoord/geometry.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

using CavId = int;

/// Speed-dependent headway delta(t) = gamma + phi * v(t).
struct SafetyParams {
  double gamma = 2.0;  // standstill distance, m
  double phi = 0.6;    // reaction time, s

  double headway(double speed) const { return gamma + phi * speed; }
  void validate() const;
};

/// A trajectory published to the coordinator, in the frame of its own path.
struct CommittedPlan {
  CavId cav_id = 0;
  PathId path_id = 0;
  CubicTrajectory trajectory;
  double entry_time = 0.0;  // control-zone entry t^0
  double exit_time = 0.0;   // equals trajectory.t_end()
};

/// Margin reported when a constraint has nothing to enforce.
inline constexpr double kUnconstrained = -std::numeric_limits<double>::infinity();

/// max over [max(follower.t_start, leader.t_start), follower.t_end] of
/// gamma + phi v_f(t) + p_f(t) - p_l(t). Past its exit the leader is
/// extrapolated at its exit speed. Non-positive means safe.
double rear_end_margin(const CubicTrajectory& follower, const CommittedPlan& leader,
                       const SafetyParams& params);

/// Min-max lateral constraint at one conflict point.
///
/// Branch 1 (candidate crosses after `other`): max of delta_i + p_i - p_i^n on
/// [candidate.t_start, t_k^n]. Branch 2 (candidate crosses first): max of
/// delta_k + p_k - p_k^n on [other.t_start, t_i^n]. Intervals are clamped to
/// each trajectory's domain; an inverted interval contributes kUnconstrained.
/// A vehicle already past its conflict position at its trajectory start is
/// treated as having crossed at -infinity.
double lateral_margin(const CubicTrajectory& candidate, double p_i_n, const CommittedPlan& other,
                      double p_k_n, const SafetyParams& params);

struct SafetyVerdict {
  bool safe = true;
  double worst_margin = kUnconstrained;
};

/// Rear-end check against the nearest committed vehicle ahead on the same
/// path, lateral check against every committed vehicle on a crossing path.
/// With `stop_at_violation` the scan returns on the first positive margin.
SafetyVerdict check_candidate(const CubicTrajectory& candidate, PathId cav_path,
                              std::span<const CommittedPlan> committed,
                              const IntersectionGeometry& geometry, const SafetyParams& params,
                              bool stop_at_violation = false);

/// check_candidate against a fixed committed set, with the committed side of
/// every conflict (crossing time, headway polynomial) computed once. Verdicts
/// match check_candidate exactly. Holds a view of `committed`.
class CandidateChecker {
 public:
  CandidateChecker(PathId cav_path, std::span<const CommittedPlan> committed,
                   const IntersectionGeometry& geometry, const SafetyParams& params);

  SafetyVerdict check(const CubicTrajectory& candidate, bool stop_at_violation = false) const;

 private:
  struct Conflict {
    std::size_t other;
    std::size_t own_slot;  // index into distinct own conflict positions
    double p_k_n;
    double t_k_n;
    Cubic other_excess;  // about other.t_start
  };

  PathId path_;
  std::span<const CommittedPlan> committed_;
  SafetyParams params_;
  std::vector<double> own_positions_;
  std::vector<Conflict> conflicts_;
};

/// Index into `committed` of the nearest vehicle ahead of `candidate` on
/// `cav_path` at candidate.t_start, or -1.
int nearest_leader(const CubicTrajectory& candidate, PathId cav_path,
                   std::span<const CommittedPlan> committed);

/// Index of the nearest vehicle behind `candidate` whose plan is already
/// active at candidate.t_start, or -1.
int nearest_follower(const CubicTrajectory& candidate, PathId cav_path,
                     std::span<const CommittedPlan> committed);

}  // namespace cavcoord
