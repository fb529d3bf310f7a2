#pragma once

#include <limits>

#include "cavcoord/simulator.hpp"

namespace cavcoord {

/// Worst margins found on the realized (executed) motion of a run, sampled
/// on a uniform time grid. Only meaningful for noise-free runs, where the
/// realized motion is continuous.
struct RealizedAudit {
  double worst_rear_end = -std::numeric_limits<double>::infinity();
  double worst_lateral = -std::numeric_limits<double>::infinity();
  std::size_t rear_end_pairs = 0;
  std::size_t lateral_pairs = 0;
  CavId worst_rear_end_follower = 0;
  CavId worst_lateral_pair[2] = {0, 0};
};

/// Rear-end: every ordered same-path pair over the samples where both are in
/// the zone. Lateral: for every pair on crossing paths and every shared
/// conflict, min of the two branch maxima with realized crossing times.
RealizedAudit audit_realized_safety(const SimulationLog& log, double sample_step = 0.01);

struct CommitAudit {
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::size_t plans_checked = 0;
  std::size_t pairs_checked = 0;
};

/// Re-verifies each replanning round on its own terms: all plans that round
/// (held and committed, each starting from the observed state it was planned
/// from) are checked pairwise with the exact margins.
CommitAudit audit_commits(const SimulationLog& log);

}  // namespace cavcoord
