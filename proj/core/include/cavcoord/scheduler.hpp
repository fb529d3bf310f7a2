#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "cavcoord/exit_window.hpp"
#include "cavcoord/safety.hpp"

namespace cavcoord {

/// One vehicle viewed as a job on the single machine "control zone".
struct Job {
  CavId cav_id = 0;
  double weight = 1.0;           // > 0
  double processing_time = 1.0;  // s, > 0
};

/// Vehicles of one path, physically leading vehicle first.
struct Chain {
  PathId path_id = 0;
  std::vector<Job> jobs;
};

/// Disjoint chains, one per occupied path.
struct PrecedenceGraph {
  std::vector<Chain> chains;

  std::size_t job_count() const;
  /// Throws std::invalid_argument on empty chains, non-positive weights or
  /// processing times, repeated path ids, or a vehicle listed twice.
  void validate() const;
};

struct DecisionSequence {
  std::vector<CavId> order;

  friend bool operator==(const DecisionSequence&, const DecisionSequence&) = default;
};

inline constexpr double kMinWindowWidth = 1e-3;  // s

/// 1 / max(width, 1e-3 s).
double weight_from_window(const ExitTimeWindow& window);

struct RhoFactor {
  double rho = 0.0;
  std::size_t prefix_length = 0;  // 1-based index of the determining job
};

/// Largest prefix ratio sum(w) / sum(P); equal ratios resolve to the longer
/// prefix. Throws std::invalid_argument on an empty chain.
RhoFactor rho_factor(std::span<const Job> chain);

/// Optimal sequence for 1 | chains | sum w_j C_j.
///
/// Repeatedly picks the chain with the largest rho-factor (equal factors go to
/// the lowest path id) and emits that chain's prefix through its determining
/// job as one block. Because a chain's rho-factor depends only on its own
/// remaining jobs, each chain is first split into its successive rho-blocks in
/// one linear pass, and the blocks of all chains are then merged by factor.
DecisionSequence resequence(const PrecedenceGraph& graph);

using JobTable = std::unordered_map<CavId, Job>;

JobTable job_table(const PrecedenceGraph& graph);

/// sum_i w_i C_i where C_i accumulates processing times along the sequence.
/// Throws std::out_of_range for a vehicle missing from `jobs`.
double weighted_completion(const DecisionSequence& sequence, const JobTable& jobs);

struct EntryRecord {
  CavId cav_id = 0;
  double entry_time = 0.0;
};

/// Vehicles with exactly equal entry times, in the order the draw put them.
struct TieBreak {
  double entry_time = 0.0;
  std::vector<CavId> order;
};

/// Ascending entry time. Exact ties are ordered by a draw from `rng`; each
/// tie group is appended to `ties` when given.
DecisionSequence fcfs_sequence(std::span<const EntryRecord> entries, std::mt19937_64& rng,
                               std::vector<TieBreak>* ties = nullptr);

struct BruteForceResult {
  DecisionSequence sequence;
  double j_min = 0.0;
};

inline constexpr std::size_t kBruteForceLimit = 10;

/// Exhaustive search over precedence-feasible permutations; equal costs
/// resolve to the lexicographically smallest sequence. Throws
/// std::invalid_argument above kBruteForceLimit jobs.
BruteForceResult brute_force_optimal(const PrecedenceGraph& graph);

}  // namespace cavcoord
