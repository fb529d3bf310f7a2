#include "cavcoord/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace cavcoord {

std::size_t PrecedenceGraph::job_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.jobs.size();
  return n;
}

void PrecedenceGraph::validate() const {
  std::set<PathId> paths;
  std::set<CavId> cavs;
  for (const auto& c : chains) {
    if (c.jobs.empty()) throw std::invalid_argument(fmt::format("chain {} is empty", c.path_id));
    if (!paths.insert(c.path_id).second)
      throw std::invalid_argument(fmt::format("two chains for path {}", c.path_id));
    for (const auto& j : c.jobs) {
      if (!(j.weight > 0.0) || !(j.processing_time > 0.0))
        throw std::invalid_argument(fmt::format(
            "job {}: weight and processing time must be positive (w = {}, P = {})", j.cav_id,
            j.weight, j.processing_time));
      if (!cavs.insert(j.cav_id).second)
        throw std::invalid_argument(fmt::format("vehicle {} appears twice", j.cav_id));
    }
  }
}

double weight_from_window(const ExitTimeWindow& window) {
  return 1.0 / std::max(window.upper - window.lower, kMinWindowWidth);
}

RhoFactor rho_factor(std::span<const Job> chain) {
  if (chain.empty()) throw std::invalid_argument("rho_factor of an empty chain");
  RhoFactor best{-std::numeric_limits<double>::infinity(), 0};
  double w = 0.0;
  double p = 0.0;
  for (std::size_t a = 0; a < chain.size(); ++a) {
    w += chain[a].weight;
    p += chain[a].processing_time;
    const double ratio = w / p;
    if (ratio >= best.rho) best = {ratio, a + 1};
  }
  return best;
}

namespace {

struct Block {
  double weight = 0.0;
  double time = 0.0;
  std::size_t begin = 0;  // job range [begin, end) within the chain
  std::size_t end = 0;

  double ratio() const { return weight / time; }
};

// Successive rho-blocks of one chain: merge adjacent blocks while the later
// one's ratio is at least the earlier one's. The surviving ratios strictly
// decrease, and the first block is the longest prefix attaining rho.
std::vector<Block> rho_blocks(const Chain& chain) {
  std::vector<Block> stack;
  for (std::size_t i = 0; i < chain.jobs.size(); ++i) {
    Block cur{chain.jobs[i].weight, chain.jobs[i].processing_time, i, i + 1};
    while (!stack.empty() && stack.back().ratio() <= cur.ratio()) {
      const Block prev = stack.back();
      stack.pop_back();
      cur = {prev.weight + cur.weight, prev.time + cur.time, prev.begin, cur.end};
    }
    stack.push_back(cur);
  }
  return stack;
}

}  // namespace

DecisionSequence resequence(const PrecedenceGraph& graph) {
  graph.validate();

  struct Tagged {
    Block block;
    std::size_t chain;
  };
  std::vector<Tagged> blocks;
  for (std::size_t c = 0; c < graph.chains.size(); ++c)
    for (const auto& b : rho_blocks(graph.chains[c])) blocks.push_back({b, c});

  std::stable_sort(blocks.begin(), blocks.end(), [&](const Tagged& x, const Tagged& y) {
    const double rx = x.block.ratio();
    const double ry = y.block.ratio();
    if (rx != ry) return rx > ry;
    return graph.chains[x.chain].path_id < graph.chains[y.chain].path_id;
  });

  DecisionSequence out;
  out.order.reserve(graph.job_count());
  for (const auto& t : blocks) {
    const auto& jobs = graph.chains[t.chain].jobs;
    for (std::size_t i = t.block.begin; i < t.block.end; ++i) out.order.push_back(jobs[i].cav_id);
  }
  return out;
}

JobTable job_table(const PrecedenceGraph& graph) {
  JobTable table;
  for (const auto& c : graph.chains)
    for (const auto& j : c.jobs) table.emplace(j.cav_id, j);
  return table;
}

double weighted_completion(const DecisionSequence& sequence, const JobTable& jobs) {
  double completion = 0.0;
  double total = 0.0;
  for (CavId id : sequence.order) {
    auto it = jobs.find(id);
    if (it == jobs.end()) throw std::out_of_range(fmt::format("unknown vehicle {}", id));
    completion += it->second.processing_time;
    total += it->second.weight * completion;
  }
  return total;
}

DecisionSequence fcfs_sequence(std::span<const EntryRecord> entries, std::mt19937_64& rng,
                               std::vector<TieBreak>* ties) {
  std::vector<EntryRecord> sorted(entries.begin(), entries.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.entry_time < b.entry_time; });

  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j].entry_time == sorted[i].entry_time) ++j;
    if (j - i > 1) {
      // Fisher-Yates with a 53-bit uniform draw, independent of the
      // standard library's distribution implementations.
      for (std::size_t k = j - 1; k > i; --k) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const auto r = i + static_cast<std::size_t>(u * static_cast<double>(k - i + 1));
        std::swap(sorted[k], sorted[r]);
      }
      if (ties) {
        TieBreak tb{sorted[i].entry_time, {}};
        for (std::size_t k = i; k < j; ++k) tb.order.push_back(sorted[k].cav_id);
        ties->push_back(std::move(tb));
      }
    }
    i = j;
  }

  DecisionSequence out;
  out.order.reserve(sorted.size());
  for (const auto& e : sorted) out.order.push_back(e.cav_id);
  return out;
}

BruteForceResult brute_force_optimal(const PrecedenceGraph& graph) {
  graph.validate();
  const std::size_t n = graph.job_count();
  if (n > kBruteForceLimit)
    throw std::invalid_argument(
        fmt::format("brute force limited to {} jobs (got {})", kBruteForceLimit, n));

  BruteForceResult best{{}, std::numeric_limits<double>::infinity()};
  std::vector<std::size_t> next(graph.chains.size(), 0);
  std::vector<CavId> current;
  current.reserve(n);

  // Chains ordered by their head's id so that the search visits sequences
  // in lexicographic order and keeps the first minimum it meets.
  auto recurse = [&](auto& self, double elapsed, double cost) -> void {
    if (current.size() == n) {
      if (cost < best.j_min) best = {{current}, cost};
      return;
    }
    std::vector<std::size_t> ready;
    for (std::size_t c = 0; c < graph.chains.size(); ++c)
      if (next[c] < graph.chains[c].jobs.size()) ready.push_back(c);
    std::sort(ready.begin(), ready.end(), [&](std::size_t x, std::size_t y) {
      return graph.chains[x].jobs[next[x]].cav_id < graph.chains[y].jobs[next[y]].cav_id;
    });
    for (std::size_t c : ready) {
      const Job& job = graph.chains[c].jobs[next[c]];
      const double done = elapsed + job.processing_time;
      current.push_back(job.cav_id);
      ++next[c];
      self(self, done, cost + job.weight * done);
      --next[c];
      current.pop_back();
    }
  };
  recurse(recurse, 0.0, 0.0);
  return best;
}

}  // namespace cavcoord
