#include "cavcoord/audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cavcoord {

namespace {

struct Sampled {
  const VehicleRecord* v = nullptr;
  long first = 0;             // index of the first sample
  std::vector<double> p;      // position per sample
  std::vector<double> h;      // gamma + phi v + p per sample
  std::vector<double> h_max;  // running maximum of h
};

Sampled sample(const VehicleRecord& v, double step, const SafetyParams& params) {
  Sampled s;
  s.v = &v;
  s.first = static_cast<long>(std::ceil(v.entry_time / step));
  const auto last = static_cast<long>(std::floor(*v.exit_time / step));
  for (long k = s.first; k <= last; ++k) {
    const auto st = v.state_at(static_cast<double>(k) * step);
    s.p.push_back(st.p);
    s.h.push_back(params.headway(st.v) + st.p);
    s.h_max.push_back(s.h_max.empty() ? s.h.back() : std::max(s.h_max.back(), s.h.back()));
  }
  return s;
}

// Realized time at which the vehicle reaches position `p`.
double realized_crossing(const VehicleRecord& v, double p) {
  for (std::size_t i = 0; i < v.segments.size(); ++i) {
    const double until = i + 1 < v.segments.size() ? v.segments[i + 1].t_start() : *v.exit_time;
    const auto& seg = v.segments[i];
    if (seg.position(until) >= p) {
      if (seg.position(seg.t_start()) >= p) return seg.t_start();
      return time_at_position(seg, p);
    }
  }
  return *v.exit_time;
}

// max of h over samples at times <= t (empty range gives -inf).
double branch(const Sampled& s, double t, double step) {
  const auto k = static_cast<long>(std::floor(t / step)) - s.first;
  if (k < 0 || s.h_max.empty()) return -std::numeric_limits<double>::infinity();
  return s.h_max[static_cast<std::size_t>(std::min<long>(k, static_cast<long>(s.h_max.size()) - 1))];
}

}  // namespace

RealizedAudit audit_realized_safety(const SimulationLog& log, double step) {
  const auto& params = log.config.safety;
  const auto& geometry = log.config.geometry;
  RealizedAudit out;

  std::vector<Sampled> samples;
  for (const auto& v : log.vehicles)
    if (v.exit_time && !v.segments.empty()) samples.push_back(sample(v, step, params));

  auto overlap = [](const Sampled& a, const Sampled& b) {
    return a.v->entry_time <= *b.v->exit_time && b.v->entry_time <= *a.v->exit_time;
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const Sampled& a = samples[i];
      const Sampled& b = samples[j];
      if (!overlap(a, b)) continue;

      if (a.v->path_id == b.v->path_id) {
        // Entry order is physical order on a path.
        const Sampled& lead = a.v->entry_time <= b.v->entry_time ? a : b;
        const Sampled& follow = &lead == &a ? b : a;
        ++out.rear_end_pairs;
        const long from = std::max(lead.first, follow.first);
        const long to = std::min(lead.first + static_cast<long>(lead.p.size()),
                                 follow.first + static_cast<long>(follow.p.size()));
        for (long k = from; k < to; ++k) {
          const double m = follow.h[static_cast<std::size_t>(k - follow.first)] -
                           lead.p[static_cast<std::size_t>(k - lead.first)];
          if (m > out.worst_rear_end) {
            out.worst_rear_end = m;
            out.worst_rear_end_follower = follow.v->cav_id;
          }
        }
        continue;
      }

      for (const auto& x : geometry.crossings(a.v->path_id, b.v->path_id)) {
        ++out.lateral_pairs;
        const double t_a = realized_crossing(*a.v, x.distance_on_a);
        const double t_b = realized_crossing(*b.v, x.distance_on_b);
        const double a_after = branch(a, t_b, step) - x.distance_on_a;
        const double b_after = branch(b, t_a, step) - x.distance_on_b;
        const double m = std::min(a_after, b_after);
        if (m > out.worst_lateral) {
          out.worst_lateral = m;
          out.worst_lateral_pair[0] = a.v->cav_id;
          out.worst_lateral_pair[1] = b.v->cav_id;
        }
      }
    }
  }
  return out;
}

CommitAudit audit_commits(const SimulationLog& log) {
  const auto& params = log.config.safety;
  const auto& geometry = log.config.geometry;
  CommitAudit out;

  for (const auto& round : log.rounds) {
    std::vector<CommittedPlan> plans = round.held;
    for (const auto& c : round.commits) plans.push_back(c.plan);
    out.plans_checked += round.commits.size();

    for (std::size_t i = 0; i < plans.size(); ++i) {
      for (std::size_t j = i + 1; j < plans.size(); ++j) {
        const auto& a = plans[i];
        const auto& b = plans[j];
        double m = -std::numeric_limits<double>::infinity();
        if (a.path_id == b.path_id) {
          const bool a_ahead =
              a.trajectory.position(round.tau) > b.trajectory.position(round.tau);
          m = a_ahead ? rear_end_margin(b.trajectory, a, params)
                      : rear_end_margin(a.trajectory, b, params);
        } else {
          for (const auto& x : geometry.crossings(a.path_id, b.path_id))
            m = std::max(m, lateral_margin(a.trajectory, x.distance_on_a, b, x.distance_on_b,
                                           params));
        }
        ++out.pairs_checked;
        out.worst_margin = std::max(out.worst_margin, m);
      }
    }
  }
  return out;
}

}  // namespace cavcoord
