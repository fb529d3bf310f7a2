#include "cavcoord/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cavcoord/metrics.hpp"

namespace cavcoord {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

double symmetric_draw(std::mt19937_64& rng, double half) {
  if (half <= 0.0) return 0.0;
  return (2.0 * unit_draw(rng) - 1.0) * half;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    purpose, index};
  return std::mt19937_64(seq);
}

enum StreamPurpose : std::uint32_t { kArrivals = 1, kNoise = 2, kTies = 3 };

nlohmann::json plan_json(const CommittedPlan& p) {
  const auto& tr = p.trajectory;
  return {{"cav", p.cav_id},
          {"path", p.path_id},
          {"t_start", tr.t_start()},
          {"t_end", tr.t_end()},
          {"local", tr.local().c},
          {"entry_time", p.entry_time}};
}

}  // namespace

Observation observe_state(const CommittedPlan& plan, double tau, const NoiseModel& noise,
                          double path_length, const VehicleLimits& limits,
                          std::mt19937_64& rng) {
  const auto truth = plan.trajectory.eval(tau);
  const double dp = symmetric_draw(rng, noise.position);
  const double dv = symmetric_draw(rng, noise.speed);
  return {plan.cav_id, tau, std::clamp(truth.p + dp, 0.0, path_length),
          std::clamp(truth.v + dv, limits.v_min, limits.v_max)};
}

CommittedPlan plan(const PlanRequest& req, std::span<const CommittedPlan> committed,
                   const PlannerContext& ctx) {
  const auto& obs = req.observation;
  const double path_length = ctx.geometry.path(req.path_id).length;
  const double lower = req.window.lower;
  const double upper = req.window.upper;
  if (!(lower <= upper))
    throw InfeasibleError(
        fmt::format("vehicle {}: empty exit-time window [{}, {}]", req.cav_id, lower, upper));

  auto candidate = [&](double tf) {
    return solve_cubic(obs.tau, obs.p_observed, obs.v_observed, tf, path_length);
  };
  const CandidateChecker checker(req.path_id, committed, ctx.geometry, ctx.safety);
  auto acceptable = [&](const CubicTrajectory& traj) {
    if (!feasibility_check(traj, ctx.limits)) return false;
    if (!checker.check(traj, true).safe) return false;
    const int follower = nearest_follower(traj, req.path_id, committed);
    if (follower < 0) return true;
    const CommittedPlan self{req.cav_id, req.path_id, traj, req.entry_time, traj.t_end()};
    return rear_end_margin(committed[follower].trajectory, self, ctx.safety) <= 0.0;
  };
  auto safe = [&](double tf) { return acceptable(candidate(tf)); };

  std::optional<double> chosen;
  double previous = lower;
  for (long k = 0;; ++k) {
    const double tf = std::min(lower + static_cast<double>(k) * ctx.grid_step, upper);
    if (safe(tf)) {
      if (k == 0) {
        chosen = tf;
      } else {
        double bad = previous;
        double good = tf;
        while (good - bad > kPlannerTolerance) {
          const double mid = 0.5 * (bad + good);
          (safe(mid) ? good : bad) = mid;
        }
        chosen = good;
      }
      break;
    }
    if (tf >= upper) break;
    previous = tf;
  }

  if (!chosen && req.retained && acceptable(*req.retained))
    return {req.cav_id, req.path_id, *req.retained, req.entry_time, req.retained->t_end()};
  if (!chosen)
    throw InfeasibleError(fmt::format("vehicle {}: no safe exit time in [{}, {}]", req.cav_id,
                                      lower, upper));

  return {req.cav_id, req.path_id, candidate(*chosen), req.entry_time, *chosen};
}

std::optional<double> entry_deferral(const CommittedPlan* last_on_path, double t,
                                     double entry_speed, const SafetyParams& params) {
  if (!last_on_path) return std::nullopt;
  const auto& tr = last_on_path->trajectory;
  if (t >= tr.t_end()) return std::nullopt;
  const double needed = params.headway(entry_speed);
  const double gap = tr.position(std::max(t, tr.t_start()));
  if (gap >= needed - 1e-9) return std::nullopt;
  if (needed >= tr.position(tr.t_end())) return tr.t_end();
  return std::max(t, time_at_position(tr, needed));
}

std::vector<Arrival> generate_arrivals(const ScenarioConfig& cfg) {
  std::vector<Arrival> all;
  for (const auto& [pid, volume] : cfg.volume) {
    auto rng = stream(cfg.seed, kArrivals, static_cast<std::uint32_t>(pid));
    const double headway = 3600.0 / volume;
    double t = cfg.arrival_model == ArrivalModel::uniform_headway ? unit_draw(rng) * headway : 0.0;
    for (;;) {
      if (cfg.arrival_model == ArrivalModel::poisson) t += -std::log1p(-unit_draw(rng)) * headway;
      if (t >= cfg.horizon) break;
      const double speed =
          cfg.entry_speed_min + unit_draw(rng) * (cfg.entry_speed_max - cfg.entry_speed_min);
      all.push_back({0, pid, t, speed});
      if (cfg.arrival_model == ArrivalModel::uniform_headway) t += headway;
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Arrival& a, const Arrival& b) {
    return a.time < b.time || (a.time == b.time && a.path_id < b.path_id);
  });
  if (cfg.max_cavs && all.size() > static_cast<std::size_t>(*cfg.max_cavs))
    all.resize(static_cast<std::size_t>(*cfg.max_cavs));
  for (std::size_t i = 0; i < all.size(); ++i) all[i].cav_id = static_cast<CavId>(i + 1);
  return all;
}

const CubicTrajectory& VehicleRecord::segment_at(double t) const {
  if (segments.empty()) throw std::logic_error(fmt::format("vehicle {} has no plan", cav_id));
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const CubicTrajectory& s) { return v < s.t_start(); });
  return it == segments.begin() ? segments.front() : *std::prev(it);
}

KinematicState VehicleRecord::state_at(double t) const { return segment_at(t).eval_unchecked(t); }

namespace {

enum class EventKind { exit = 0, arrival = 1, entry_retry = 2, timer = 3 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::timer;
  std::uint64_t seq = 0;
  CavId cav = 0;
  int version = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, SequencingPolicy policy)
      : cfg_(cfg),
        policy_(policy),
        noise_rng_(stream(cfg.seed, kNoise)),
        tie_rng_(stream(cfg.seed, kTies)),
        ctx_{cfg_.geometry, cfg_.limits, cfg_.safety, cfg_.planner_grid_step} {
    log_.config = cfg;
    log_.simulated_policy = policy;
  }

  SimulationLog run() {
    arrivals_ = generate_arrivals(cfg_);
    log_.vehicles.resize(arrivals_.size());
    versions_.assign(arrivals_.size() + 1, 0);
    for (const auto& a : arrivals_) {
      auto& v = log_.vehicles[static_cast<std::size_t>(a.cav_id - 1)];
      v.cav_id = a.cav_id;
      v.path_id = a.path_id;
      v.path_length = cfg_.geometry.path(a.path_id).length;
      v.arrival_time = a.time;
      v.entry_speed = a.speed;
      push({a.time, EventKind::arrival, 0, a.cav_id, 0});
    }
    const bool timers =
        cfg_.replanning == ReplanMode::periodic || cfg_.replanning == ReplanMode::both;
    if (timers && !arrivals_.empty()) push({cfg_.replan_period, EventKind::timer, 0, 0, 0});

    while (!queue_.empty()) {
      const double t = queue_.top().time;
      std::vector<CavId> entered;
      bool timer = false;
      while (!queue_.empty() && queue_.top().time == t) {
        const Event e = queue_.top();
        queue_.pop();
        switch (e.kind) {
          case EventKind::exit:
            handle_exit(e);
            break;
          case EventKind::arrival:
            handle_arrival(e.cav, t, entered);
            break;
          case EventKind::entry_retry:
            try_enter(e.cav, t, entered);
            break;
          case EventKind::timer:
            timer = true;
            if (pending_entries() || !in_zone_.empty())
              push({t + cfg_.replan_period, EventKind::timer, 0, 0, 0});
            break;
        }
      }
      if (!entered.empty() || (timer && !in_zone_.empty())) {
        const bool everyone = timer || cfg_.replanning != ReplanMode::periodic;
        replan_round(t, timer && entered.empty() ? RoundTrigger::timer : RoundTrigger::arrival,
                     entered, everyone);
      }
    }
    return std::move(log_);
  }

 private:
  VehicleRecord& vehicle(CavId id) { return log_.vehicles[static_cast<std::size_t>(id - 1)]; }

  void push(Event e) {
    e.seq = next_seq_++;
    queue_.push(e);
  }

  bool pending_entries() const { return entered_count_ < arrivals_.size(); }

  void emit(nlohmann::json event) { log_.events.push_back(std::move(event)); }

  void handle_exit(const Event& e) {
    if (e.version != versions_[static_cast<std::size_t>(e.cav)]) return;
    auto& v = vehicle(e.cav);
    v.exit_time = e.time;
    in_zone_.erase(std::remove(in_zone_.begin(), in_zone_.end(), e.cav), in_zone_.end());
    auto& last = last_on_path_[v.path_id];
    if (last == e.cav) last = 0;
    emit({{"type", "exit"},
          {"t", e.time},
          {"cav", e.cav},
          {"path", v.path_id},
          {"travel_time", v.travel_time()}});
  }

  void handle_arrival(CavId id, double t, std::vector<CavId>& entered) {
    const auto& v = vehicle(id);
    emit({{"type", "arrival"}, {"t", t}, {"cav", id}, {"path", v.path_id}, {"v0", v.entry_speed}});
    auto& holding = holding_[v.path_id];
    if (!holding.empty()) {
      holding.push_back(id);
      emit({{"type", "deferral"}, {"t", t}, {"cav", id}, {"path", v.path_id}, {"reason", "queued"}});
      return;
    }
    holding.push_back(id);
    try_enter(id, t, entered);
  }

  // `id` is at the front of its path's holding queue.
  void try_enter(CavId id, double t, std::vector<CavId>& entered) {
    auto& v = vehicle(id);
    const CavId last = last_on_path_[v.path_id];
    std::optional<CommittedPlan> leader;
    if (last != 0) {
      const auto& lv = vehicle(last);
      leader = CommittedPlan{last, lv.path_id, lv.segment_at(t), lv.entry_time,
                             lv.segments.back().t_end()};
    }
    if (auto when = entry_deferral(leader ? &*leader : nullptr, t, v.entry_speed, cfg_.safety)) {
      emit({{"type", "deferral"},
            {"t", t},
            {"cav", id},
            {"path", v.path_id},
            {"reason", "gap"},
            {"retry_at", *when}});
      push({std::max(*when, t), EventKind::entry_retry, 0, id, 0});
      return;
    }

    ExitTimeWindow window;
    try {
      window = exit_time_window(t, 0.0, v.entry_speed, v.path_length, cfg_.limits);
    } catch (const InfeasibleError& e) {
      abort_run(t, id, e.what());
    }
    // The gap rule alone can admit a faster follower that cannot brake in
    // time, so entry also waits for a safe plan against current commitments.
    std::optional<CommittedPlan> admission;
    try {
      admission = plan({id, v.path_id, t, {id, t, 0.0, v.entry_speed}, window, std::nullopt},
                       current_commitments(t), ctx_);
    } catch (const InfeasibleError&) {
      const double retry = t + cfg_.planner_grid_step;
      emit({{"type", "deferral"},
            {"t", t},
            {"cav", id},
            {"path", v.path_id},
            {"reason", "unplannable"},
            {"retry_at", retry}});
      push({retry, EventKind::entry_retry, 0, id, 0});
      return;
    }

    auto& holding = holding_[v.path_id];
    holding.pop_front();
    v.entry_time = t;
    v.entry_window = window;
    v.weight = cfg_.weight_mode == WeightMode::inverse_window ? weight_from_window(v.entry_window)
                                                              : 1.0;
    in_zone_.push_back(id);
    last_on_path_[v.path_id] = id;
    ++entered_count_;
    entered.push_back(id);
    v.segments.push_back(admission->trajectory);
    emit({{"type", "entry"},
          {"t", t},
          {"cav", id},
          {"path", v.path_id},
          {"v0", v.entry_speed},
          {"window", {v.entry_window.lower, v.entry_window.upper}}});

    if (!holding.empty()) try_enter(holding.front(), t, entered);
  }

  std::vector<CommittedPlan> current_commitments(double t) const {
    std::vector<CommittedPlan> out;
    for (CavId id : in_zone_)
      if (auto p = current_plan(id, t)) out.push_back(std::move(*p));
    return out;
  }

  [[noreturn]] void abort_run(double tau, CavId cav, const std::string& why,
                              nlohmann::json diagnosis = nullptr) {
    nlohmann::json state;
    state["tau"] = tau;
    state["cav"] = cav;
    state["reason"] = why;
    state["policy"] = to_string(policy_);
    state["in_zone"] = nlohmann::json::array();
    for (CavId id : in_zone_) {
      const auto& v = vehicle(id);
      nlohmann::json jv = {{"cav", id},
                           {"path", v.path_id},
                           {"entry_time", v.entry_time},
                           {"entry_window", {v.entry_window.lower, v.entry_window.upper}}};
      if (!v.segments.empty()) {
        const auto s = v.state_at(tau);
        jv["p"] = s.p;
        jv["v"] = s.v;
        jv["plan_t_end"] = v.segments.back().t_end();
      }
      state["in_zone"].push_back(std::move(jv));
    }
    if (!log_.rounds.empty() && log_.rounds.back().tau == tau) {
      state["committed_this_round"] = nlohmann::json::array();
      for (const auto& c : log_.rounds.back().commits)
        state["committed_this_round"].push_back(plan_json(c.plan));
    }
    if (!diagnosis.is_null()) state["diagnosis"] = std::move(diagnosis);
    constexpr std::size_t kRecentEvents = 400;
    const std::size_t from = log_.events.size() > kRecentEvents ? log_.events.size() - kRecentEvents : 0;
    state["recent_events"] = nlohmann::json::array();
    for (std::size_t i = from; i < log_.events.size(); ++i)
      state["recent_events"].push_back(log_.events[i]);
    throw PlannerInfeasibleError(
        fmt::format("planning infeasible at t = {} for vehicle {}: {}", tau, cav, why),
        std::move(state), std::make_shared<const SimulationLog>(log_));
  }

  struct Candidate {
    CavId id = 0;
    Observation obs;
    ExitTimeWindow window;
    Job job;
  };

  // Plans `order` one vehicle at a time. Each vehicle sees the held plans and
  // the plans committed before it; with `respect_pending`, also the current
  // plans of the vehicles still to come, and it may keep its own current plan.
  struct Failure {
    CavId cav = 0;
    std::string why;
    nlohmann::json diagnosis;
  };

  // Which constraint rules out each grid exit time of a failed request.
  nlohmann::json diagnose(const PlanRequest& req, std::span<const CommittedPlan> against) const {
    nlohmann::json d = {{"p_obs", req.observation.p_observed},
                        {"v_obs", req.observation.v_observed},
                        {"window", {req.window.lower, req.window.upper}},
                        {"grid", nlohmann::json::array()}};
    const double length = cfg_.geometry.path(req.path_id).length;
    for (double tf = req.window.lower; tf <= req.window.upper + 1e-12; tf += cfg_.planner_grid_step) {
      const auto traj =
          solve_cubic(req.observation.tau, req.observation.p_observed, req.observation.v_observed,
                      tf, length);
      nlohmann::json row = {{"tf", tf}, {"feasible", feasibility_check(traj, cfg_.limits)}};
      double worst = -std::numeric_limits<double>::infinity();
      CavId by = 0;
      for (const auto& other : against) {
        const auto v = check_candidate(traj, req.path_id, std::span(&other, 1), cfg_.geometry,
                                       cfg_.safety);
        double m = v.worst_margin;
        if (other.path_id == req.path_id &&
            other.trajectory.position(std::max(traj.t_start(), other.trajectory.t_start())) <
                req.observation.p_observed) {
          const CommittedPlan self{req.cav_id, req.path_id, traj, req.entry_time, tf};
          m = std::max(m, rear_end_margin(other.trajectory, self, cfg_.safety));
        }
        if (m > worst) {
          worst = m;
          by = other.cav_id;
        }
      }
      row["worst_margin"] = std::isfinite(worst) ? nlohmann::json(worst) : nlohmann::json(nullptr);
      row["worst_against"] = by;
      d["grid"].push_back(std::move(row));
    }
    return d;
  }

  std::optional<Failure> plan_sequence(const std::vector<CavId>& order,
                                       const std::map<CavId, const Candidate*>& by_id,
                                       const std::vector<CommittedPlan>& held,
                                       bool respect_pending, std::vector<CommitRecord>& commits) {
    std::vector<CommittedPlan> committed = held;
    std::map<CavId, CommittedPlan> pending;
    if (respect_pending)
      for (CavId id : order)
        if (auto p = continued_plan(id, by_id.at(id)->obs)) pending.emplace(id, std::move(*p));

    for (CavId id : order) {
      const Candidate& c = *by_id.at(id);
      auto& v = vehicle(id);
      PlanRequest req{id, v.path_id, v.entry_time, c.obs, c.window, std::nullopt};
      std::vector<CommittedPlan> against = committed;
      if (respect_pending) {
        if (auto own = pending.find(id); own != pending.end()) {
          req.retained = own->second.trajectory;
          pending.erase(own);
        }
        for (const auto& [other, p] : pending) against.push_back(p);
      }
      CommittedPlan p;
      try {
        p = plan(req, against, ctx_);
      } catch (const InfeasibleError& e) {
        return Failure{id, e.what(), diagnose(req, against)};
      }
      const auto verdict =
          check_candidate(p.trajectory, v.path_id, against, cfg_.geometry, cfg_.safety);
      committed.push_back(p);
      commits.push_back({id, c.obs, c.window, c.job.weight, c.job.processing_time, p,
                         verdict.worst_margin});
    }
    return std::nullopt;
  }

  // The current plan carried on from an observation: the plan itself when
  // the observation is exact, otherwise the cubic to the same exit time from
  // the observed state (when that one is feasible).
  std::optional<CommittedPlan> continued_plan(CavId id, const Observation& obs) const {
    auto current = current_plan(id, obs.tau);
    if (!current) return std::nullopt;
    const auto truth = current->trajectory.eval(obs.tau);
    if (truth.p == obs.p_observed && truth.v == obs.v_observed) return current;
    const auto& v = log_.vehicles[static_cast<std::size_t>(id - 1)];
    if (!(obs.p_observed < v.path_length)) return current;
    auto moved = solve_cubic(obs.tau, obs.p_observed, obs.v_observed, current->exit_time,
                             v.path_length);
    if (!feasibility_check(moved, cfg_.limits)) return current;
    current->trajectory = std::move(moved);
    return current;
  }

  std::optional<CommittedPlan> current_plan(CavId id, double t) const {
    const auto& v = log_.vehicles[static_cast<std::size_t>(id - 1)];
    if (v.segments.empty()) return std::nullopt;
    const auto& seg = v.segments.back();
    if (t >= seg.t_end()) return std::nullopt;
    return CommittedPlan{id, v.path_id, t > seg.t_start() ? seg.restricted(t) : seg,
                         v.entry_time, seg.t_end()};
  }

  void replan_round(double tau, RoundTrigger trigger, const std::vector<CavId>& entered,
                    bool everyone) {
    ReplanRound round;
    round.tau = tau;
    round.trigger = trigger;

    std::vector<Candidate> candidates;
    for (CavId id : in_zone_) {
      auto& v = vehicle(id);
      const bool is_new = std::find(entered.begin(), entered.end(), id) != entered.end();
      const CubicTrajectory& current = v.segments.back();
      CommittedPlan existing{id, v.path_id, current, v.entry_time, current.t_end()};

      if (is_new) {
        candidates.push_back({id, {id, tau, 0.0, v.entry_speed}, v.entry_window, {}});
        continue;
      }
      bool hold = !everyone;
      Observation obs;
      if (!hold) {
        const double true_p = current.position(tau);
        obs = observe_state(existing, tau, cfg_.noise, v.path_length, cfg_.limits, noise_rng_);
        hold = v.path_length - true_p < cfg_.min_replan_distance ||
               v.path_length - obs.p_observed < cfg_.min_replan_distance;
      }
      if (hold) {
        if (tau < current.t_end()) {
          existing.trajectory = current.restricted(tau);
          round.held.push_back(existing);
        }
        continue;
      }
      ExitTimeWindow window;
      try {
        window = revise_window(
            v.entry_window,
            exit_time_window(tau, obs.p_observed, obs.v_observed, v.path_length, cfg_.limits));
      } catch (const InfeasibleError& e) {
        log_.rounds.push_back(round);
        abort_run(tau, id, e.what());
      }
      candidates.push_back({id, obs, window, {}});
    }

    for (auto& c : candidates) {
      const double weight =
          cfg_.weight_mode == WeightMode::inverse_window ? weight_from_window(c.window) : 1.0;
      double processing = c.window.lower;
      if (cfg_.processing_time == ProcessingTimeMode::residual)
        processing = std::max(c.window.lower - tau, kMinWindowWidth);
      c.job = {c.id, weight, processing};
    }

    // FCFS order and the per-path chains, physically leading vehicle first.
    std::vector<EntryRecord> entries;
    std::map<PathId, std::vector<const Candidate*>> by_path;
    for (const auto& c : candidates) {
      entries.push_back({c.id, vehicle(c.id).entry_time});
      by_path[vehicle(c.id).path_id].push_back(&c);
    }
    std::vector<TieBreak> ties;
    round.fcfs = fcfs_sequence(entries, tie_rng_, &ties);

    PrecedenceGraph graph;
    for (auto& [pid, members] : by_path) {
      std::stable_sort(members.begin(), members.end(), [&](const Candidate* a, const Candidate* b) {
        if (a->obs.p_observed != b->obs.p_observed) return a->obs.p_observed > b->obs.p_observed;
        return vehicle(a->id).entry_time < vehicle(b->id).entry_time;
      });
      Chain chain{pid, {}};
      for (const Candidate* c : members) chain.jobs.push_back(c->job);
      graph.chains.push_back(std::move(chain));
    }
    const JobTable jobs = job_table(graph);
    round.sequence = policy_ == SequencingPolicy::priority ? resequence(graph) : round.fcfs;
    round.j_chosen = weighted_completion(round.sequence, jobs);
    round.j_fcfs = weighted_completion(round.fcfs, jobs);

    nlohmann::json jties = nlohmann::json::array();
    for (const auto& tb : ties) jties.push_back({{"entry_time", tb.entry_time}, {"order", tb.order}});
    emit({{"type", "replan"},
          {"t", tau},
          {"trigger", trigger == RoundTrigger::timer ? "timer" : "arrival"},
          {"in_zone", in_zone_.size()},
          {"replanning", candidates.size()},
          {"held", round.held.size()}});
    emit({{"type", "sequence"},
          {"t", tau},
          {"policy", to_string(policy_)},
          {"order", round.sequence.order},
          {"fcfs_order", round.fcfs.order},
          {"j", round.j_chosen},
          {"j_fcfs", round.j_fcfs},
          {"ties", jties}});

    std::map<CavId, const Candidate*> by_id;
    for (const auto& c : candidates) by_id[c.id] = &c;

    std::vector<CommittedPlan> held = round.held;
    log_.rounds.push_back(std::move(round));
    ReplanRound& live = log_.rounds.back();

    std::vector<CommitRecord> commits;
    auto failure = plan_sequence(live.sequence.order, by_id, held, false, commits);
    if (failure) {
      emit({{"type", "fallback"}, {"t", tau}, {"cav", failure->cav}, {"reason", failure->why}});
      spdlog::debug("t={:.3f} sequential round failed at vehicle {}: {}", tau, failure->cav,
                    failure->why);
      live.fallback = true;
      commits.clear();
      if (auto again = plan_sequence(live.sequence.order, by_id, held, true, commits)) {
        live.commits = std::move(commits);
        abort_run(tau, again->cav, again->why,
                  {{"fallback", std::move(again->diagnosis)},
                   {"sequential", {{"cav", failure->cav},
                                   {"reason", failure->why},
                                   {"grid", std::move(failure->diagnosis)}}}});
      }
    }
    live.commits = std::move(commits);

    for (const auto& c : live.commits) {
      auto& v = vehicle(c.cav_id);
      const auto& p = c.plan;
      // The new plan replaces the provisional or previous one from tau on.
      if (!v.segments.empty() && v.segments.back().t_start() == tau) v.segments.pop_back();
      v.segments.push_back(p.trajectory);
      const int version = ++versions_[static_cast<std::size_t>(c.cav_id)];
      push({p.exit_time, EventKind::exit, 0, c.cav_id, version});

      emit({{"type", "commit"},
            {"t", tau},
            {"cav", c.cav_id},
            {"path", v.path_id},
            {"p_obs", c.observation.p_observed},
            {"v_obs", c.observation.v_observed},
            {"window", {c.window.lower, c.window.upper}},
            {"weight", c.weight},
            {"processing_time", c.processing_time},
            {"tf", p.exit_time},
            {"coefficients", {p.trajectory.a(), p.trajectory.b(), p.trajectory.c(),
                              p.trajectory.d()}},
            {"worst_margin", std::isfinite(c.worst_margin) ? nlohmann::json(c.worst_margin)
                                                           : nlohmann::json(nullptr)}});
    }
    spdlog::debug("t={:.3f} {} round: {} planned, {} held", tau, to_string(policy_),
                  live.commits.size(), live.held.size());
  }

  const ScenarioConfig& cfg_;
  SequencingPolicy policy_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 tie_rng_;
  PlannerContext ctx_;

  SimulationLog log_;
  std::vector<Arrival> arrivals_;
  std::vector<int> versions_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t next_seq_ = 0;
  std::vector<CavId> in_zone_;  // entry order
  std::map<PathId, CavId> last_on_path_;
  std::map<PathId, std::deque<CavId>> holding_;
  std::size_t entered_count_ = 0;
};

}  // namespace

SimulationLog run_policy(const ScenarioConfig& config, SequencingPolicy policy) {
  if (policy == SequencingPolicy::best_of_both)
    throw std::invalid_argument("run_policy simulates fcfs or priority only");
  config.validate();
  return Simulation(config, policy).run();
}

SimulationLog select_best_of_both(SimulationLog fcfs, SimulationLog priority) {
  const double base = metrics(fcfs).average_travel_time;
  const double alt = metrics(priority).average_travel_time;
  SimulationLog& chosen = alt < base ? priority : fcfs;
  chosen.config.policy = SequencingPolicy::best_of_both;
  return std::move(chosen);
}

SimulationLog run(const ScenarioConfig& config) {
  if (config.policy != SequencingPolicy::best_of_both) {
    SimulationLog log = run_policy(config, config.policy);
    return log;
  }
  return select_best_of_both(run_policy(config, SequencingPolicy::fcfs),
                             run_policy(config, SequencingPolicy::priority));
}

}  // namespace cavcoord
