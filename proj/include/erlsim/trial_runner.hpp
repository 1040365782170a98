#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "erlsim/perception.hpp"
#include "erlsim/world.hpp"

namespace erl {

struct TrialRecord {
  std::string strategy;
  std::int64_t trial_index = 0;
  std::uint64_t seed = 0;
  std::int64_t duration = 0;
  bool censored = false;
  std::int64_t peak_population = 0;
  std::int64_t births = 0;
  std::int64_t deaths = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Receives every event of a trial, in order; used for replay logs.
using EventSink = std::function<void(const Event&)>;

/// `t,event_kind,entity_id,x,y,detail` per line.
inline void write_event(std::ostream& out, const Event& e) {
  out << e.t << ',' << event_kind_name(e.kind) << ',' << e.entity << ',' << e.pos.x << ',' << e.pos.y << ',';
  out << e.detail;
  if (e.other != kNoEntity) out << (e.detail.empty() ? "" : ":") << e.other;
  out << '\n';
}

/// Per-agent decision bookkeeping for one step: evaluate the new observation,
/// learn from the previous decision's temporal difference, then act.
inline void decide(AgentState& agent, const Observation& obs, const StrategyWiring& wiring, bool learning,
                   RngStream& policy_rng) {
  const double e_t = wiring.evaluate(agent.genome, obs);
  if (learning && agent.learner.has_prev) {
    const double r = td_reward(e_t, agent.learner.prev_eval);
    wiring.learn(agent.genome, agent.learner, r, policy_rng);
  }
  const Decision d = wiring.act(agent.genome, obs, policy_rng);
  agent.learner.has_prev = true;
  agent.learner.prev_obs = obs;
  agent.learner.prev_eval = e_t;
  agent.learner.prev_action = d.action;
  agent.learner.prev_bits = d.bits;
}

/// Runs one seeded trial until extinction (duration = first step with no
/// living agents) or until max_steps (censored).
inline TrialRecord run_trial(const StrategySpec& spec, std::int64_t trial_index, std::int64_t seed_offset,
                             const SimConfig& cfg, const EventSink& sink = {}) {
  require_valid(cfg);
  TrialRecord rec;
  rec.strategy = std::string(strategy_name(spec));
  rec.trial_index = trial_index;
  rec.seed = derive_trial_seed(trial_index, seed_offset);

  auto init_rng = make_stream(rec.seed, "world-init");
  WorldState world = init_world(cfg, init_rng);
  TrialStreams streams = TrialStreams::for_seed(rec.seed);
  const StrategyWiring wiring = strategy_wiring(spec, cfg);

  for (auto& a : world.agents) {
    a.birth_genome = wiring.fresh_genome(streams.mutation);
    a.genome = a.birth_genome;
  }
  rec.peak_population = static_cast<std::int64_t>(world.agents.size());

  std::vector<AgentAction> actions;
  for (;;) {
    actions.clear();
    for (auto& a : world.agents) {
      decide(a, observe(world, a), wiring, spec.learning, streams.policy);
      actions.push_back({a.id, a.learner.prev_action});
    }
    const StepEvents ev = step_world(world, actions, streams, wiring.inherit);
    rec.births += ev.births;
    rec.deaths += ev.deaths;
    rec.peak_population = std::max(rec.peak_population, static_cast<std::int64_t>(world.agents.size()));
    if (sink) {
      for (const auto& e : ev.events) sink(e);
    }
    if (world.agents.empty()) {
      rec.duration = world.t;
      rec.censored = false;
      break;
    }
    if (world.t >= cfg.max_steps) {
      rec.duration = cfg.max_steps;
      rec.censored = true;
      break;
    }
  }
  return rec;
}

class BatchError : public std::runtime_error {
 public:
  BatchError(std::string strategy, std::int64_t trial_index, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial_index) + " of " + strategy + " failed: " + what),
        strategy_(std::move(strategy)),
        trial_index_(trial_index) {}

  const std::string& strategy() const noexcept { return strategy_; }
  std::int64_t trial_index() const noexcept { return trial_index_; }

 private:
  std::string strategy_;
  std::int64_t trial_index_;
};

/// Called after each finished trial with (done, total); may run on any worker.
using ProgressFn = std::function<void(std::size_t done, std::size_t total, const TrialRecord&)>;

/// Every strategy runs trial indices [0, n_trials) on shared seeds. Records are
/// returned in (strategy, trial_index) order whatever the parallelism.
inline std::vector<TrialRecord> run_batch(const std::vector<StrategySpec>& specs, std::int64_t n_trials,
                                          std::int64_t seed_offset, const SimConfig& cfg, int parallelism = 1,
                                          const ProgressFn& progress = {}) {
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  require_valid(cfg);
  for (const auto& s : specs) {
    if (!is_legal(s)) throw ConfigError("illegal strategy combination");
  }

  const std::size_t total = specs.size() * static_cast<std::size_t>(n_trials);
  std::vector<std::optional<TrialRecord>> slots(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total || failed.load()) return;
      const auto& spec = specs[job / static_cast<std::size_t>(n_trials)];
      const auto trial = static_cast<std::int64_t>(job % static_cast<std::size_t>(n_trials));
      try {
        slots[job] = run_trial(spec, trial, seed_offset, cfg);
      } catch (...) {
        errors[job] = std::current_exception();
        failed.store(true);
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total, *slots[job]);
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(parallelism, static_cast<int>(total)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  for (std::size_t job = 0; job < total; ++job) {
    if (!errors[job]) continue;
    const std::string name(strategy_name(specs[job / static_cast<std::size_t>(n_trials)]));
    const auto trial = static_cast<std::int64_t>(job % static_cast<std::size_t>(n_trials));
    try {
      std::rethrow_exception(errors[job]);
    } catch (const std::exception& e) {
      throw BatchError(name, trial, e.what());
    }
  }

  std::vector<TrialRecord> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace erl
