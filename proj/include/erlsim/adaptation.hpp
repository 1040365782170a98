#pragma once

// Lifetime learning and evolutionary operators.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "erlsim/world_state.hpp"

namespace erl {

inline double td_reward(double e_t, double e_prev) noexcept { return e_t - e_prev; }

inline int sign_of(double r) noexcept { return (r > 0.0) - (r < 0.0); }

/// theta += alpha * sign(r) * grad ln pi(action | obs) over the action list.
/// Returns false when nothing was applied (r == 0 or a non-finite gradient).
inline bool sign_update_sddl(SddlGenome& genome, const Observation& obs, Action action, double r,
                             double alpha) {
  const int s = sign_of(r);
  if (s == 0) return false;
  const auto grad = logprob_grad(genome, obs, action);
  for (const auto& c : grad) {
    bool finite = true;
    for_each_param(c, [&](double v) { finite = finite && std::isfinite(v); });
    if (!finite) return false;
  }
  const double step = alpha * s;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    auto& dst = genome.action_clauses[k];
    const auto& g = grad[k];
    for (std::size_t i = 0; i < dst.gate_weights.size(); ++i) dst.gate_weights[i] += step * g.gate_weights[i];
    dst.threshold += step * g.threshold;
    for (std::size_t j = 0; j < dst.logits.size(); ++j) dst.logits[j] += step * g.logits[j];
  }
  return true;
}

/// Complementary reinforcement: on reward train each output unit toward the
/// bit it emitted, on punishment toward the complement (delta rule).
inline bool crbp_update_neural(NeuralGenome& genome, const Observation& obs, OutputBits bits,
                               double r, double alpha) {
  const int s = sign_of(r);
  if (s == 0) return false;
  const auto probs = nn_bit_probs(genome, obs);
  for (std::size_t j = 0; j < 2; ++j) {
    const double target = s > 0 ? bits[j] : 1 - bits[j];
    const double delta = alpha * (target - probs[j]);
    for (int i = 0; i < kObsDim; ++i) genome.action_weights[j][static_cast<std::size_t>(i)] += delta * obs[i];
  }
  return true;
}

/// Repeats the update until a fresh sample at `obs` reproduces the rewarded
/// action (r > 0) or departs from the punished one (r < 0), at most max_iters
/// times. max_iters == 0 means one update and no rehearsal. Returns the number
/// of updates applied.
inline int mental_rehearsal(SddlGenome& genome, const Observation& obs, Action action, double r,
                            double alpha, RngStream& rng, int max_iters) {
  if (sign_of(r) == 0) return 0;
  if (max_iters <= 0) return sign_update_sddl(genome, obs, action, r, alpha) ? 1 : 0;
  for (int i = 1; i <= max_iters; ++i) {
    if (!sign_update_sddl(genome, obs, action, r, alpha)) return i - 1;
    const Action again = sample_action(policy_dist(genome, obs), rng);
    if ((r > 0.0) == (again == action)) return i;
  }
  return max_iters;
}

inline int mental_rehearsal(NeuralGenome& genome, const Observation& obs, OutputBits bits, double r,
                            double alpha, RngStream& rng, int max_iters) {
  if (sign_of(r) == 0) return 0;
  if (max_iters <= 0) return crbp_update_neural(genome, obs, bits, r, alpha) ? 1 : 0;
  for (int i = 1; i <= max_iters; ++i) {
    crbp_update_neural(genome, obs, bits, r, alpha);
    const auto again = nn_act(genome, obs, rng).bits;
    if ((r > 0.0) == (again == bits)) return i;
  }
  return max_iters;
}

/// Each parameter is perturbed by N(0, sigma^2) with probability `rate`.
/// One uniform is drawn per parameter whether or not it mutates.
template <class G>
G mutate(const G& parent, double rate, double sigma, RngStream& rng) {
  G child = parent;
  if constexpr (!std::is_same_v<G, BrownianGenome>) {
    for_each_param(child, [&](double& w) {
      if (rng.uniform() < rate) w += sigma * rng.gaussian();
    });
  }
  return child;
}

inline Genome mutate(const Genome& parent, double rate, double sigma, RngStream& rng) {
  return std::visit([&](const auto& g) -> Genome { return mutate(g, rate, sigma, rng); }, parent);
}

struct Birth {
  Genome genome;
  Pos cell;
  double parent_debit = 0.0;
  double child_energy = 0.0;
};

using InheritFn = std::function<Genome(const AgentState& parent, RngStream& rng)>;

/// Energy-gated asexual reproduction. The parent must be out of a tree, hold
/// at least the threshold energy, and have an empty neighbour; the child lands
/// on a uniformly chosen one of `free_cells` carrying the reproduction cost as
/// its energy.
inline std::optional<Birth> maybe_reproduce(const AgentState& parent, const SimConfig& cfg,
                                            RngStream& rng, std::span<const Pos> free_cells,
                                            const InheritFn& inherit) {
  if (!parent.alive || parent.in_tree || free_cells.empty()) return std::nullopt;
  if (parent.energy < cfg.reproduce_energy_threshold) return std::nullopt;
  Birth b;
  b.cell = free_cells[rng.below(free_cells.size())];
  b.genome = inherit(parent, rng);
  b.parent_debit = cfg.reproduce_cost;
  b.child_energy = std::min(cfg.reproduce_cost, cfg.max_energy);
  return b;
}

// ---------------------------------------------------------------------------
// Strategies

enum class PolicyClass : std::uint8_t { Neural, Sddl, Brownian };

struct StrategySpec {
  PolicyClass policy = PolicyClass::Brownian;
  bool learning = false;
  bool evolution = false;

  friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

struct NamedStrategy {
  std::string_view name;
  StrategySpec spec;
};

inline constexpr NamedStrategy kStrategies[] = {
    {"NERL", {PolicyClass::Neural, true, true}},  {"NE", {PolicyClass::Neural, false, true}},
    {"NL", {PolicyClass::Neural, true, false}},   {"NF", {PolicyClass::Neural, false, false}},
    {"PERL", {PolicyClass::Sddl, true, true}},    {"PE", {PolicyClass::Sddl, false, true}},
    {"PL", {PolicyClass::Sddl, true, false}},     {"B", {PolicyClass::Brownian, false, false}},
};

inline bool is_legal(const StrategySpec& s) noexcept {
  return s.policy != PolicyClass::Brownian || (!s.learning && !s.evolution);
}

inline StrategySpec parse_strategy(std::string_view name) {
  for (const auto& s : kStrategies) {
    if (s.name == name) return s.spec;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

inline std::string_view strategy_name(const StrategySpec& spec) {
  for (const auto& s : kStrategies) {
    if (s.spec == spec) return s.name;
  }
  throw ConfigError("illegal strategy combination");
}

struct Decision {
  Action action = Action::North;
  OutputBits bits{};
};

struct StrategyWiring {
  std::function<Decision(const Genome&, const Observation&, RngStream&)> act;
  /// Scalar evaluation e_t in (0,1); Brownian agents report 0.5.
  std::function<double(const Genome&, const Observation&)> evaluate;
  /// Updates the genome from the previous decision and reward; returns the
  /// number of updates applied.
  std::function<int(Genome&, const LearnerState&, double r, RngStream&)> learn;
  InheritFn inherit;
  std::function<Genome(RngStream&)> fresh_genome;
};

inline StrategyWiring strategy_wiring(const StrategySpec& spec, const SimConfig& cfg) {
  if (!is_legal(spec)) throw ConfigError("illegal strategy combination");
  StrategyWiring w;
  const double range = cfg.init_weight_range;
  const int K = cfg.sddl_clauses;
  const double alpha = cfg.learning_rate;
  const int iters = cfg.rehearsal_max_iters;

  switch (spec.policy) {
    case PolicyClass::Brownian:
      w.fresh_genome = [](RngStream&) -> Genome { return BrownianGenome{}; };
      w.act = [](const Genome&, const Observation&, RngStream& rng) {
        const auto a = kActions[rng.below(kNumActions)];
        return Decision{a, encode_action(a)};
      };
      w.evaluate = [](const Genome&, const Observation&) { return 0.5; };
      break;
    case PolicyClass::Neural:
      w.fresh_genome = [range](RngStream& rng) -> Genome { return nn_random(rng, range); };
      w.act = [](const Genome& g, const Observation& obs, RngStream& rng) {
        const auto d = nn_act(std::get<NeuralGenome>(g), obs, rng);
        return Decision{d.action, d.bits};
      };
      w.evaluate = [](const Genome& g, const Observation& obs) {
        return nn_evaluate(std::get<NeuralGenome>(g), obs);
      };
      if (spec.learning) {
        w.learn = [alpha, iters](Genome& g, const LearnerState& prev, double r, RngStream& rng) {
          return mental_rehearsal(std::get<NeuralGenome>(g), prev.prev_obs, prev.prev_bits, r, alpha,
                                  rng, iters);
        };
      }
      break;
    case PolicyClass::Sddl:
      w.fresh_genome = [K, range](RngStream& rng) -> Genome { return sddl_random(K, rng, range); };
      w.act = [](const Genome& g, const Observation& obs, RngStream& rng) {
        const auto a = sample_action(policy_dist(std::get<SddlGenome>(g), obs), rng);
        return Decision{a, encode_action(a)};
      };
      w.evaluate = [](const Genome& g, const Observation& obs) {
        return evaluate(std::get<SddlGenome>(g), obs);
      };
      if (spec.learning) {
        w.learn = [alpha, iters](Genome& g, const LearnerState& prev, double r, RngStream& rng) {
          return mental_rehearsal(std::get<SddlGenome>(g), prev.prev_obs, prev.prev_action, r, alpha,
                                  rng, iters);
        };
      }
      break;
  }
  if (!w.learn) {
    w.learn = [](Genome&, const LearnerState&, double, RngStream&) { return 0; };
  }

  if (spec.evolution) {
    const double rate = cfg.mutation_rate;
    const double sigma = cfg.mutation_sigma;
    w.inherit = [rate, sigma](const AgentState& parent, RngStream& rng) {
      return mutate(parent.birth_genome, rate, sigma, rng);
    };
  } else {
    w.inherit = [fresh = w.fresh_genome](const AgentState&, RngStream& rng) { return fresh(rng); };
  }
  return w;
}

}  // namespace erl
