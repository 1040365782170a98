#include <gtest/gtest.h>

#include "erlsim/adaptation.hpp"
#include "support.hpp"

using namespace erl;
using erl::testing::random_obs;

namespace {

double prob_of(const SddlGenome& g, const Observation& o, Action a) {
  return policy_dist(g, o)[static_cast<std::size_t>(a)];
}

std::vector<double> params_of(const Genome& genome) {
  std::vector<double> out;
  std::visit(
      [&](const auto& g) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(g)>, BrownianGenome>) {
          for_each_param(g, [&](double v) { out.push_back(v); });
        }
      },
      genome);
  return out;
}

std::size_t changed_params(const Genome& a, const Genome& b) {
  const auto x = params_of(a), y = params_of(b);
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) n += x[i] != y[i];
  return n;
}

AgentState agent_with(double energy, Genome g) {
  AgentState a;
  a.energy = energy;
  a.birth_genome = g;
  a.genome = std::move(g);
  return a;
}

}  // namespace

TEST(TdReward, DifferenceOfEvaluations) {
  EXPECT_NEAR(td_reward(0.7, 0.4), 0.3, 1e-15);
  EXPECT_NEAR(td_reward(0.2, 0.5), -0.3, 1e-15);
  EXPECT_EQ(td_reward(0.5, 0.5), 0.0);
}

TEST(SignUpdate, MovesProbabilityInTheSignDirection) {
  RngStream rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const auto g = sddl_random(2, rng);
    const auto obs = random_obs(rng);
    const Action a = kActions[rng.below(4)];
    auto up = g, down = g;
    ASSERT_TRUE(sign_update_sddl(up, obs, a, 0.3, 0.05));
    ASSERT_TRUE(sign_update_sddl(down, obs, a, -0.3, 0.05));
    EXPECT_GT(prob_of(up, obs, a), prob_of(g, obs, a));
    EXPECT_LT(prob_of(down, obs, a), prob_of(g, obs, a));
  }
}

TEST(SignUpdate, StepIgnoresRewardMagnitude) {
  RngStream rng(2);
  const auto g = sddl_random(2, rng);
  const auto obs = random_obs(rng);
  auto small = g, large = g;
  sign_update_sddl(small, obs, Action::East, 1e-6, 0.05);
  sign_update_sddl(large, obs, Action::East, 40.0, 0.05);
  EXPECT_EQ(small, large);
  auto same = g;
  EXPECT_FALSE(sign_update_sddl(same, obs, Action::East, 0.0, 0.05));
  EXPECT_EQ(same, g);
}

TEST(SignUpdate, EvaluationListIsFixed) {
  RngStream rng(3);
  auto g = sddl_random(3, rng);
  g.eval_bias = 0.4;
  const auto eval_before = g.eval_clauses;
  for (int i = 0; i < 100; ++i) sign_update_sddl(g, random_obs(rng), kActions[rng.below(4)], rng.uniform(-1, 1), 0.05);
  EXPECT_EQ(g.eval_clauses, eval_before);
  EXPECT_EQ(g.eval_bias, 0.4);
}

TEST(Crbp, DeltaRuleArithmetic) {
  NeuralGenome g;
  Observation obs;
  obs[kBiasIdx] = 1.0;
  obs[kEnergyIdx] = 0.5;
  auto rewarded = g;
  ASSERT_TRUE(crbp_update_neural(rewarded, obs, {1, 0}, 0.2, 0.05));
  EXPECT_NEAR(rewarded.action_weights[0][kBiasIdx], 0.025, 1e-15);
  EXPECT_NEAR(rewarded.action_weights[0][kEnergyIdx], 0.0125, 1e-15);
  EXPECT_NEAR(rewarded.action_weights[1][kBiasIdx], -0.025, 1e-15);
  EXPECT_EQ(rewarded.action_weights[0][0], 0.0);

  auto punished = g;
  crbp_update_neural(punished, obs, {1, 0}, -0.2, 0.05);
  EXPECT_NEAR(punished.action_weights[0][kBiasIdx], -0.025, 1e-15);
  EXPECT_NEAR(punished.action_weights[1][kBiasIdx], 0.025, 1e-15);

  auto none = g;
  EXPECT_FALSE(crbp_update_neural(none, obs, {1, 0}, 0.0, 0.05));
  EXPECT_EQ(none, g);
}

TEST(Crbp, EvaluationWeightsAreFixed) {
  RngStream rng(4);
  auto g = nn_random(rng);
  const auto eval_before = g.eval_weights;
  for (int i = 0; i < 100; ++i) {
    const OutputBits bits = encode_action(kActions[rng.below(4)]);
    crbp_update_neural(g, random_obs(rng), bits, rng.uniform(-1, 1), 0.05);
  }
  EXPECT_EQ(g.eval_weights, eval_before);
}

TEST(Rehearsal, ZeroItersMeansOneUpdate) {
  RngStream rng(5);
  const auto g = sddl_random(2, rng);
  const auto obs = random_obs(rng);
  auto once = g, direct = g;
  EXPECT_EQ(mental_rehearsal(once, obs, Action::West, 0.1, 0.05, rng, 0), 1);
  sign_update_sddl(direct, obs, Action::West, 0.1, 0.05);
  EXPECT_EQ(once, direct);
  EXPECT_EQ(mental_rehearsal(once, obs, Action::West, 0.0, 0.05, rng, 20), 0);
}

TEST(Rehearsal, CappedAtMaxIters) {
  // The rewarded action is all but impossible and the step is negligible,
  // so the resample never reproduces it.
  SddlGenome g;
  g.action_clauses.resize(1);
  g.eval_clauses.resize(1);
  g.action_clauses[0].logits = {0, 30, 30, 30};
  Observation obs;
  obs[kBiasIdx] = 1.0;
  RngStream rng(6);
  EXPECT_EQ(mental_rehearsal(g, obs, Action::North, 0.5, 1e-9, rng, 20), 20);
  EXPECT_EQ(mental_rehearsal(g, obs, Action::North, 0.5, 1e-9, rng, 3), 3);

  NeuralGenome n;
  n.action_weights[0][kBiasIdx] = -40.0;
  n.action_weights[1][kBiasIdx] = -40.0;
  EXPECT_EQ(mental_rehearsal(n, obs, OutputBits{1, 1}, 0.5, 1e-12, rng, 20), 20);
}

TEST(Rehearsal, StopsAsSoonAsTheSampleAgrees) {
  // A certain action is reproduced on the first resample.
  SddlGenome g;
  g.action_clauses.resize(1);
  g.eval_clauses.resize(1);
  g.action_clauses[0].logits = {50, 0, 0, 0};
  Observation obs;
  obs[kBiasIdx] = 1.0;
  RngStream rng(7);
  EXPECT_EQ(mental_rehearsal(g, obs, Action::North, 0.5, 0.05, rng, 20), 1);
  // Punishing an impossible action stops at once too.
  EXPECT_EQ(mental_rehearsal(g, obs, Action::South, -0.5, 0.05, rng, 20), 1);
}

TEST(Mutation, ExpectedNumberOfPerturbedParameters) {
  // 119 neural genomes hold 9996 parameters; at rate 0.05 about 500 change.
  RngStream rng(8);
  std::size_t changed = 0;
  for (int i = 0; i < 119; ++i) {
    const Genome g = nn_random(rng);
    changed += changed_params(g, mutate(g, 0.05, 0.1, rng));
  }
  EXPECT_NEAR(static_cast<double>(changed), 500.0, 70.0);
}

TEST(Mutation, PerturbationScale) {
  RngStream rng(9);
  const NeuralGenome zero;
  double s2 = 0;
  std::size_t n = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto m = mutate(zero, 1.0, 0.1, rng);
    for_each_param(m, [&](double v) {
      s2 += v * v;
      ++n;
    });
  }
  EXPECT_NEAR(std::sqrt(s2 / n), 0.1, 0.002);
}

TEST(Mutation, ZeroRateOrSigmaIsIdentity) {
  RngStream rng(10);
  const Genome g = sddl_random(2, rng);
  EXPECT_EQ(mutate(g, 0.0, 0.1, rng), g);
  EXPECT_EQ(mutate(g, 1.0, 0.0, rng), g);
  EXPECT_EQ(mutate(Genome{BrownianGenome{}}, 1.0, 1.0, rng), Genome{BrownianGenome{}});
}

TEST(Reproduction, EnergyThreshold) {
  const SimConfig cfg;
  RngStream rng(11);
  const Pos cells[] = {{3, 4}};
  auto parent = agent_with(60.0, BrownianGenome{});
  const auto b = maybe_reproduce(parent, cfg, rng, cells, copy_parent_genome());
  ASSERT_TRUE(b);
  EXPECT_EQ(b->parent_debit, 50.0);
  EXPECT_EQ(b->child_energy, 50.0);
  EXPECT_EQ(b->cell, (Pos{3, 4}));
  EXPECT_EQ(parent.energy - b->parent_debit, 10.0);

  parent.energy = 59.9;
  EXPECT_FALSE(maybe_reproduce(parent, cfg, rng, cells, copy_parent_genome()));
  parent.energy = 100.0;
  EXPECT_FALSE(maybe_reproduce(parent, cfg, rng, {}, copy_parent_genome()));
  parent.in_tree = true;
  EXPECT_FALSE(maybe_reproduce(parent, cfg, rng, cells, copy_parent_genome()));
}

TEST(Reproduction, ChildCellIsUniform) {
  const SimConfig cfg;
  RngStream rng(12);
  const Pos cells[] = {{1, 0}, {0, 1}, {2, 1}};
  const auto parent = agent_with(100.0, BrownianGenome{});
  std::array<int, 3> hist{};
  constexpr int n = 30'000;
  for (int i = 0; i < n; ++i) {
    const auto b = maybe_reproduce(parent, cfg, rng, cells, copy_parent_genome());
    for (int k = 0; k < 3; ++k) hist[k] += b->cell == cells[k];
  }
  for (int h : hist) EXPECT_NEAR(h / double(n), 1.0 / 3, 0.015);
}

TEST(Strategies, NamesRoundTrip) {
  for (const auto& s : kStrategies) {
    EXPECT_EQ(strategy_name(parse_strategy(s.name)), s.name);
    EXPECT_TRUE(is_legal(s.spec));
  }
  EXPECT_EQ(parse_strategy("PERL"), (StrategySpec{PolicyClass::Sddl, true, true}));
  EXPECT_THROW(parse_strategy("perl"), ConfigError);
  EXPECT_THROW(parse_strategy("BE"), ConfigError);
  EXPECT_FALSE(is_legal({PolicyClass::Brownian, true, false}));
  EXPECT_THROW(strategy_wiring({PolicyClass::Brownian, false, true}, SimConfig{}), ConfigError);
}

TEST(Strategies, BrownianActionsAreUniform) {
  const auto w = strategy_wiring(parse_strategy("B"), SimConfig{});
  RngStream rng(13);
  const Observation obs;
  std::array<int, 4> hist{};
  constexpr int n = 100'000;
  for (int i = 0; i < n; ++i) ++hist[static_cast<int>(w.act(BrownianGenome{}, obs, rng).action)];
  for (int h : hist) EXPECT_NEAR(h / double(n), 0.25, 0.01);
  EXPECT_EQ(w.evaluate(BrownianGenome{}, obs), 0.5);
}

TEST(Strategies, LearningFlagControlsUpdates) {
  SimConfig cfg;
  RngStream rng(14);
  for (const char* name : {"NF", "NE", "PE"}) {
    const auto w = strategy_wiring(parse_strategy(name), cfg);
    Genome g = w.fresh_genome(rng);
    const Genome before = g;
    LearnerState prev;
    prev.has_prev = true;
    prev.prev_obs = random_obs(rng);
    EXPECT_EQ(w.learn(g, prev, 0.4, rng), 0) << name;
    EXPECT_EQ(g, before) << name;
  }
  for (const char* name : {"NL", "PL", "NERL", "PERL"}) {
    const auto w = strategy_wiring(parse_strategy(name), cfg);
    Genome g = w.fresh_genome(rng);
    const Genome before = g;
    LearnerState prev;
    prev.has_prev = true;
    prev.prev_obs = random_obs(rng);
    EXPECT_GE(w.learn(g, prev, 0.4, rng), 1) << name;
    EXPECT_NE(g, before) << name;
  }
}

TEST(Strategies, OffspringInheritBirthParametersNotLearnedOnes) {
  SimConfig cfg;
  cfg.mutation_rate = 0.0;
  RngStream rng(15);
  const auto w = strategy_wiring(parse_strategy("PERL"), cfg);
  auto parent = agent_with(100.0, w.fresh_genome(rng));
  std::get<SddlGenome>(parent.genome).action_clauses[0].logits[0] += 3.0;
  EXPECT_EQ(w.inherit(parent, rng), parent.birth_genome);

  const auto fresh = strategy_wiring(parse_strategy("PL"), cfg);
  const Genome child = fresh.inherit(parent, rng);
  EXPECT_NE(child, parent.birth_genome);
  EXPECT_EQ(std::get<SddlGenome>(child).action_clauses.size(), 2u);
}
