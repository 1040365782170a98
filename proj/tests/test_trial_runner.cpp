#include <gtest/gtest.h>

#include <sstream>

#include "erlsim/trial_runner.hpp"
#include "support.hpp"

using namespace erl;
using erl::testing::quiet_config;

namespace {

// One Brownian agent in an empty walled room that cannot eat, breed or be hurt.
SimConfig starvation_config() {
  auto cfg = quiet_config(20);
  cfg.initial_agent_count = 1;
  cfg.damage_wall = 0.0;
  cfg.reproduce_energy_threshold = cfg.max_energy + 1.0;
  return cfg;
}

SimConfig small_world() {
  SimConfig cfg;
  cfg.world_width = 40;
  cfg.world_height = 40;
  cfg.initial_agent_count = 10;
  cfg.initial_plant_count = 40;
  cfg.internal_wall_count = 20;
  cfg.initial_tree_count = 8;
  cfg.max_steps = 400;
  return cfg;
}

}  // namespace

TEST(RunTrial, StarvationClock) {
  const auto rec = run_trial(parse_strategy("B"), 0, 0, starvation_config());
  EXPECT_EQ(rec.duration, 334);
  EXPECT_FALSE(rec.censored);
  EXPECT_EQ(rec.deaths, 1);
  EXPECT_EQ(rec.births, 0);
  EXPECT_EQ(rec.peak_population, 1);
}

TEST(RunTrial, EmptyWorldEndsAfterOneStep) {
  auto cfg = quiet_config();
  const auto rec = run_trial(parse_strategy("NF"), 3, 0, cfg);
  EXPECT_EQ(rec.duration, 1);
  EXPECT_FALSE(rec.censored);
  EXPECT_EQ(rec.peak_population, 0);
}

TEST(RunTrial, CensoredAtHorizon) {
  auto cfg = starvation_config();
  cfg.max_steps = 100;
  const auto rec = run_trial(parse_strategy("B"), 0, 0, cfg);
  EXPECT_EQ(rec.duration, 100);
  EXPECT_TRUE(rec.censored);
  EXPECT_EQ(rec.deaths, 0);
}

TEST(RunTrial, Deterministic) {
  const SimConfig cfg = small_world();
  for (const char* name : {"PERL", "NERL", "B"}) {
    const auto a = run_trial(parse_strategy(name), 17, 0, cfg);
    const auto b = run_trial(parse_strategy(name), 17, 0, cfg);
    EXPECT_EQ(a, b) << name;
    EXPECT_EQ(a.seed, 17u);
    EXPECT_EQ(a.strategy, name);
  }
}

TEST(RunTrial, SeedOffsetShiftsTheSeed) {
  const SimConfig cfg = small_world();
  const auto a = run_trial(parse_strategy("PL"), 5, 10, cfg);
  const auto b = run_trial(parse_strategy("PL"), 15, 0, cfg);
  EXPECT_EQ(a.seed, 15u);
  EXPECT_EQ(a.duration, b.duration);
  EXPECT_EQ(a.births, b.births);
}

TEST(RunTrial, PopulationAccounting) {
  const SimConfig cfg = small_world();
  for (std::int64_t i = 0; i < 6; ++i) {
    for (const char* name : {"NERL", "PE", "B"}) {
      const auto rec = run_trial(parse_strategy(name), i, 0, cfg);
      EXPECT_GE(rec.peak_population, cfg.initial_agent_count);
      if (!rec.censored) {
        // everyone who ever lived has died
        EXPECT_EQ(rec.deaths, rec.births + cfg.initial_agent_count) << name << " " << i;
        EXPECT_LT(rec.duration, cfg.max_steps);
      } else {
        EXPECT_LT(rec.deaths, rec.births + cfg.initial_agent_count);
      }
    }
  }
}

TEST(RunTrial, EventLogMatchesRecord) {
  const SimConfig cfg = small_world();
  std::int64_t births = 0, deaths = 0, last_t = 0;
  bool ordered = true;
  std::ostringstream log;
  const auto rec = run_trial(parse_strategy("NL"), 2, 0, cfg, [&](const Event& e) {
    births += e.kind == EventKind::Birth;
    deaths += e.kind == EventKind::Death;
    ordered = ordered && e.t >= last_t;
    last_t = e.t;
    write_event(log, e);
  });
  EXPECT_EQ(births, rec.births);
  EXPECT_EQ(deaths, rec.deaths);
  EXPECT_TRUE(ordered);
  EXPECT_LT(last_t, rec.duration);
  EXPECT_NE(log.str().find(",death,"), std::string::npos);
}

TEST(WriteEvent, Format) {
  std::ostringstream out;
  write_event(out, {12, EventKind::Attack, 4, {3, 7}, "carnivore", 2});
  write_event(out, {13, EventKind::EnterTree, 5, {1, 1}, "", kNoEntity});
  write_event(out, {14, EventKind::Birth, 9, {2, 2}, "", 5});
  EXPECT_EQ(out.str(), "12,attack,4,3,7,carnivore:2\n13,enter_tree,5,1,1,\n14,birth,9,2,2,5\n");
}

TEST(RunTrial, StrategiesShareInitialWorlds) {
  // Trial i of every strategy starts from the same layout.
  const SimConfig cfg = small_world();
  const auto seed = derive_trial_seed(4, 0);
  auto a = make_stream(seed, "world-init");
  auto b = make_stream(seed, "world-init");
  EXPECT_EQ(init_world(cfg, a).cells, init_world(cfg, b).cells);
  const auto nerl = run_trial(parse_strategy("NERL"), 4, 0, cfg);
  const auto b_rec = run_trial(parse_strategy("B"), 4, 0, cfg);
  EXPECT_EQ(nerl.seed, b_rec.seed);
}

TEST(RunTrial, LearningChangesOutcomes) {
  // Same seeds, with and without lifetime learning: the trajectories diverge.
  const SimConfig cfg = small_world();
  int differ = 0;
  for (std::int64_t i = 0; i < 5; ++i) {
    const auto nl = run_trial(parse_strategy("NL"), i, 0, cfg);
    const auto nf = run_trial(parse_strategy("NF"), i, 0, cfg);
    differ += nl.duration != nf.duration || nl.births != nf.births;
  }
  EXPECT_GT(differ, 0);
}

TEST(RunBatch, OrderAndParallelismInvariance) {
  const SimConfig cfg = small_world();
  const std::vector<StrategySpec> specs = {parse_strategy("NERL"), parse_strategy("PERL"), parse_strategy("B")};
  const auto serial = run_batch(specs, 4, 7, cfg, 1);
  std::size_t calls = 0;
  const auto parallel = run_batch(specs, 4, 7, cfg, 8, [&](std::size_t done, std::size_t total, const TrialRecord&) {
    ++calls;
    EXPECT_LE(done, total);
  });
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(calls, 12u);
  ASSERT_EQ(serial.size(), 12u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].strategy, strategy_name(specs[i / 4]));
    EXPECT_EQ(serial[i].trial_index, static_cast<std::int64_t>(i % 4));
    EXPECT_EQ(serial[i], run_trial(specs[i / 4], serial[i].trial_index, 7, cfg));
  }
}

TEST(RunBatch, Errors) {
  const SimConfig cfg = small_world();
  EXPECT_THROW(run_batch({parse_strategy("B")}, 0, 0, cfg), ConfigError);
  EXPECT_THROW(run_batch({StrategySpec{PolicyClass::Brownian, true, false}}, 1, 0, cfg), ConfigError);
  auto crowded = cfg;
  crowded.initial_plant_count = 5000;
  try {
    run_batch({parse_strategy("NF")}, 2, 0, crowded, 2);
    FAIL() << "expected BatchError";
  } catch (const BatchError& e) {
    EXPECT_EQ(e.strategy(), "NF");
    EXPECT_EQ(e.trial_index(), 0);
  }
}
