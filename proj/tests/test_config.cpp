#include <gtest/gtest.h>

#include <sstream>

#include "erlsim/config.hpp"

using namespace erl;

TEST(Config, DefaultsMatchParameterTable) {
  const SimConfig c;
  EXPECT_EQ(c.world_width, 100);
  EXPECT_EQ(c.world_height, 100);
  EXPECT_EQ(c.max_energy, 100.0);
  EXPECT_EQ(c.max_health, 1.0);
  EXPECT_EQ(c.energy_cost_move, 0.3);
  EXPECT_EQ(c.energy_gain_plant, 100.0);
  EXPECT_EQ(c.energy_gain_meat, 50.0);
  EXPECT_EQ(c.damage_carnivore, 0.1);
  EXPECT_EQ(c.damage_wall, 0.1);
  EXPECT_EQ(c.corpse_decay_rate, 0.3);
  EXPECT_EQ(c.reproduce_energy_threshold, 60.0);
  EXPECT_EQ(c.reproduce_cost, 50.0);
  EXPECT_EQ(c.plant_growth_prob, 0.005);
  EXPECT_EQ(c.plant_max_density_neighbors, 4);
  EXPECT_EQ(c.tree_birth_prob, 0.001);
  EXPECT_EQ(c.tree_death_prob, 0.001);
  EXPECT_EQ(c.carnivore_spawn_freq, 200);
  EXPECT_EQ(c.agent_view_dist, 4);
  EXPECT_EQ(c.carnivore_view_dist, 6);
  EXPECT_EQ(c.learning_rate, 0.05);
  EXPECT_EQ(c.mutation_rate, 0.05);
  EXPECT_EQ(c.sddl_clauses, 2);
  EXPECT_EQ(c.max_steps, 2000);
  EXPECT_EQ(c.rehearsal_max_iters, 20);
  EXPECT_TRUE(validate_config(c).empty());
}

TEST(Config, ValidationMessages) {
  SimConfig c;
  c.plant_growth_prob = 1.5;
  EXPECT_EQ(validate_config(c), std::vector<std::string>{"plant_growth_prob not in [0,1]"});
  c = {};
  c.agent_view_dist = 0;
  EXPECT_EQ(validate_config(c), std::vector<std::string>{"agent_view_dist < 1"});
  c = {};
  c.sddl_clauses = 0;
  c.max_steps = 0;
  c.damage_wall = -1;
  EXPECT_EQ(validate_config(c).size(), 3u);
  EXPECT_THROW(require_valid(c), ConfigError);
}

TEST(Config, RoundTripsThroughTextFormat) {
  SimConfig c;
  c.energy_cost_move = 0.1 + 0.2;  // not exactly representable in short decimal
  c.plant_growth_prob = 1.0 / 3.0;
  c.initial_agent_count = 7;
  c.damage_agent_collision = 0.1;
  std::stringstream ss;
  write_config(ss, c);
  EXPECT_EQ(parse_config(ss), c);
}

TEST(Config, ParsesCommentsAndOverridesOnly) {
  std::istringstream in("# sample\n\nENERGY_COST_MOVE = 0.5   # cheaper? no\nMAX_STEPS=300\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.energy_cost_move, 0.5);
  EXPECT_EQ(c.max_steps, 300);
  EXPECT_EQ(c.energy_gain_plant, 100.0);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"NOT_A_KEY = 1\n", "MAX_STEPS = 1\nMAX_STEPS = 2\n", "MAX_STEPS = 2.5\n",
                           "MAX_STEPS\n", "ENERGY_COST_MOVE = \n", "energy_cost_move = 0.3\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_config(in), ConfigError) << text;
  }
}

TEST(Config, TrialSeeds) {
  EXPECT_EQ(derive_trial_seed(0, 0), 0u);
  EXPECT_EQ(derive_trial_seed(7, 4242), 4249u);
  EXPECT_THROW(derive_trial_seed(0, 10000), ConfigError);
  EXPECT_THROW(derive_trial_seed(0, -1), ConfigError);
  EXPECT_THROW(derive_trial_seed(-1, 0), ConfigError);
}

TEST(Config, SampleFileSpellsOutTheDefaults) {
  const std::string path = std::string(ERLSIM_SOURCE_DIR) + "/samples/default.cfg";
  EXPECT_EQ(load_config(path), SimConfig{});
  std::ifstream in(path);
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  for (const auto& f : detail::config_fields()) EXPECT_NE(text.find(std::string(f.key) + " ="), std::string::npos) << f.key;
}
