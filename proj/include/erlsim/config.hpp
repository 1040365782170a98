#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "erlsim/rng.hpp"

namespace erl {

/// Every tunable of a run. Defaults reproduce the published parameter table.
/// Initial-population counts, mutation sigma, init range, rehearsal cap,
/// plant_min_seed_neighbors and damage_agent_collision are not in the table
/// and are filled in here.
struct SimConfig {
  // Grid
  int world_width = 100;
  int world_height = 100;

  // Energy and health
  double max_energy = 100.0;
  double max_health = 1.0;
  double energy_cost_move = 0.3;
  double energy_gain_plant = 100.0;
  double energy_gain_meat = 50.0;
  double damage_carnivore = 0.1;
  double damage_wall = 0.1;
  double damage_agent_collision = 0.0;
  double corpse_decay_rate = 0.3;

  // Reproduction
  double reproduce_energy_threshold = 60.0;
  double reproduce_cost = 50.0;

  // Environment
  double plant_growth_prob = 0.005;
  int plant_max_density_neighbors = 4;
  int plant_min_seed_neighbors = 1;  // 0 lets any empty cell sprout
  double tree_birth_prob = 0.001;
  double tree_death_prob = 0.001;
  int carnivore_spawn_freq = 200;  // 0 disables periodic spawning

  // Perception
  int agent_view_dist = 4;
  int carnivore_view_dist = 6;

  // Learning and evolution
  double learning_rate = 0.05;
  double mutation_rate = 0.05;
  double mutation_sigma = 0.1;
  double init_weight_range = 1.0;
  int sddl_clauses = 2;
  int rehearsal_max_iters = 20;

  // Trial
  int max_steps = 2000;
  int initial_agent_count = 20;
  int initial_carnivore_count = 3;
  int initial_plant_count = 150;
  int initial_tree_count = 20;
  int internal_wall_count = 100;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

namespace detail {

struct ConfigField {
  std::string_view key;  // upper-snake key used in config files
  std::string_view name;  // field name used in diagnostics
  std::variant<int SimConfig::*, double SimConfig::*> member;
};

inline const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = {
      {"WORLD_WIDTH", "world_width", &SimConfig::world_width},
      {"WORLD_HEIGHT", "world_height", &SimConfig::world_height},
      {"MAX_ENERGY", "max_energy", &SimConfig::max_energy},
      {"MAX_HEALTH", "max_health", &SimConfig::max_health},
      {"ENERGY_COST_MOVE", "energy_cost_move", &SimConfig::energy_cost_move},
      {"ENERGY_GAIN_PLANT", "energy_gain_plant", &SimConfig::energy_gain_plant},
      {"ENERGY_GAIN_MEAT", "energy_gain_meat", &SimConfig::energy_gain_meat},
      {"DAMAGE_CARNIVORE", "damage_carnivore", &SimConfig::damage_carnivore},
      {"DAMAGE_WALL", "damage_wall", &SimConfig::damage_wall},
      {"DAMAGE_AGENT_COLLISION", "damage_agent_collision", &SimConfig::damage_agent_collision},
      {"CORPSE_DECAY_RATE", "corpse_decay_rate", &SimConfig::corpse_decay_rate},
      {"REPRODUCE_ENERGY_THRESHOLD", "reproduce_energy_threshold",
       &SimConfig::reproduce_energy_threshold},
      {"REPRODUCE_COST", "reproduce_cost", &SimConfig::reproduce_cost},
      {"PLANT_GROWTH_PROB", "plant_growth_prob", &SimConfig::plant_growth_prob},
      {"PLANT_MAX_DENSITY_NEIGHBORS", "plant_max_density_neighbors",
       &SimConfig::plant_max_density_neighbors},
      {"PLANT_MIN_SEED_NEIGHBORS", "plant_min_seed_neighbors", &SimConfig::plant_min_seed_neighbors},
      {"TREE_BIRTH_PROB", "tree_birth_prob", &SimConfig::tree_birth_prob},
      {"TREE_DEATH_PROB", "tree_death_prob", &SimConfig::tree_death_prob},
      {"CARNIVORE_SPAWN_FREQ", "carnivore_spawn_freq", &SimConfig::carnivore_spawn_freq},
      {"AGENT_VIEW_DIST", "agent_view_dist", &SimConfig::agent_view_dist},
      {"CARNIVORE_VIEW_DIST", "carnivore_view_dist", &SimConfig::carnivore_view_dist},
      {"LEARNING_RATE", "learning_rate", &SimConfig::learning_rate},
      {"MUTATION_RATE", "mutation_rate", &SimConfig::mutation_rate},
      {"MUTATION_SIGMA", "mutation_sigma", &SimConfig::mutation_sigma},
      {"INIT_WEIGHT_RANGE", "init_weight_range", &SimConfig::init_weight_range},
      {"SDDL_CLAUSES", "sddl_clauses", &SimConfig::sddl_clauses},
      {"REHEARSAL_MAX_ITERS", "rehearsal_max_iters", &SimConfig::rehearsal_max_iters},
      {"MAX_STEPS", "max_steps", &SimConfig::max_steps},
      {"INITIAL_AGENT_COUNT", "initial_agent_count", &SimConfig::initial_agent_count},
      {"INITIAL_CARNIVORE_COUNT", "initial_carnivore_count",
       &SimConfig::initial_carnivore_count},
      {"INITIAL_PLANT_COUNT", "initial_plant_count", &SimConfig::initial_plant_count},
      {"INITIAL_TREE_COUNT", "initial_tree_count", &SimConfig::initial_tree_count},
      {"INTERNAL_WALL_COUNT", "internal_wall_count", &SimConfig::internal_wall_count},
  };
  return fields;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Returns one message per violated invariant; empty means valid.
inline std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> out;
  auto prob = [&](double v, std::string_view name) {
    if (!(v >= 0.0 && v <= 1.0)) out.push_back(std::string(name) + " not in [0,1]");
  };
  auto nonneg = [&](double v, std::string_view name) {
    if (!(v >= 0.0)) out.push_back(std::string(name) + " < 0");
  };
  auto at_least = [&](long v, long lo, std::string_view name) {
    if (v < lo) out.push_back(std::string(name) + " < " + std::to_string(lo));
  };

  at_least(cfg.world_width, 3, "world_width");
  at_least(cfg.world_height, 3, "world_height");
  if (!(cfg.max_energy > 0.0)) out.push_back("max_energy <= 0");
  if (!(cfg.max_health > 0.0)) out.push_back("max_health <= 0");
  nonneg(cfg.energy_cost_move, "energy_cost_move");
  nonneg(cfg.energy_gain_plant, "energy_gain_plant");
  nonneg(cfg.energy_gain_meat, "energy_gain_meat");
  nonneg(cfg.damage_carnivore, "damage_carnivore");
  nonneg(cfg.damage_wall, "damage_wall");
  nonneg(cfg.damage_agent_collision, "damage_agent_collision");
  nonneg(cfg.corpse_decay_rate, "corpse_decay_rate");
  nonneg(cfg.reproduce_energy_threshold, "reproduce_energy_threshold");
  nonneg(cfg.reproduce_cost, "reproduce_cost");
  prob(cfg.plant_growth_prob, "plant_growth_prob");
  at_least(cfg.plant_max_density_neighbors, 0, "plant_max_density_neighbors");
  at_least(cfg.plant_min_seed_neighbors, 0, "plant_min_seed_neighbors");
  if (cfg.plant_min_seed_neighbors > cfg.plant_max_density_neighbors) {
    out.push_back("plant_min_seed_neighbors > plant_max_density_neighbors");
  }
  prob(cfg.tree_birth_prob, "tree_birth_prob");
  prob(cfg.tree_death_prob, "tree_death_prob");
  at_least(cfg.carnivore_spawn_freq, 0, "carnivore_spawn_freq");
  at_least(cfg.agent_view_dist, 1, "agent_view_dist");
  at_least(cfg.carnivore_view_dist, 1, "carnivore_view_dist");
  nonneg(cfg.learning_rate, "learning_rate");
  prob(cfg.mutation_rate, "mutation_rate");
  nonneg(cfg.mutation_sigma, "mutation_sigma");
  nonneg(cfg.init_weight_range, "init_weight_range");
  at_least(cfg.sddl_clauses, 1, "sddl_clauses");
  at_least(cfg.rehearsal_max_iters, 0, "rehearsal_max_iters");
  at_least(cfg.max_steps, 1, "max_steps");
  at_least(cfg.initial_agent_count, 0, "initial_agent_count");
  at_least(cfg.initial_carnivore_count, 0, "initial_carnivore_count");
  at_least(cfg.initial_plant_count, 0, "initial_plant_count");
  at_least(cfg.initial_tree_count, 0, "initial_tree_count");
  at_least(cfg.internal_wall_count, 0, "internal_wall_count");
  return out;
}

/// Throws ConfigError listing every violation.
inline void require_valid(const SimConfig& cfg) {
  const auto errs = validate_config(cfg);
  if (errs.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw ConfigError(msg);
}

/// Reads `KEY = value` lines on top of `base`. Blank lines and `#` comments
/// are skipped. Unknown keys, duplicate keys and unparsable values throw.
inline SimConfig parse_config(std::istream& in, SimConfig base = {}) {
  std::string line;
  std::vector<std::string_view> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    const auto where = "config line " + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected KEY = value");
    const auto key = detail::trim(sv.substr(0, eq));
    const auto value = detail::trim(sv.substr(eq + 1));

    const detail::ConfigField* field = nullptr;
    for (const auto& f : detail::config_fields()) {
      if (f.key == key) field = &f;
    }
    if (!field) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    for (auto s : seen) {
      if (s == field->key) throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    }
    seen.push_back(field->key);

    const char* first = value.data();
    const char* last = value.data() + value.size();
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(base.*member)>;
          T parsed{};
          auto [ptr, ec] = std::from_chars(first, last, parsed);
          if (ec != std::errc{} || ptr != last || value.empty()) {
            throw ConfigError(where + "bad value '" + std::string(value) + "' for " +
                              std::string(key));
          }
          base.*member = parsed;
        },
        field->member);
  }
  return base;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Writes every field; parse_config(write_config(c)) == c.
inline void write_config(std::ostream& out, const SimConfig& cfg) {
  const auto old_prec = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& f : detail::config_fields()) {
    out << f.key << " = ";
    std::visit([&](auto member) { out << cfg.*member; }, f.member);
    out << '\n';
  }
  out.precision(old_prec);
}

/// Trial i uses seed i + seed_offset, the same for every strategy.
inline std::uint64_t derive_trial_seed(std::int64_t trial_index, std::int64_t seed_offset) {
  if (trial_index < 0) throw ConfigError("trial_index must be >= 0");
  if (seed_offset < 0 || seed_offset >= 10000) throw ConfigError("seed_offset must be in [0, 10000)");
  return static_cast<std::uint64_t>(trial_index + seed_offset);
}

}  // namespace erl
