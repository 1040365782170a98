#pragma once

// Shared fixtures and independent reference implementations for the test
// programs.

#include <cmath>
#include <vector>

#include "erlsim/perception.hpp"
#include "erlsim/survival_stats.hpp"
#include "erlsim/world.hpp"

namespace erl::testing {

/// Observation with the structure observe() produces: ray features are 0 or
/// in [0.5, 1], proprioception in [0, 1], bias 1.
inline Observation random_obs(RngStream& rng) {
  Observation o;
  for (int i = 0; i < 24; ++i) o[i] = rng.bernoulli(0.4) ? rng.uniform(0.5, 1.0) : 0.0;
  o[kHealthIdx] = rng.uniform();
  o[kEnergyIdx] = rng.uniform();
  o[kInTreeIdx] = rng.bernoulli(0.2) ? 1.0 : 0.0;
  o[kBiasIdx] = 1.0;
  return o;
}

/// Config for hand-built worlds: nothing placed, nothing stochastic.
inline SimConfig quiet_config(int size = 12) {
  SimConfig cfg;
  cfg.world_width = size;
  cfg.world_height = size;
  cfg.initial_agent_count = 0;
  cfg.initial_carnivore_count = 0;
  cfg.initial_plant_count = 0;
  cfg.initial_tree_count = 0;
  cfg.internal_wall_count = 0;
  cfg.plant_growth_prob = 0.0;
  cfg.tree_birth_prob = 0.0;
  cfg.tree_death_prob = 0.0;
  cfg.carnivore_spawn_freq = 0;
  return cfg;
}

/// Boundary walls only.
inline WorldState bare_world(const SimConfig& cfg) {
  RngStream rng(1);
  return init_world(cfg, rng);
}

inline std::vector<SurvivalRecord> uncensored(std::initializer_list<std::int64_t> ts) {
  std::vector<SurvivalRecord> out;
  for (auto t : ts) out.push_back({t, false});
  return out;
}

// Remission times (weeks) from the 6-MP leukemia trial, a standard two-group
// survival example; negative entries are censored.
inline std::vector<SurvivalRecord> leukemia_6mp() {
  std::vector<SurvivalRecord> out;
  for (int t : {6, 6, 6, -6, 7, -9, 10, -10, -11, 13, 16, -17, -19, -20, 22, 23, -25, -32, -32, -34, -35})
    out.push_back({std::abs(t), t < 0});
  return out;
}

inline std::vector<SurvivalRecord> leukemia_placebo() {
  return uncensored({1, 1, 2, 2, 3, 4, 4, 5, 5, 8, 8, 8, 8, 11, 11, 12, 12, 15, 17, 22, 23});
}

// ---- reference tails ------------------------------------------------------
// Regularized upper incomplete gamma Q(a, x): power series for P when
// x < a + 1, Lentz continued fraction for Q otherwise. The chi-square(1)
// upper tail at c is Q(1/2, c/2).

inline double ref_log_gamma_q(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return std::log1p(-std::exp(log_prefix) * sum);
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return log_prefix + std::log(h);
}

inline double ref_chi2_sf_df1(double c) { return std::exp(ref_log_gamma_q(0.5, 0.5 * c)); }
inline double ref_log10_chi2_sf_df1(double c) { return ref_log_gamma_q(0.5, 0.5 * c) / std::log(10.0); }

// Deterministic cohort with exponential survival: the i-th duration is the
// (i + 1/2)/n quantile rounded up to whole steps, censored past tau.
inline std::vector<SurvivalRecord> quantile_cohort(int n, double hazard, std::int64_t tau) {
  std::vector<SurvivalRecord> out;
  for (int i = 0; i < n; ++i) {
    const double q = (i + 0.5) / n;
    auto t = static_cast<std::int64_t>(std::ceil(-std::log1p(-q) / hazard));
    t = std::max<std::int64_t>(t, 1);
    if (t >= tau) out.push_back({tau, true});
    else out.push_back({t, false});
  }
  return out;
}

}  // namespace erl::testing
