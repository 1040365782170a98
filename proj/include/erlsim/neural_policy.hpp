#pragma once

// Single-layer stochastic action network with two Bernoulli output bits, and a
// single-layer scalar evaluation network whose weights stay fixed for life.

#include <array>
#include <type_traits>

#include "erlsim/math.hpp"
#include "erlsim/rng.hpp"
#include "erlsim/types.hpp"

namespace erl {

struct NeuralGenome {
  std::array<std::array<double, kObsDim>, 2> action_weights{};
  std::array<double, kObsDim> eval_weights{};

  static constexpr std::size_t kParamCount = 3 * kObsDim;

  friend bool operator==(const NeuralGenome&, const NeuralGenome&) = default;
};

/// Visits every parameter in serialization order: action row 0, action row 1,
/// evaluation weights.
template <class G, class F>
  requires std::is_same_v<std::remove_const_t<G>, NeuralGenome>
void for_each_param(G& g, F&& f) {
  for (auto& row : g.action_weights)
    for (auto& w : row) f(w);
  for (auto& w : g.eval_weights) f(w);
}

using OutputBits = std::array<int, 2>;

/// (bit0, bit1): (0,0)->N, (0,1)->E, (1,0)->W, (1,1)->S.
inline constexpr Action decode_bits(OutputBits bits) noexcept {
  return static_cast<Action>(2 * bits[0] + bits[1]);
}

inline constexpr OutputBits encode_action(Action a) noexcept {
  const int i = static_cast<int>(a);
  return {i >> 1, i & 1};
}

struct NeuralDecision {
  Action action;
  OutputBits bits;
  std::array<double, 2> bit_probs;
};

inline std::array<double, 2> nn_bit_probs(const NeuralGenome& g, const Observation& obs) noexcept {
  return {sigmoid(dot(g.action_weights[0], obs)), sigmoid(dot(g.action_weights[1], obs))};
}

inline NeuralDecision nn_act(const NeuralGenome& g, const Observation& obs, RngStream& rng) {
  const auto probs = nn_bit_probs(g, obs);
  OutputBits bits{};
  for (std::size_t j = 0; j < 2; ++j) bits[j] = rng.uniform() < probs[j] ? 1 : 0;
  return {decode_bits(bits), bits, probs};
}

inline double nn_evaluate(const NeuralGenome& g, const Observation& obs) noexcept {
  return sigmoid(dot(g.eval_weights, obs));
}

/// All weights i.i.d. uniform in [-range, range].
inline NeuralGenome nn_random(RngStream& rng, double range = 1.0) {
  NeuralGenome g;
  for_each_param(g, [&](double& w) { w = rng.uniform(-range, range); });
  return g;
}

}  // namespace erl
