#pragma once

// Heritable policy parameters and their byte layouts.
//
// Neural: 84 IEEE-754 doubles, little-endian, in for_each_param order
//   (action row 0, action row 1, evaluation weights). 672 bytes, no header.
// SDDL: 1 version byte (kSddlFormatVersion), K as uint32 little-endian, then
//   every parameter in for_each_param order as little-endian doubles:
//   K x [28 gate weights, threshold, 4 logits], K x [28 gate weights,
//   threshold, utility], evaluation bias.

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "erlsim/neural_policy.hpp"
#include "erlsim/sddl_policy.hpp"

namespace erl {

/// Brownian agents carry no parameters.
struct BrownianGenome {
  friend bool operator==(const BrownianGenome&, const BrownianGenome&) = default;
};

using Genome = std::variant<BrownianGenome, NeuralGenome, SddlGenome>;

inline constexpr std::uint8_t kSddlFormatVersion = 1;

class GenomeFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[pos + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const NeuralGenome& g) {
  std::vector<std::uint8_t> out;
  out.reserve(NeuralGenome::kParamCount * 8);
  for_each_param(g, [&](double w) { detail::put_u64(out, std::bit_cast<std::uint64_t>(w)); });
  return out;
}

inline NeuralGenome deserialize_neural(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != NeuralGenome::kParamCount * 8) {
    throw GenomeFormatError("neural genome must be exactly 672 bytes");
  }
  NeuralGenome g;
  std::size_t pos = 0;
  for_each_param(g, [&](double& w) {
    w = std::bit_cast<double>(detail::get_u64(bytes, pos));
    pos += 8;
  });
  return g;
}

inline std::vector<std::uint8_t> serialize(const SddlGenome& g) {
  std::vector<std::uint8_t> out;
  out.reserve(5 + g.param_count() * 8);
  out.push_back(kSddlFormatVersion);
  const auto K = static_cast<std::uint32_t>(g.clause_count());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(K >> (8 * i)));
  for_each_param(g, [&](double w) { detail::put_u64(out, std::bit_cast<std::uint64_t>(w)); });
  return out;
}

inline SddlGenome deserialize_sddl(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5) throw GenomeFormatError("sddl genome truncated");
  if (bytes[0] != kSddlFormatVersion) throw GenomeFormatError("unsupported sddl genome version");
  std::uint32_t K = 0;
  for (int i = 0; i < 4; ++i) K |= std::uint32_t{bytes[1 + static_cast<std::size_t>(i)]} << (8 * i);
  if (K == 0) throw GenomeFormatError("sddl genome has zero clauses");
  SddlGenome g;
  g.action_clauses.resize(K);
  g.eval_clauses.resize(K);
  if (bytes.size() != 5 + g.param_count() * 8) throw GenomeFormatError("sddl genome size mismatch");
  std::size_t pos = 5;
  for_each_param(g, [&](double& w) {
    w = std::bit_cast<double>(detail::get_u64(bytes, pos));
    pos += 8;
  });
  return g;
}

/// FNV-1a over the serialized parameters; 0 for Brownian.
inline std::uint64_t genome_hash(const Genome& genome) {
  return std::visit(
      [](const auto& g) -> std::uint64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, BrownianGenome>) {
          return 0;
        } else {
          std::uint64_t h = 0xCBF29CE484222325ULL;
          for (auto b : serialize(g)) {
            h ^= b;
            h *= 0x100000001B3ULL;
          }
          return h;
        }
      },
      genome);
}

}  // namespace erl
