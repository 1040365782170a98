#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace erl {

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Movement actions. The numeric value is the direction index used in the
/// observation layout (N=0, E=1, W=2, S=3).
enum class Action : std::uint8_t { North = 0, East = 1, West = 2, South = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, 4> kActions = {Action::North, Action::East, Action::West,
                                                   Action::South};

struct Offset {
  int dx;
  int dy;
};

/// y grows southward.
inline constexpr Offset offset_of(Action a) noexcept {
  constexpr std::array<Offset, 4> table = {{{0, -1}, {1, 0}, {-1, 0}, {0, 1}}};
  return table[static_cast<int>(a)];
}

inline constexpr std::string_view action_name(Action a) noexcept {
  constexpr std::array<std::string_view, 4> names = {"N", "E", "W", "S"};
  return names[static_cast<int>(a)];
}

/// Sensed entity kinds, in observation-layout order.
enum class SensedType : std::uint8_t { Empty = 0, Wall, Plant, Tree, Carnivore, Agent };
inline constexpr int kNumSensedTypes = 6;

inline constexpr int kObsDim = 28;
inline constexpr int kHealthIdx = 24;
inline constexpr int kEnergyIdx = 25;
inline constexpr int kInTreeIdx = 26;
inline constexpr int kBiasIdx = 27;

inline constexpr int feature_index(Action dir, SensedType type) noexcept {
  return kNumSensedTypes * static_cast<int>(dir) + static_cast<int>(type);
}

/// 28-component egocentric feature vector, every component in [0,1].
struct Observation {
  std::array<double, kObsDim> x{};

  double operator[](int i) const noexcept { return x[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return x[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline double dot(const std::array<double, kObsDim>& w, const Observation& obs) noexcept {
  double s = 0.0;
  for (int i = 0; i < kObsDim; ++i) s += w[static_cast<std::size_t>(i)] * obs[i];
  return s;
}

}  // namespace erl
