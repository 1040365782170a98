#pragma once

// Deterministic random streams.
//
// Generator: SplitMix64 (Steele, Lea & Flood 2014). One 64-bit word of state,
// advanced by the golden-ratio increment and finalized with the Stafford
// variant-13 mixer. The algorithm is fixed for the lifetime of the project;
// changing it changes every recorded trial.
//
// Stream derivation: a stream for (trial_seed, label) starts at state
//     mix64(trial_seed ^ fnv1a64(label))
// and per-step sub-streams use RngStream::keyed(base, a, b), which chains the
// same mixer over the key words.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace erl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// The fixed set of stream labels a trial may request.
inline constexpr std::string_view kStreamLabels[] = {
    "world-init", "env-dynamics", "carnivores", "policy", "mutation"};

class RngStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit RngStream(std::uint64_t state = 0) noexcept : state_(state) {}

  static constexpr RngStream keyed(std::uint64_t base, std::uint64_t a,
                                   std::uint64_t b = 0) noexcept {
    return RngStream(mix64(base ^ mix64(a ^ mix64(b + 0x9E3779B97F4A7C15ULL))));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe to pass to log().
  double uniform_open0() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Unbiased integer in [0, n) (Lemire's multiply-shift with rejection). n > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller (one variate per call, two uniforms consumed).
  double gaussian() noexcept {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t state_;
};

/// Stream for one subsystem of one trial. Throws ConfigError on unknown labels.
inline RngStream make_stream(std::uint64_t trial_seed, std::string_view label) {
  for (auto known : kStreamLabels) {
    if (known == label) return RngStream(mix64(trial_seed ^ fnv1a64(label)));
  }
  throw ConfigError("unknown rng stream label '" + std::string(label) + "'");
}

/// Calls f(i) for every index i in [0, n) selected by an independent
/// Bernoulli(p) trial, using geometric gap sampling so the cost scales with
/// the number of hits. The draws do not depend on anything but (rng, n, p).
template <class F>
void for_each_bernoulli_index(std::uint64_t n, double p, RngStream& rng, F&& f) {
  if (p <= 0.0 || n == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < n; ++i) f(i);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t i = 0;
  for (;;) {
    const double gap = std::floor(std::log(rng.uniform_open0()) / log_q);
    if (gap >= static_cast<double>(n - i)) return;
    i += static_cast<std::uint64_t>(gap);
    f(i);
    if (++i >= n) return;
  }
}

}  // namespace erl
