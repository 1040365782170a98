#pragma once

#include <array>
#include <cmath>

namespace erl {

inline double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Max-subtracted softmax.
template <std::size_t N>
std::array<double, N> softmax(const std::array<double, N>& logits) noexcept {
  double m = logits[0];
  for (double l : logits) m = l > m ? l : m;
  std::array<double, N> out{};
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace erl
