#pragma once

// Soft differentiable decision list (SDDL).
//
// Clause k opens with gate g_k = sigmoid(w_k . x - tau_k). The probability that
// clause k decides is g_k times the probability that every earlier gate stayed
// closed; the final clause is an else-branch whose gate is pinned to 1, so the
// clause probabilities always sum to one. The action distribution mixes the
// per-clause softmax heads by those probabilities. The evaluation list has the
// same structure with its own gates and a scalar utility per clause.

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "erlsim/math.hpp"
#include "erlsim/rng.hpp"
#include "erlsim/types.hpp"

namespace erl {

struct Clause {
  std::array<double, kObsDim> gate_weights{};
  double threshold = 0.0;
  std::array<double, kNumActions> logits{};

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct EvalClause {
  std::array<double, kObsDim> gate_weights{};
  double threshold = 0.0;
  double utility = 0.0;

  friend bool operator==(const EvalClause&, const EvalClause&) = default;
};

struct SddlGenome {
  std::vector<Clause> action_clauses;
  std::vector<EvalClause> eval_clauses;
  double eval_bias = 0.0;

  std::size_t clause_count() const noexcept { return action_clauses.size(); }

  std::size_t param_count() const noexcept {
    return action_clauses.size() * (kObsDim + 1 + kNumActions) +
           eval_clauses.size() * (kObsDim + 1 + 1) + 1;
  }

  friend bool operator==(const SddlGenome&, const SddlGenome&) = default;
};

/// Gradient of ln pi(a|x) with respect to every action-list parameter; one
/// Clause-shaped block per clause.
using SddlGradient = std::vector<Clause>;

template <class C, class F>
  requires std::is_same_v<std::remove_const_t<C>, Clause>
void for_each_param(C& c, F&& f) {
  for (auto& w : c.gate_weights) f(w);
  f(c.threshold);
  for (auto& l : c.logits) f(l);
}

template <class C, class F>
  requires std::is_same_v<std::remove_const_t<C>, EvalClause>
void for_each_param(C& c, F&& f) {
  for (auto& w : c.gate_weights) f(w);
  f(c.threshold);
  f(c.utility);
}

/// Clause-major: action clauses, evaluation clauses, evaluation bias.
template <class G, class F>
  requires std::is_same_v<std::remove_const_t<G>, SddlGenome>
void for_each_param(G& g, F&& f) {
  for (auto& c : g.action_clauses) for_each_param(c, f);
  for (auto& c : g.eval_clauses) for_each_param(c, f);
  f(g.eval_bias);
}

template <class G, class F>
  requires std::is_same_v<std::remove_const_t<G>, SddlGenome>
void for_each_action_param(G& g, F&& f) {
  for (auto& c : g.action_clauses) for_each_param(c, f);
}

namespace detail {

/// Per-clause scratch storage; inline for the usual small K.
class ClauseScratch {
 public:
  explicit ClauseScratch(std::size_t n) : n_(n) {
    if (n > inline_.size()) heap_.resize(n);
  }
  double* data() noexcept { return n_ > inline_.size() ? heap_.data() : inline_.data(); }
  double& operator[](std::size_t i) noexcept { return data()[i]; }

 private:
  std::size_t n_;
  std::array<double, 8> inline_{};
  std::vector<double> heap_;
};

/// Writes p_k (final gate pinned to 1) for the given clauses into `p`.
template <class ClauseT>
void clause_probabilities_into(const std::vector<ClauseT>& clauses, const Observation& obs, double* p) {
  double survive = 1.0;
  const std::size_t K = clauses.size();
  for (std::size_t k = 0; k < K; ++k) {
    const double gk = (k + 1 == K) ? 1.0 : sigmoid(dot(clauses[k].gate_weights, obs) - clauses[k].threshold);
    p[k] = gk * survive;
    survive *= 1.0 - gk;
  }
}

}  // namespace detail

/// Raw gate activations sigmoid(w_k . x - tau_k), final clause included.
template <class ClauseT>
std::vector<double> gate_activations(const std::vector<ClauseT>& clauses, const Observation& obs) {
  std::vector<double> g(clauses.size());
  for (std::size_t k = 0; k < clauses.size(); ++k) {
    g[k] = sigmoid(dot(clauses[k].gate_weights, obs) - clauses[k].threshold);
  }
  return g;
}

/// p_k = g_k * prod_{j<k} (1 - g_j), with the final gate treated as 1.
inline std::vector<double> clause_probabilities(const std::vector<double>& g) {
  std::vector<double> p(g.size());
  double survive = 1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double gk = (k + 1 == g.size()) ? 1.0 : g[k];
    p[k] = gk * survive;
    survive *= 1.0 - gk;
  }
  return p;
}

using ActionDist = std::array<double, kNumActions>;

inline ActionDist policy_dist(const SddlGenome& genome, const Observation& obs) {
  const std::size_t K = genome.action_clauses.size();
  detail::ClauseScratch p(K);
  detail::clause_probabilities_into(genome.action_clauses, obs, p.data());
  ActionDist pi{};
  for (std::size_t k = 0; k < K; ++k) {
    const auto head = softmax(genome.action_clauses[k].logits);
    for (std::size_t a = 0; a < pi.size(); ++a) pi[a] += p[k] * head[a];
  }
  return pi;
}

/// Inverse-CDF draw in N, E, W, S order.
inline Action sample_action(const ActionDist& pi, RngStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] > 0.0) last_positive = a;
    cum += pi[a];
    if (u < cum) return kActions[a];
  }
  // u landed in the rounding slack above the final cumulative sum.
  return kActions[last_positive];
}

inline double evaluate(const SddlGenome& genome, const Observation& obs) {
  const std::size_t K = genome.eval_clauses.size();
  detail::ClauseScratch p(K);
  detail::clause_probabilities_into(genome.eval_clauses, obs, p.data());
  double s = genome.eval_bias;
  for (std::size_t k = 0; k < K; ++k) s += p[k] * genome.eval_clauses[k].utility;
  return sigmoid(s);
}

/// Exact gradient of ln pi(action | obs) over the action list.
///
/// With R_k the probability of `action` under the sub-list starting at clause
/// k (R_K = head_K(a), R_k = g_k head_k(a) + (1 - g_k) R_{k+1}) and P_k the
/// probability that clauses before k stayed closed:
///   d pi / d z_k = P_k (head_k(a) - R_{k+1}) g_k (1 - g_k),   z_k = w_k . x - tau_k
///   d pi / d l_kj = p_k head_k(a) (1[j = a] - head_k(j))
/// The pinned final gate has no gate gradient.
inline SddlGradient logprob_grad(const SddlGenome& genome, const Observation& obs, Action action) {
  const auto& clauses = genome.action_clauses;
  const std::size_t K = clauses.size();
  const auto a = static_cast<std::size_t>(action);

  detail::ClauseScratch g(K), prefix(K), p(K), tail(K + 1);
  std::vector<ActionDist> heads(K);
  for (std::size_t k = 0; k < K; ++k) {
    g[k] = sigmoid(dot(clauses[k].gate_weights, obs) - clauses[k].threshold);
    heads[k] = softmax(clauses[k].logits);
  }

  double survive = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double gk = (k + 1 == K) ? 1.0 : g[k];
    prefix[k] = survive;
    p[k] = gk * survive;
    survive *= 1.0 - gk;
  }

  tail[K] = 0.0;
  tail[K - 1] = heads[K - 1][a];
  for (std::size_t k = K - 1; k-- > 0;) tail[k] = g[k] * heads[k][a] + (1.0 - g[k]) * tail[k + 1];
  const double pi_a = tail[0];

  SddlGradient grad(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double scale = p[k] * heads[k][a] / pi_a;
    for (std::size_t j = 0; j < kNumActions; ++j) {
      grad[k].logits[j] = scale * ((j == a ? 1.0 : 0.0) - heads[k][j]);
    }
    if (k + 1 == K) continue;
    const double dz = prefix[k] * (heads[k][a] - tail[k + 1]) * g[k] * (1.0 - g[k]) / pi_a;
    for (int i = 0; i < kObsDim; ++i) grad[k].gate_weights[static_cast<std::size_t>(i)] = dz * obs[i];
    grad[k].threshold = -dz;
  }
  return grad;
}

/// K clauses per list; gate weights, thresholds, logits and utilities uniform
/// in [-range, range]; evaluation bias 0.
inline SddlGenome sddl_random(int K, RngStream& rng, double range = 1.0) {
  if (K < 1) throw ContractViolation("sddl_random: K must be >= 1");
  SddlGenome g;
  g.action_clauses.resize(static_cast<std::size_t>(K));
  g.eval_clauses.resize(static_cast<std::size_t>(K));
  auto draw = [&](double& v) { v = rng.uniform(-range, range); };
  for (auto& c : g.action_clauses) for_each_param(c, draw);
  for (auto& c : g.eval_clauses) for_each_param(c, draw);
  g.eval_bias = 0.0;
  return g;
}

}  // namespace erl
