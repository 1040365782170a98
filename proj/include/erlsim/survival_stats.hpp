#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace erl {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SurvivalRecord {
  std::int64_t duration = 0;
  bool censored = false;
};

/// Product-limit estimate. Index j describes the j-th distinct event time.
struct SurvivalCurve {
  std::vector<std::int64_t> times;
  std::vector<std::int64_t> deaths;
  std::vector<std::int64_t> at_risk;
  std::vector<double> survival;
  std::vector<double> greenwood;  // cumulative sum of d/(n(n-d))
  std::int64_t subjects = 0;
  std::int64_t max_time = 0;  // largest duration, event or censored

  /// S(t) for the step function (right-continuous).
  double at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t,
                                     [](double v, std::int64_t tj) { return v < static_cast<double>(tj); });
    if (it == times.begin()) return 1.0;
    return survival[static_cast<std::size_t>(it - times.begin()) - 1];
  }
};

inline SurvivalCurve km_curve(std::span<const SurvivalRecord> records) {
  if (records.empty()) throw StatsError("km_curve: no records");
  std::vector<SurvivalRecord> sorted(records.begin(), records.end());
  for (const auto& r : sorted)
    if (r.duration < 1) throw StatsError("km_curve: duration < 1");
  std::ranges::sort(sorted, {}, &SurvivalRecord::duration);

  SurvivalCurve c;
  c.subjects = static_cast<std::int64_t>(sorted.size());
  c.max_time = sorted.back().duration;
  double s = 1.0, gw = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const std::int64_t t = sorted[i].duration;
    const auto n = static_cast<std::int64_t>(sorted.size() - i);
    std::int64_t d = 0;
    for (; i < sorted.size() && sorted[i].duration == t; ++i)
      if (!sorted[i].censored) ++d;
    if (d == 0) continue;
    s *= 1.0 - static_cast<double>(d) / static_cast<double>(n);
    if (n > d) gw += static_cast<double>(d) / (static_cast<double>(n) * static_cast<double>(n - d));
    c.times.push_back(t);
    c.deaths.push_back(d);
    c.at_risk.push_back(n);
    c.survival.push_back(s);
    c.greenwood.push_back(gw);
  }
  return c;
}

// ---- tail probabilities -------------------------------------------------

/// An upper-tail probability with its base-10 log, which stays finite when
/// the probability itself underflows.
struct TailProb {
  double p = 1.0;
  double log10_p = 0.0;
};

namespace detail {

/// log erfc(z) for z >= 0. Direct below z = 26 (erfc > 1e-296); beyond,
/// the Laplace continued fraction erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + 1/2/(z + 1/(z + 3/2/(z + ...)))),
/// evaluated with modified Lentz.
inline double log_erfc(double z) {
  if (z < 26.0) return std::log(std::erfc(z));
  constexpr double tiny = 1e-300;
  double f = z, C = z, D = 0.0;
  for (int k = 1; k < 500; ++k) {
    const double a = 0.5 * k;
    D = z + a * D;
    if (std::abs(D) < tiny) D = tiny;
    C = z + a / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return -z * z - 0.5 * std::log(std::numbers::pi) - std::log(f);
}

inline TailProb erfc_tail(double z) {
  const double lg = log_erfc(z);
  return {std::exp(lg), lg / std::numbers::ln10};
}

}  // namespace detail

/// P(X > x) for X ~ chi-square with one degree of freedom.
inline TailProb chi2_sf_df1(double x) {
  if (!(x >= 0.0)) return {1.0, 0.0};
  return detail::erfc_tail(std::sqrt(0.5 * x));
}

/// Two-sided standard normal p-value P(|Z| > |z|).
inline TailProb normal_two_sided(double z) {
  return detail::erfc_tail(std::abs(z) / std::numbers::sqrt2);
}

/// Scientific notation that survives underflow, e.g. "4.07e-72".
inline std::string format_p(const TailProb& t, int digits = 3) {
  char buf[64];
  if (t.p >= 1e-300) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, t.p);
    return buf;
  }
  const double e = std::floor(t.log10_p);
  std::snprintf(buf, sizeof buf, "%.*fe%lld", digits - 1, std::pow(10.0, t.log10_p - e), static_cast<long long>(e));
  return buf;
}

// ---- log-rank -----------------------------------------------------------

struct LogRankResult {
  double chi2 = 0.0;
  TailProb p;
  double observed_a = 0.0;
  double expected_a = 0.0;
  double variance_a = 0.0;
};

inline LogRankResult log_rank(std::span<const SurvivalRecord> a, std::span<const SurvivalRecord> b) {
  if (a.empty() || b.empty()) throw StatsError("log_rank: empty group");
  struct Tagged {
    std::int64_t t;
    bool censored;
    bool in_a;
  };
  std::vector<Tagged> all;
  all.reserve(a.size() + b.size());
  for (const auto& r : a) all.push_back({r.duration, r.censored, true});
  for (const auto& r : b) all.push_back({r.duration, r.censored, false});
  std::ranges::sort(all, {}, &Tagged::t);

  double n_a = static_cast<double>(a.size()), n_b = static_cast<double>(b.size());
  LogRankResult res;
  bool any_event = false;
  std::size_t i = 0;
  while (i < all.size()) {
    const std::int64_t t = all[i].t;
    double d_a = 0, d_b = 0, leave_a = 0, leave_b = 0;
    for (; i < all.size() && all[i].t == t; ++i) {
      (all[i].in_a ? leave_a : leave_b) += 1;
      if (!all[i].censored) (all[i].in_a ? d_a : d_b) += 1;
    }
    const double d = d_a + d_b, n = n_a + n_b;
    if (d > 0) {
      any_event = true;
      res.observed_a += d_a;
      res.expected_a += d * n_a / n;
      if (n > 1) res.variance_a += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1);
    }
    n_a -= leave_a;
    n_b -= leave_b;
  }
  if (!any_event) throw StatsError("log_rank: no events in either group");
  if (!(res.variance_a > 0.0)) throw StatsError("log_rank: zero variance");
  const double diff = res.observed_a - res.expected_a;
  res.chi2 = diff * diff / res.variance_a;
  res.p = chi2_sf_df1(res.chi2);
  return res;
}

// ---- RMST ---------------------------------------------------------------

struct RmstResult {
  double mu = 0.0;
  double se = 0.0;
  double tau = 0.0;
};

inline RmstResult rmst(const SurvivalCurve& c, double tau) {
  if (!(tau > 0.0)) throw StatsError("rmst: tau must be positive");
  // Past the last record S is known only if it already reached zero.
  if (tau > static_cast<double>(c.max_time) && (c.survival.empty() || c.survival.back() > 0.0))
    throw StatsError("rmst: tau beyond the last observed time");

  // Event times inside [0, tau) and the area under S on each piece.
  std::size_t m = 0;
  while (m < c.times.size() && static_cast<double>(c.times[m]) < tau) ++m;
  std::vector<double> piece(m + 1);  // piece[j]: area over [t_{j-1}, t_j), t_{-1} = 0, t_m = tau
  double prev_t = 0.0, prev_s = 1.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double tj = j < m ? static_cast<double>(c.times[j]) : tau;
    piece[j] = prev_s * (tj - prev_t);
    prev_t = tj;
    if (j < m) prev_s = c.survival[j];
  }
  RmstResult r;
  r.tau = tau;
  for (double a : piece) r.mu += a;

  // Area beyond t_j, accumulated from the right.
  double beyond = 0.0, var = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    beyond += piece[j + 1];
    const auto n = static_cast<double>(c.at_risk[j]), d = static_cast<double>(c.deaths[j]);
    if (n > d) var += beyond * beyond * d / (n * (n - d));
  }
  r.se = std::sqrt(var);
  return r;
}

struct RmstDiff {
  double delta = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double z = 0.0;
  TailProb p;
};

inline RmstDiff rmst_diff(const RmstResult& a, const RmstResult& b) {
  if (a.tau != b.tau) throw StatsError("rmst_diff: mismatched tau");
  RmstDiff d;
  d.delta = a.mu - b.mu;
  d.se = std::hypot(a.se, b.se);
  d.ci_low = d.delta - 1.96 * d.se;
  d.ci_high = d.delta + 1.96 * d.se;
  if (d.se > 0.0) {
    d.z = d.delta / d.se;
    d.p = normal_two_sided(d.z);
  } else {
    d.z = d.delta == 0.0 ? 0.0 : std::copysign(INFINITY, d.delta);
    d.p = d.delta == 0.0 ? TailProb{} : TailProb{0.0, -INFINITY};
  }
  return d;
}

// ---- summary ------------------------------------------------------------

struct Summary {
  std::int64_t n = 0;
  double mean = 0.0;                 // mean of min(T, tau)
  std::optional<std::int64_t> median;  // empty when S never reaches 0.5
  std::int64_t censored = 0;
};

inline std::optional<std::int64_t> km_median(const SurvivalCurve& c) {
  for (std::size_t j = 0; j < c.times.size(); ++j)
    if (c.survival[j] <= 0.5) return c.times[j];
  return std::nullopt;
}

inline Summary summarize(std::span<const SurvivalRecord> records, double tau) {
  if (records.empty()) throw StatsError("summarize: no records");
  Summary s;
  s.n = static_cast<std::int64_t>(records.size());
  double total = 0.0;
  for (const auto& r : records) {
    total += std::min(static_cast<double>(r.duration), tau);
    if (r.censored) ++s.censored;
  }
  s.mean = total / static_cast<double>(records.size());
  s.median = km_median(km_curve(records));
  return s;
}

}  // namespace erl
