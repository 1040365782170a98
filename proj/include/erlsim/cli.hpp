#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erlsim/results_csv.hpp"
#include "erlsim/survival_stats.hpp"
#include "erlsim/svg_plot.hpp"
#include "erlsim/trial_runner.hpp"

namespace erl::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;
inline constexpr int kInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunArgs {
  std::string strategies;
  std::int64_t trials = 0;
  std::optional<int> max_steps;
  std::optional<std::int64_t> seed_offset;
  std::string config;
  std::string out;
  int parallelism = 1;
  std::string event_log;
};

struct AnalyzeArgs {
  std::string in;
  std::vector<std::string> compare;
  std::optional<double> tau;
  std::string summary;
};

struct PlotArgs {
  std::string in;
  std::string out;
};

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::string(erl::detail::trim(item)));
  return out;
}

inline std::vector<TrialRecord> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return read_results(in);
  } catch (const CsvError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<StrategySpec> specs;
  for (const auto& name : split_commas(a.strategies)) {
    try {
      specs.push_back(parse_strategy(name));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (specs.empty()) throw UsageError("no strategies given");

  SimConfig cfg;
  if (!a.config.empty()) {
    try {
      cfg = load_config(a.config);
    } catch (const ConfigError& e) {
      throw DataError(e.what());
    }
  }
  if (a.max_steps) cfg.max_steps = *a.max_steps;
  if (const auto problems = validate_config(cfg); !problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }

  const std::int64_t offset = a.seed_offset.value_or(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count() %
      10000);
  if (offset < 0 || offset >= 10000) throw UsageError("--seed-offset must be in [0, 10000)");
  err << "seed offset " << offset << '\n';

  std::ofstream csv(a.out, std::ios::binary);
  if (!csv) throw DataError("cannot write '" + a.out + "'");

  std::vector<TrialRecord> records;
  if (!a.event_log.empty()) {
    if (specs.size() != 1 || a.trials != 1) throw UsageError("--event-log needs one strategy and --trials 1");
    std::ofstream log(a.event_log, std::ios::binary);
    if (!log) throw DataError("cannot write '" + a.event_log + "'");
    records.push_back(run_trial(specs[0], 0, offset, cfg, [&](const Event& e) { write_event(log, e); }));
  } else {
    std::map<std::string, std::int64_t> done_per_strategy;
    const auto progress = [&](std::size_t done, std::size_t total, const TrialRecord& r) {
      if (++done_per_strategy[r.strategy] == a.trials)
        err << r.strategy << ": " << a.trials << " trials done (" << done << '/' << total << ")\n";
    };
    records = run_batch(specs, a.trials, offset, cfg, a.parallelism, progress);
  }
  write_results(csv, records);
  csv.flush();
  if (!csv) throw DataError("write to '" + a.out + "' failed");
  out << "wrote " << records.size() << " records to " << a.out << '\n';
  return kOk;
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

inline nlohmann::json tail_json(const TailProb& p) { return {{"p", p.p}, {"log10_p", p.log10_p}}; }

}  // namespace detail

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  using detail::fixed;
  using detail::pad;
  const auto records = load_results(a.in);
  if (records.empty()) throw DataError(a.in + ": no records");
  const auto names = strategies_in(records);

  std::int64_t horizon = 0;
  for (const auto& r : records) horizon = std::max(horizon, r.duration);
  const double tau = a.tau.value_or(static_cast<double>(horizon));
  if (!(tau > 0)) throw UsageError("--tau must be positive");

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& c : a.compare) {
    const auto parts = split_commas(c);
    if (parts.size() != 2) throw UsageError("--compare expects A,B");
    for (const auto& p : parts)
      if (std::find(names.begin(), names.end(), p) == names.end())
        throw DataError("strategy '" + p + "' not in " + a.in);
    pairs.emplace_back(parts[0], parts[1]);
  }

  nlohmann::json doc;
  doc["input"] = a.in;
  doc["tau"] = tau;
  doc["strategies"] = nlohmann::json::array();

  std::map<std::string, RmstResult> rm;
  out << "tau = " << fixed(tau, 0) << "\n\n";
  out << "strategy       n       mean   median  censored\n";
  for (const auto& name : names) {
    const auto recs = survival_records(records, name);
    const auto s = summarize(recs, tau);
    out << name << std::string(name.size() < 8 ? 8 - name.size() : 1, ' ') << pad(std::to_string(s.n), 7)
        << pad(fixed(s.mean, 1), 11) << pad(s.median ? std::to_string(*s.median) : "> " + fixed(tau, 0), 9)
        << pad(std::to_string(s.censored) + "/" + std::to_string(s.n), 10) << '\n';
    try {
      rm[name] = rmst(km_curve(recs), tau);
    } catch (const StatsError& e) {
      throw DataError(name + ": " + e.what());
    }
    doc["strategies"].push_back({{"name", name},
                                 {"n", s.n},
                                 {"mean", s.mean},
                                 {"median", s.median ? nlohmann::json(*s.median) : nlohmann::json(nullptr)},
                                 {"censored", s.censored},
                                 {"rmst", rm[name].mu},
                                 {"rmst_se", rm[name].se},
                                 {"rmst_ci95", {rm[name].mu - 1.96 * rm[name].se, rm[name].mu + 1.96 * rm[name].se}}});
  }

  out << "\nstrategy      RMST      SE   95% CI\n";
  for (const auto& name : names) {
    const auto& r = rm[name];
    out << name << std::string(name.size() < 8 ? 8 - name.size() : 1, ' ') << pad(fixed(r.mu), 10)
        << pad(fixed(r.se), 8) << "   (" << fixed(r.mu - 1.96 * r.se, 1) << ", " << fixed(r.mu + 1.96 * r.se, 1)
        << ")\n";
  }

  doc["comparisons"] = nlohmann::json::array();
  for (const auto& [A, B] : pairs) {
    LogRankResult lr;
    try {
      lr = log_rank(survival_records(records, A), survival_records(records, B));
    } catch (const StatsError& e) {
      throw DataError(A + " vs " + B + ": " + e.what());
    }
    const auto d = rmst_diff(rm[A], rm[B]);
    out << '\n' << A << " vs " << B << '\n';
    out << "  log-rank: O = " << fixed(lr.observed_a, 0) << ", E = " << fixed(lr.expected_a) << ", V = "
        << fixed(lr.variance_a) << ", chi2 = " << fixed(lr.chi2, 4) << ", p = " << format_p(lr.p) << '\n';
    out << "  RMST difference: " << fixed(d.delta) << " (95% CI [" << fixed(d.ci_low) << ", " << fixed(d.ci_high)
        << "]), Z = " << fixed(d.z) << ", p = " << format_p(d.p) << '\n';
    doc["comparisons"].push_back({{"a", A},
                                  {"b", B},
                                  {"log_rank",
                                   {{"observed_a", lr.observed_a},
                                    {"expected_a", lr.expected_a},
                                    {"variance_a", lr.variance_a},
                                    {"chi2", lr.chi2},
                                    {"p", detail::tail_json(lr.p)}}},
                                  {"rmst_diff",
                                   {{"delta", d.delta},
                                    {"se", d.se},
                                    {"ci95", {d.ci_low, d.ci_high}},
                                    {"z", d.z},
                                    {"p", detail::tail_json(d.p)}}}});
  }

  const std::string summary = a.summary.empty() ? a.in + ".summary.json" : a.summary;
  std::ofstream js(summary, std::ios::binary);
  if (!js) throw DataError("cannot write '" + summary + "'");
  js << doc.dump(2) << '\n';
  err << "summary written to " << summary << '\n';
  return kOk;
}

inline int cmd_plot(const PlotArgs& a, std::ostream& out, std::ostream&) {
  const auto records = load_results(a.in);
  if (records.empty()) throw DataError(a.in + ": no records");
  std::vector<PlotSeries> series;
  for (const auto& name : strategies_in(records)) series.push_back({name, km_curve(survival_records(records, name))});
  std::ofstream svg(a.out, std::ios::binary);
  if (!svg) throw DataError("cannot write '" + a.out + "'");
  write_km_svg(svg, series);
  out << "plotted " << series.size() << " curves to " << a.out << '\n';
  return kOk;
}

/// Full command line; returns the process exit code.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"ERL artificial-life simulator and survival analysis"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run trials and write a results CSV");
  run->add_option("--strategies", ra.strategies, "Comma list of NERL,NE,NL,NF,PERL,PE,PL,B")->required();
  run->add_option("--trials", ra.trials, "Trials per strategy")->required()->check(CLI::PositiveNumber);
  run->add_option("--max-steps", ra.max_steps, "Override MAX_STEPS");
  run->add_option("--seed-offset", ra.seed_offset, "Seed offset in [0, 10000); default wall clock mod 10000");
  run->add_option("--config", ra.config, "Config file (KEY = value lines)");
  run->add_option("--out", ra.out, "Results CSV path")->required();
  run->add_option("--parallelism", ra.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--event-log", ra.event_log, "Per-step event log (one strategy, one trial)");

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Survival summary and comparisons");
  analyze->add_option("--in", aa.in, "Results CSV")->required();
  analyze->add_option("--compare", aa.compare, "Pair A,B (repeatable)");
  analyze->add_option("--tau", aa.tau, "RMST horizon (default: largest duration)");
  analyze->add_option("--summary", aa.summary, "JSON summary path (default: <in>.summary.json)");

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Kaplan-Meier curves as SVG");
  plot->add_option("--in", pa.in, "Results CSV")->required();
  plot->add_option("--out", pa.out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(ra, out, err);
    if (*analyze) return cmd_analyze(aa, out, err);
    return cmd_plot(pa, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace erl::cli
