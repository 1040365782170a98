#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "erlsim/survival_stats.hpp"
#include "erlsim/trial_runner.hpp"

namespace erl {

inline constexpr std::string_view kResultsHeader =
    "strategy,trial_index,seed,duration,censored,peak_population,births,deaths";

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void write_results(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << r.strategy << ',' << r.trial_index << ',' << r.seed << ',' << r.duration << ',' << (r.censored ? 1 : 0)
        << ',' << r.peak_population << ',' << r.births << ',' << r.deaths << '\n';
  }
}

namespace detail {

template <class Int>
Int parse_field(std::string_view s, std::size_t line, std::string_view name) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw CsvError(line, "bad " + std::string(name) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline std::vector<TrialRecord> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(1, "empty file");
  if (line != kResultsHeader) throw CsvError(1, "unexpected header");

  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw CsvError(lineno, "blank line");
    }
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 8) throw CsvError(lineno, "expected 8 fields, got " + std::to_string(f.size()));

    TrialRecord r;
    r.strategy = std::string(f[0]);
    try {
      (void)parse_strategy(r.strategy);
    } catch (const std::exception&) {
      throw CsvError(lineno, "unknown strategy '" + r.strategy + "'");
    }
    r.trial_index = detail::parse_field<std::int64_t>(f[1], lineno, "trial_index");
    r.seed = detail::parse_field<std::uint64_t>(f[2], lineno, "seed");
    r.duration = detail::parse_field<std::int64_t>(f[3], lineno, "duration");
    const int cens = detail::parse_field<int>(f[4], lineno, "censored");
    r.peak_population = detail::parse_field<std::int64_t>(f[5], lineno, "peak_population");
    r.births = detail::parse_field<std::int64_t>(f[6], lineno, "births");
    r.deaths = detail::parse_field<std::int64_t>(f[7], lineno, "deaths");
    if (cens != 0 && cens != 1) throw CsvError(lineno, "censored must be 0 or 1");
    r.censored = cens == 1;
    if (r.duration < 1) throw CsvError(lineno, "duration must be >= 1");
    if (r.trial_index < 0 || r.peak_population < 0 || r.births < 0 || r.deaths < 0)
      throw CsvError(lineno, "negative count");
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<SurvivalRecord> survival_records(const std::vector<TrialRecord>& records,
                                                    std::string_view strategy) {
  std::vector<SurvivalRecord> out;
  for (const auto& r : records)
    if (r.strategy == strategy) out.push_back({r.duration, r.censored});
  return out;
}

/// Strategy names in order of first appearance.
inline std::vector<std::string> strategies_in(const std::vector<TrialRecord>& records) {
  std::vector<std::string> names;
  for (const auto& r : records)
    if (std::find(names.begin(), names.end(), r.strategy) == names.end()) names.push_back(r.strategy);
  return names;
}

}  // namespace erl
