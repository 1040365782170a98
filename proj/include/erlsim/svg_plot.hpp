#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "erlsim/survival_stats.hpp"

namespace erl {

struct PlotSeries {
  std::string name;
  SurvivalCurve curve;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline constexpr std::array<std::string_view, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
inline constexpr std::array<std::string_view, 3> kDashes = {"", "6,3", "2,2"};

}  // namespace detail

/// Kaplan-Meier step curves, one path per series. Output depends only on the input.
inline void write_km_svg(std::ostream& out, const std::vector<PlotSeries>& series) {
  using detail::fmt2;
  constexpr double W = 800, H = 500, left = 70, right = 170, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  std::int64_t xmax = 1;
  for (const auto& s : series) xmax = std::max(xmax, s.curve.max_time);
  const auto X = [&](double t) { return left + pw * t / static_cast<double>(xmax); };
  const auto Y = [&](double s) { return top + ph * (1.0 - s); };

  out << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << W << R"(" height=")" << H << R"(" viewBox="0 0 )"
      << W << ' ' << H << "\">\n";
  out << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
  out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top + ph) << "\" x2=\"" << fmt2(left + pw) << "\" y2=\""
      << fmt2(top + ph) << "\"/>\n";
  out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left) << "\" y2=\""
      << fmt2(top + ph) << "\"/>\n";
  out << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double s = i / 5.0;
    out << "<line x1=\"" << fmt2(left - 4) << "\" y1=\"" << fmt2(Y(s)) << "\" x2=\"" << fmt2(left) << "\" y2=\""
        << fmt2(Y(s)) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << fmt2(left - 7) << "\" y=\"" << fmt2(Y(s) + 4) << "\" text-anchor=\"end\">" << fmt2(s)
        << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double t = static_cast<double>(xmax) * i / 5.0;
    out << "<line x1=\"" << fmt2(X(t)) << "\" y1=\"" << fmt2(top + ph) << "\" x2=\"" << fmt2(X(t)) << "\" y2=\""
        << fmt2(top + ph + 4) << "\" stroke=\"black\"/>";
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.0f", t);
    out << "<text x=\"" << fmt2(X(t)) << "\" y=\"" << fmt2(top + ph + 17) << "\" text-anchor=\"middle\">" << lab
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text class=\"x-label\" x=\"" << fmt2(left + pw / 2) << "\" y=\"" << fmt2(H - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">timestep</text>\n";
  out << "<text class=\"y-label\" x=\"18\" y=\"" << fmt2(top + ph / 2) << "\" transform=\"rotate(-90 18 "
      << fmt2(top + ph / 2)
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">survival probability</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& c = series[i].curve;
    const auto color = detail::kPalette[i % detail::kPalette.size()];
    const auto dash = detail::kDashes[(i / detail::kPalette.size()) % detail::kDashes.size()];
    std::string d = "M" + fmt2(X(0)) + " " + fmt2(Y(1.0));
    for (std::size_t j = 0; j < c.times.size(); ++j) {
      d += " H" + fmt2(X(static_cast<double>(c.times[j])));
      d += " V" + fmt2(Y(c.survival[j]));
    }
    d += " H" + fmt2(X(static_cast<double>(c.max_time)));
    out << "<path class=\"km-curve\" data-strategy=\"" << detail::xml_escape(series[i].name) << "\" d=\"" << d
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
    out << "/>\n";
  }

  out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const double x = left + pw + 20;
    const auto color = detail::kPalette[i % detail::kPalette.size()];
    out << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(x + 25) << "\" y2=\"" << fmt2(y)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
    out << "<text x=\"" << fmt2(x + 32) << "\" y=\"" << fmt2(y + 4) << "\">" << detail::xml_escape(series[i].name)
        << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace erl
