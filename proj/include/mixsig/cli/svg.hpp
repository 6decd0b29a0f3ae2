#pragma once

// Minimal self-contained SVG charts for sweep output. CSV stays the source of
// truth; these are previews.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "mixsig/cli/format.hpp"

namespace mixsig::cli::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
};

namespace detail {

constexpr double width = 640;
constexpr double height = 420;
constexpr double left = 70;
constexpr double right = 20;
constexpr double top = 30;
constexpr double bottom = 55;

inline std::pair<double, double> finite_range(const std::vector<double>& v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) {
    return {0.0, 1.0};
  }
  if (hi == lo) {
    hi = lo + 1.0;
  }
  return {lo, hi};
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    default: out += ch;
    }
  }
  return out;
}

inline void open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
     << escape(title) << "</text>\n";
}

inline void axes(std::ostream& os, const std::string& xlabel, const std::string& ylabel,
                 std::pair<double, double> xr, std::pair<double, double> yr) {
  const double x0 = left;
  const double x1 = width - right;
  const double y0 = height - bottom;
  const double y1 = top;
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
     << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.first + (xr.second - xr.first) * k / 4.0;
    const double px = x0 + (x1 - x0) * k / 4.0;
    os << "<text x=\"" << px << "\" y=\"" << y0 + 15 << "\" text-anchor=\"middle\">" << fmt(fx)
       << "</text>\n";
    const double fy = yr.first + (yr.second - yr.first) * k / 4.0;
    const double py = y0 - (y0 - y1) * k / 4.0;
    os << "<text x=\"" << x0 - 5 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(fy)
       << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n"
     << "<text x=\"15\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
     << (y0 + y1) / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

} // namespace detail

inline void line_chart(std::ostream& os, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<Series>& series) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const auto xr = detail::finite_range(xs);
  const auto yr = detail::finite_range(ys);
  const auto px = [&](double x) {
    return detail::left + (detail::width - detail::left - detail::right) * (x - xr.first) /
                              (xr.second - xr.first);
  };
  const auto py = [&](double y) {
    return detail::height - detail::bottom -
           (detail::height - detail::bottom - detail::top) * (y - yr.first) /
               (yr.second - yr.first);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  detail::open(os, title);
  detail::axes(os, xlabel, ylabel, xr, yr);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 5];
    std::string points;
    const auto flush = [&] {
      if (!points.empty()) {
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
           << points << "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) {
        flush();
        continue;
      }
      points += fmt(px(series[s].x[i])) + "," + fmt(py(series[s].y[i])) + " ";
    }
    flush();
    os << "<text x=\"" << detail::width - detail::right - 5 << "\" y=\""
       << detail::top + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\"" << color << "\">"
       << detail::escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
}

/// Heatmap over a regular grid; values[i * ys.size() + j] belongs to
/// (xs[i], ys[j]). NaN cells are drawn dark blue and mean "saturated".
inline void heatmap(std::ostream& os, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::vector<double>& values) {
  const auto xr = detail::finite_range(xs);
  const auto yr = detail::finite_range(ys);
  const auto vr = detail::finite_range(values);
  const double plot_w = detail::width - detail::left - detail::right;
  const double plot_h = detail::height - detail::bottom - detail::top;
  const double cw = plot_w / static_cast<double>(std::max<std::size_t>(xs.size(), 1));
  const double ch = plot_h / static_cast<double>(std::max<std::size_t>(ys.size(), 1));

  detail::open(os, title);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = values[i * ys.size() + j];
      std::string fill = "#08306b";
      if (std::isfinite(v)) {
        const double t = (v - vr.first) / (vr.second - vr.first);
        const int r = static_cast<int>(255 * t);
        const int g = static_cast<int>(220 * (1.0 - std::abs(2 * t - 1)) + 35);
        const int b = static_cast<int>(255 * (1.0 - t));
        fill = "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")";
      }
      os << "<rect x=\"" << fmt(detail::left + cw * i) << "\" y=\""
         << fmt(detail::height - detail::bottom - ch * (j + 1)) << "\" width=\"" << fmt(cw)
         << "\" height=\"" << fmt(ch) << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  detail::axes(os, xlabel, ylabel, xr, yr);
  os << "<text x=\"" << detail::width - detail::right << "\" y=\"" << detail::top - 5
     << "\" text-anchor=\"end\">range " << fmt(vr.first) << " to " << fmt(vr.second)
     << "; dark blue = saturated</text>\n";
  os << "</svg>\n";
}

} // namespace mixsig::cli::svg
