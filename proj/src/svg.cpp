#include "erpaug/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace erpaug {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) +
         "</text>\n";
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           std::vector<Series> series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (auto& s : series) {
    std::sort(s.points.begin(), s.points.end());
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 1, xmax += 1;
  if (ymax - ymin < 1e-3) ymin -= 0.01, ymax += 0.01;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad, ymax += pad;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::string out = header(kWidth, kHeight);
  out += text(kWidth / 2, 22, title);
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
    out += text(sx(xv), kTop + ph + 16, num(xv));
    out += text(kLeft - 6, sy(yv) + 4, num(yv), "end");
    out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + pw) + "\" y1=\"" + num(sy(yv)) + "\" y2=\"" +
           num(sy(yv)) + "\" stroke=\"#ddd\"/>\n";
  }
  out += text(kLeft + pw / 2, kHeight - 18, x_label);
  out += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + ph / 2) + ")\">" + escape(y_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* colour = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (auto [x, y] : series[i].points) pts += num(sx(x)) + "," + num(sy(y)) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"" + pts +
           "\"/>\n";
    for (auto [x, y] : series[i].points) {
      out += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) + "\" r=\"2.5\" fill=\"" + colour + "\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    out += "<line x1=\"" + num(kLeft + pw + 12) + "\" x2=\"" + num(kLeft + pw + 32) + "\" y1=\"" + num(ly - 4) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    out += text(kLeft + pw + 38, ly, series[i].name, "start");
  }
  return out + "</svg>\n";
}

std::string svg_heat_map(const std::string& title, const std::vector<std::string>& row_labels,
                         const std::vector<std::string>& col_labels, const std::vector<std::vector<double>>& values) {
  const double cell = 48;
  const double left = 90, top = 50;
  const double w = left + cell * static_cast<double>(col_labels.size()) + 30;
  const double h = top + cell * static_cast<double>(row_labels.size()) + 50;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : values) {
    for (double v : row) {
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1e-9;

  std::string out = header(w, h);
  out += text(w / 2, 22, title);
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    const double y = top + cell * static_cast<double>(r);
    out += text(left - 8, y + cell / 2 + 4, row_labels[r], "end");
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double x = left + cell * static_cast<double>(c);
      const double v = r < values.size() && c < values[r].size() ? values[r][c] : std::nan("");
      if (!std::isfinite(v)) continue;
      const double t = (v - lo) / (hi - lo);
      const int red = static_cast<int>(std::lround(255 * t));
      const int blue = static_cast<int>(std::lround(255 * (1 - t)));
      char fill[16];
      std::snprintf(fill, sizeof fill, "#%02x40%02x", red, blue);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
             "\" fill=\"" + fill + "\"/>\n";
      out += "<text x=\"" + num(x + cell / 2) + "\" y=\"" + num(y + cell / 2 + 4) +
             "\" text-anchor=\"middle\" fill=\"white\" font-size=\"10\">" + num(v) + "</text>\n";
    }
  }
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    out += text(left + cell * (static_cast<double>(c) + 0.5), top + cell * static_cast<double>(row_labels.size()) + 16,
                col_labels[c]);
  }
  return out + "</svg>\n";
}

}  // namespace erpaug
