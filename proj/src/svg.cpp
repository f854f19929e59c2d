#include "ipt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ipt::svg {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 360;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 36;
constexpr double kBottom = 48;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
};

class Frame {
 public:
  Frame(Range x, Range y, double w = kWidth, double h = kHeight) : x_(x), y_(y), w_(w), h_(h) {}
  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (w_ - kLeft - kRight); }
  double py(double v) const { return h_ - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (h_ - kTop - kBottom); }

  std::string axes(const std::string& title, const std::string& xl, const std::string& yl) const {
    std::string out;
    out += "<text x=\"" + num(w_ / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
           "</text>\n";
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(h_ - kBottom) + "\" x2=\"" + num(w_ - kRight) + "\" y2=\"" +
           num(h_ - kBottom) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
           num(h_ - kBottom) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(h_ - kBottom + 16) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + tick(xv) + "</text>\n";
      out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(yv) + 3) + "\" text-anchor=\"end\" font-size=\"10\">" +
             tick(yv) + "</text>\n";
    }
    out += "<text x=\"" + num(w_ / 2) + "\" y=\"" + num(h_ - 10) + "\" text-anchor=\"middle\" font-size=\"12\">" +
           escape(xl) + "</text>\n";
    out += "<text x=\"14\" y=\"" + num(h_ / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
           num(h_ / 2) + ")\">" + escape(yl) + "</text>\n";
    return out;
  }

 private:
  Range x_;
  Range y_;
  double w_;
  double h_;
};

std::string open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " +
         num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, const std::vector<double>& marks) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double x : s.xs) xr.add(x);
    for (double y : s.ys) yr.add(y);
  }
  xr.finish();
  yr.finish();
  const Frame f(xr, yr);
  std::string out = open(kWidth, kHeight) + f.axes(title, x_label, y_label);
  for (double m : marks) {
    out += "<line x1=\"" + num(f.px(m)) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(f.px(m)) + "\" y2=\"" +
           num(kHeight - kBottom) + "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3,3\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    std::string points;
    for (std::size_t k = 0; k < std::min(s.xs.size(), s.ys.size()); ++k) {
      points += (points.empty() ? "" : " ") + num(f.px(s.xs[k])) + "," + num(f.py(s.ys[k]));
    }
    const char* color = kPalette[i % std::size(kPalette)];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight - 4) + "\" y=\"" + num(kTop + 14.0 * static_cast<double>(i)) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + color + "\">" + escape(s.name) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::string bar_plot(const std::string& title, const std::vector<std::string>& categories,
                     const std::vector<std::string>& set_names, const std::vector<std::vector<double>>& values) {
  Range yr;
  yr.add(0.0);
  for (const auto& set : values)
    for (double v : set) yr.add(v);
  yr.finish();
  const double width = std::max(kWidth, kLeft + kRight + 36.0 * static_cast<double>(categories.size()));
  const double height = kHeight + 60;
  Range xr;
  xr.add(0.0);
  xr.add(static_cast<double>(std::max<std::size_t>(categories.size(), 1)));
  const Frame f(xr, yr, width, height);
  std::string out = open(width, height);
  out += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(f.py(0)) + "\" x2=\"" + num(width - kRight) + "\" y2=\"" +
         num(f.py(0)) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(f.py(yv) + 3) + "\" text-anchor=\"end\" font-size=\"10\">" +
           tick(yv) + "</text>\n";
  }
  const double sets = static_cast<double>(std::max<std::size_t>(values.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double slot = f.px(static_cast<double>(c + 1)) - f.px(static_cast<double>(c));
    const double bar = 0.8 * slot / sets;
    for (std::size_t s = 0; s < values.size(); ++s) {
      if (c >= values[s].size()) continue;
      const double v = values[s][c];
      const double x = f.px(static_cast<double>(c)) + 0.1 * slot + bar * static_cast<double>(s);
      const double y0 = f.py(std::max(v, 0.0));
      const double y1 = f.py(std::min(v, 0.0));
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y0) + "\" width=\"" + num(bar) + "\" height=\"" + num(y1 - y0) +
             "\" fill=\"" + kPalette[s % std::size(kPalette)] + "\"/>\n";
    }
    const double cx = f.px(static_cast<double>(c) + 0.5);
    const double cy = f.py(yr.lo) + 12;
    out += "<text x=\"" + num(cx) + "\" y=\"" + num(cy) + "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-45 " +
           num(cx) + " " + num(cy) + ")\">" + escape(categories[c]) + "</text>\n";
  }
  for (std::size_t s = 0; s < set_names.size(); ++s) {
    out += "<text x=\"" + num(width - kRight - 4) + "\" y=\"" + num(kTop + 14.0 * static_cast<double>(s)) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + kPalette[s % std::size(kPalette)] + "\">" +
           escape(set_names[s]) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& xs, const std::vector<double>& ys) {
  Range xr, yr;
  for (double x : xs) xr.add(x);
  for (double y : ys) yr.add(y);
  xr.finish();
  yr.finish();
  const Frame f(xr, yr);
  std::string out = open(kWidth, kHeight) + f.axes(title, x_label, y_label);
  std::string points;
  for (std::size_t k = 0; k < std::min(xs.size(), ys.size()); ++k) {
    points += (points.empty() ? "" : " ") + num(f.px(xs[k])) + "," + num(f.py(ys[k]));
  }
  out += "<polyline fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\" points=\"" + points + "\"/>\n";
  const std::size_t n = std::min(xs.size(), ys.size());
  for (std::size_t k = 0; k < n; ++k) {
    // Colour runs along the sample order so the loop direction is visible.
    const int hue = n > 1 ? static_cast<int>(300.0 * static_cast<double>(k) / static_cast<double>(n - 1)) : 0;
    out += "<circle cx=\"" + num(f.px(xs[k])) + "\" cy=\"" + num(f.py(ys[k])) + "\" r=\"2.5\" fill=\"hsl(" +
           std::to_string(hue) + ",70%,45%)\"/>\n";
  }
  return out + "</svg>\n";
}

std::string panels(const std::vector<std::string>& documents, double panel_width, double panel_height) {
  const double w = panel_width * static_cast<double>(documents.size());
  std::string out = open(w, panel_height);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    std::string inner = documents[i];
    // Nest each document as a positioned child svg scaled into its panel.
    const auto pos = inner.find("<svg ");
    if (pos != std::string::npos) {
      inner.replace(pos, 5, "<svg x=\"" + num(panel_width * static_cast<double>(i)) + "\" y=\"0\" ");
      const auto wpos = inner.find("width=\"", pos);
      const auto wend = inner.find('"', wpos + 7);
      inner.replace(wpos, wend - wpos + 1, "width=\"" + num(panel_width) + "\"");
      const auto hpos = inner.find("height=\"", pos);
      const auto hend = inner.find('"', hpos + 8);
      inner.replace(hpos, hend - hpos + 1, "height=\"" + num(panel_height) + "\"");
    }
    out += inner;
  }
  return out + "</svg>\n";
}

}  // namespace ipt::svg
