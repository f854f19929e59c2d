#pragma once

#include <string>
#include <vector>

namespace ipt::svg {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Polyline plot with axes, tick labels and an optional set of marked x
/// positions (drawn as vertical guides).
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, const std::vector<double>& marks = {});

/// Grouped bars: one group per category, one bar per value set.
std::string bar_plot(const std::string& title, const std::vector<std::string>& categories,
                     const std::vector<std::string>& set_names, const std::vector<std::vector<double>>& values);

/// Connected scatter of 2-D points (one PCA projection).
std::string scatter_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<double>& xs, const std::vector<double>& ys);

/// Three scatter panels side by side in one document.
std::string panels(const std::vector<std::string>& documents, double panel_width = 420, double panel_height = 320);

std::string escape(const std::string& text);

}  // namespace ipt::svg
