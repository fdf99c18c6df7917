#pragma once

#include <array>
#include <string>
#include <vector>

namespace normsim {

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  bool thick = false;  // thick mean line vs thin per-seed line
  std::string color = "#1f77b4";
  double opacity = 1.0;
};

// Learning-curve style line plot: thin per-seed lines plus a thick mean.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

// Ternary scatter of (r, g, b) shares; shade encodes progression (0 = light,
// 1 = dark).
struct TernarySample {
  std::array<double, 3> shares;
  double shade = 1.0;
};
void write_ternary_plot(const std::string& path, const std::string& title,
                        const std::vector<TernarySample>& samples);

}  // namespace normsim
