#include "normsim/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "normsim/csvio.hpp"

namespace normsim {
namespace {

constexpr int kW = 640, kH = 420;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

std::ofstream open_svg(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  double xmin = std::numeric_limits<double>::max(), xmax = std::numeric_limits<double>::lowest();
  double ymin = xmin, ymax = xmax;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmin > xmax) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double plot_w = kW - kMarginL - kMarginR, plot_h = kH - kMarginT - kMarginB;
  auto px = [&](double x) { return kMarginL + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kH - kMarginB - (y - ymin) / (ymax - ymin) * plot_h; };

  auto out = open_svg(path);
  out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << kH - kMarginB + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(xv) << "</text>\n";
    out << "<text x=\"" << kMarginL - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(yv) << "</text>\n";
  }
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << kH / 2 << ")\">" << y_label << "</text>\n";

  for (const auto& s : series) {
    if (s.x.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
        << (s.thick ? 2.5 : 0.8) << "\" opacity=\"" << s.opacity << "\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_ternary_plot(const std::string& path, const std::string& title,
                        const std::vector<TernarySample>& samples) {
  // Equilateral triangle, corners: red left, green right, blue top.
  const double x0 = 80, x1 = kW - 80, ybase = kH - 70, ytop = 70;
  auto out = open_svg(path);
  out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  const double xc = (x0 + x1) / 2;
  out << "<polygon fill=\"none\" stroke=\"#444\" points=\"" << x0 << ',' << ybase << ' ' << x1
      << ',' << ybase << ' ' << xc << ',' << ytop << "\"/>\n";
  out << "<text x=\"" << x0 - 10 << "\" y=\"" << ybase + 18
      << "\" font-size=\"12\" fill=\"#c22\">r</text>\n";
  out << "<text x=\"" << x1 + 4 << "\" y=\"" << ybase + 18
      << "\" font-size=\"12\" fill=\"#2a2\">g</text>\n";
  out << "<text x=\"" << xc << "\" y=\"" << ytop - 8
      << "\" text-anchor=\"middle\" font-size=\"12\" fill=\"#22c\">b</text>\n";
  out << "<text x=\"" << xc << "\" y=\"" << (ybase + ybase + ytop) / 3.0
      << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#888\">+</text>\n";
  for (const auto& s : samples) {
    const double r = s.shares[0], g = s.shares[1], b = s.shares[2];
    const double x = x0 * r + x1 * g + xc * b;
    const double y = ybase * (r + g) + ytop * b;
    const int gray = static_cast<int>(200 - 170 * std::clamp(s.shade, 0.0, 1.0));
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.4\" fill=\"rgb(" << gray << ','
        << gray << ',' << gray << ")\" opacity=\"0.8\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace normsim
