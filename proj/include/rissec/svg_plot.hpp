// Minimal self-contained SVG line-plot writer: multiple series, optional
// error bars, linear axes with rounded ticks, and a legend. The geometry
// pass is exposed separately so tests can assert on coordinates without
// parsing markup.
#pragma once

#include <string>
#include <vector>

#include "rissec/types.hpp"

namespace rissec::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;  // empty, or one half-width per point
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct Layout {
  double width = 720;
  double height = 460;
  double margin_left = 78;
  double margin_right = 18;
  double margin_top = 40;
  double margin_bottom = 64;
};

// Resolved geometry: data ranges, tick positions (data units), and the
// pixel coordinates every mark will be drawn at.
struct PlotData {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::vector<double> x_ticks;
  std::vector<double> y_ticks;
  struct SeriesPixels {
    std::string label;
    std::vector<double> px;
    std::vector<double> py;
    std::vector<double> err_top_py;     // empty when the series has no bars
    std::vector<double> err_bottom_py;
  };
  std::vector<SeriesPixels> series;
};

// Round to 1/2/5 x 10^k tick spacing covering [lo, hi] with roughly
// `target` intervals.
std::vector<double> nice_ticks(double lo, double hi, int target);

PlotData build_plot_data(const PlotSpec& spec, const Layout& layout = {});

std::string render_svg(const PlotSpec& spec, const Layout& layout = {});

void write_svg(const PlotSpec& spec, const std::string& path,
               const Layout& layout = {});

}  // namespace rissec::plot
