#include "rissec/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rissec::plot {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) throw config_error("nice_ticks: empty range");
  if (target < 2) target = 2;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step;
  if (norm <= 1.5)
    step = 1.0;
  else if (norm <= 3.5)
    step = 2.0;
  else if (norm <= 7.5)
    step = 5.0;
  else
    step = 10.0;
  step *= mag;
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double t = first; t <= hi + 1e-9 * step; t += step) {
    // Snap values that should be zero exactly, so labels print as "0".
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

PlotData build_plot_data(const PlotSpec& spec, const Layout& layout) {
  if (spec.series.empty()) throw config_error("plot: no series");
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size())
      throw config_error("plot: series '" + s.label + "' x/y length mismatch");
    if (!s.yerr.empty() && s.yerr.size() != s.y.size())
      throw config_error("plot: series '" + s.label + "' error bar length mismatch");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        throw config_error("plot: non-finite point in series '" + s.label + "'");
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      const double e = s.yerr.empty() ? 0.0 : s.yerr[i];
      y_lo = std::min(y_lo, s.y[i] - e);
      y_hi = std::max(y_hi, s.y[i] + e);
    }
  }
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo))
    throw config_error("plot: no data points");
  // Pad degenerate ranges so a flat series still renders.
  if (x_hi - x_lo <= 0) {
    const double pad = std::max(1.0, std::abs(x_lo)) * 0.5;
    x_lo -= pad;
    x_hi += pad;
  }
  if (y_hi - y_lo <= 0) {
    const double pad = std::max(1.0, std::abs(y_lo)) * 0.5;
    y_lo -= pad;
    y_hi += pad;
  } else {
    const double pad = (y_hi - y_lo) * 0.06;
    y_lo -= pad;
    y_hi += pad;
  }

  PlotData data;
  data.x_min = x_lo;
  data.x_max = x_hi;
  data.y_min = y_lo;
  data.y_max = y_hi;
  data.x_ticks = nice_ticks(x_lo, x_hi, 6);
  data.y_ticks = nice_ticks(y_lo, y_hi, 6);

  const double plot_w = layout.width - layout.margin_left - layout.margin_right;
  const double plot_h = layout.height - layout.margin_top - layout.margin_bottom;
  if (plot_w <= 0 || plot_h <= 0) throw config_error("plot: margins exceed canvas");
  auto to_px = [&](double x) {
    return layout.margin_left + (x - data.x_min) / (data.x_max - data.x_min) * plot_w;
  };
  auto to_py = [&](double y) {
    return layout.margin_top + (data.y_max - y) / (data.y_max - data.y_min) * plot_h;
  };

  for (const auto& s : spec.series) {
    PlotData::SeriesPixels sp;
    sp.label = s.label;
    for (size_t i = 0; i < s.x.size(); ++i) {
      sp.px.push_back(to_px(s.x[i]));
      sp.py.push_back(to_py(s.y[i]));
      if (!s.yerr.empty()) {
        sp.err_top_py.push_back(to_py(s.y[i] + s.yerr[i]));
        sp.err_bottom_py.push_back(to_py(s.y[i] - s.yerr[i]));
      }
    }
    data.series.push_back(std::move(sp));
  }
  return data;
}

std::string render_svg(const PlotSpec& spec, const Layout& layout) {
  const PlotData data = build_plot_data(spec, layout);
  const double left = layout.margin_left;
  const double top = layout.margin_top;
  const double right = layout.width - layout.margin_right;
  const double bottom = layout.height - layout.margin_bottom;

  const double plot_w = right - left;
  const double plot_h = bottom - top;
  auto to_px = [&](double x) {
    return left + (x - data.x_min) / (data.x_max - data.x_min) * plot_w;
  };
  auto to_py = [&](double y) {
    return top + (data.y_max - y) / (data.y_max - data.y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(layout.width)
      << "\" height=\"" << fmt(layout.height) << "\" viewBox=\"0 0 "
      << fmt(layout.width) << " " << fmt(layout.height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Grid lines and tick labels.
  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : data.x_ticks)
    svg << "<line x1=\"" << fmt(to_px(t)) << "\" y1=\"" << fmt(top) << "\" x2=\""
        << fmt(to_px(t)) << "\" y2=\"" << fmt(bottom) << "\"/>\n";
  for (double t : data.y_ticks)
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(to_py(t)) << "\" x2=\""
        << fmt(right) << "\" y2=\"" << fmt(to_py(t)) << "\"/>\n";
  svg << "</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
  for (double t : data.x_ticks)
    svg << "<text x=\"" << fmt(to_px(t)) << "\" y=\"" << fmt(bottom + 18)
        << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  for (double t : data.y_ticks)
    svg << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(to_py(t) + 4)
        << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
  svg << "</g>\n";

  // Axes frame.
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  // Series: error bars first (underneath), then polyline and markers.
  for (size_t si = 0; si < data.series.size(); ++si) {
    const auto& sp = data.series[si];
    const char* color = kPalette[si % kPaletteSize];
    if (!sp.err_top_py.empty()) {
      svg << "<g stroke=\"" << color << "\" stroke-width=\"1\">\n";
      for (size_t i = 0; i < sp.px.size(); ++i) {
        svg << "<line x1=\"" << fmt(sp.px[i]) << "\" y1=\"" << fmt(sp.err_top_py[i])
            << "\" x2=\"" << fmt(sp.px[i]) << "\" y2=\"" << fmt(sp.err_bottom_py[i])
            << "\"/>\n";
        for (double ey : {sp.err_top_py[i], sp.err_bottom_py[i]})
          svg << "<line x1=\"" << fmt(sp.px[i] - 3) << "\" y1=\"" << fmt(ey)
              << "\" x2=\"" << fmt(sp.px[i] + 3) << "\" y2=\"" << fmt(ey) << "\"/>\n";
      }
      svg << "</g>\n";
    }
    if (sp.px.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < sp.px.size(); ++i) {
        if (i) svg << ' ';
        svg << fmt(sp.px[i]) << ',' << fmt(sp.py[i]);
      }
      svg << "\"/>\n";
    }
    for (size_t i = 0; i < sp.px.size(); ++i)
      svg << "<circle cx=\"" << fmt(sp.px[i]) << "\" cy=\"" << fmt(sp.py[i])
          << "\" r=\"2.7\" fill=\"" << color << "\"/>\n";
  }

  // Legend, top-right inside the frame.
  {
    const double lx = right - 170, ly = top + 10;
    svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (size_t si = 0; si < data.series.size(); ++si) {
      const double row_y = ly + 16 * static_cast<double>(si);
      svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(row_y) << "\" x2=\""
          << fmt(lx + 22) << "\" y2=\"" << fmt(row_y) << "\" stroke=\""
          << kPalette[si % kPaletteSize] << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(row_y + 4)
          << "\" fill=\"#333333\">" << escape_xml(data.series[si].label)
          << "</text>\n";
    }
    svg << "</g>\n";
  }

  // Titles and axis labels.
  svg << "<g font-family=\"sans-serif\" fill=\"#111111\">\n";
  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(top - 14)
      << "\" font-size=\"15\" text-anchor=\"middle\">" << escape_xml(spec.title)
      << "</text>\n";
  svg << "<text x=\"" << fmt((left + right) / 2) << "\" y=\""
      << fmt(layout.height - 16) << "\" font-size=\"13\" text-anchor=\"middle\">"
      << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt((top + bottom) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt((top + bottom) / 2) << ")\">" << escape_xml(spec.y_label)
      << "</text>\n";
  svg << "</g>\n";

  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const PlotSpec& spec, const std::string& path, const Layout& layout) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << render_svg(spec, layout);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rissec::plot
