#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rissec/svg_plot.hpp"
#include "rissec/types.hpp"

using namespace rissec;
using plot::Layout;
using plot::PlotSpec;
using plot::Series;

TEST_CASE("tick generation picks 1/2/5 steps and snaps zero") {
  const auto t = plot::nice_ticks(0.0, 10.0, 6);
  REQUIRE(t.size() >= 5);
  CHECK(t.front() == 0.0);
  CHECK(t[1] == doctest::Approx(2.0));
  CHECK(t.back() == doctest::Approx(10.0));

  const auto n = plot::nice_ticks(-1.0, 1.0, 4);
  bool has_exact_zero = false;
  for (double v : n)
    if (v == 0.0) has_exact_zero = true;
  CHECK(has_exact_zero);

  CHECK_THROWS_AS(plot::nice_ticks(1.0, 1.0, 5), config_error);
}

TEST_CASE("data extremes land on the plot frame edges") {
  PlotSpec spec;
  spec.series.push_back({"a", {2.0, 4.0, 10.0}, {1.0, 3.0, 2.0}, {}});
  const Layout layout;
  const auto data = plot::build_plot_data(spec, layout);
  CHECK(data.x_min == 2.0);
  CHECK(data.x_max == 10.0);
  REQUIRE(data.series.size() == 1);
  const auto& px = data.series[0].px;
  CHECK(px.front() == doctest::Approx(layout.margin_left));
  CHECK(px.back() == doctest::Approx(layout.width - layout.margin_right));
  // monotone x maps to monotone pixels
  CHECK(px[0] < px[1]);
  CHECK(px[1] < px[2]);
  // larger y is higher on screen: smaller pixel y
  const auto& py = data.series[0].py;
  CHECK(py[1] < py[0]);
  CHECK(py[1] < py[2]);
  // the y range is padded, so no point touches the frame exactly
  CHECK(py[1] > layout.margin_top);
  CHECK(py[0] < layout.height - layout.margin_bottom);
}

TEST_CASE("error bars straddle their center point") {
  PlotSpec spec;
  spec.series.push_back({"a", {0.0, 1.0}, {1.0, 2.0}, {0.2, 0.4}});
  const auto data = plot::build_plot_data(spec, {});
  REQUIRE(data.series[0].err_top_py.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(data.series[0].err_top_py[i] < data.series[0].py[i]);
    CHECK(data.series[0].err_bottom_py[i] > data.series[0].py[i]);
  }
  // bar endpoints stay inside the padded frame
  const Layout layout;
  CHECK(data.series[0].err_top_py[1] >= layout.margin_top - 1e-9);
}

TEST_CASE("degenerate inputs are padded or rejected") {
  PlotSpec one;
  one.series.push_back({"pt", {3.0}, {5.0}, {}});
  const auto data = plot::build_plot_data(one, {});
  CHECK(data.x_min < 3.0);
  CHECK(data.x_max > 3.0);
  CHECK(data.y_min < 5.0);
  CHECK(data.y_max > 5.0);

  PlotSpec empty;
  CHECK_THROWS_AS(plot::build_plot_data(empty, {}), config_error);

  PlotSpec no_points;
  no_points.series.push_back({"a", {}, {}, {}});
  CHECK_THROWS_AS(plot::build_plot_data(no_points, {}), config_error);

  PlotSpec ragged;
  ragged.series.push_back({"a", {1.0, 2.0}, {1.0}, {}});
  CHECK_THROWS_AS(plot::build_plot_data(ragged, {}), config_error);

  PlotSpec badbar;
  badbar.series.push_back({"a", {1.0, 2.0}, {1.0, 2.0}, {0.1}});
  CHECK_THROWS_AS(plot::build_plot_data(badbar, {}), config_error);

  PlotSpec inf;
  inf.series.push_back(
      {"a", {1.0, std::numeric_limits<double>::infinity()}, {1.0, 2.0}, {}});
  CHECK_THROWS_AS(plot::build_plot_data(inf, {}), config_error);
}

TEST_CASE("rendered SVG contains the expected marks and escapes labels") {
  PlotSpec spec;
  spec.title = "rates a<b & c";
  spec.x_label = "elements";
  spec.y_label = "bits";
  spec.series.push_back({"first \"series\"", {1.0, 2.0, 3.0}, {1.0, 4.0, 2.0}, {0.1, 0.2, 0.1}});
  spec.series.push_back({"single", {2.0}, {3.0}, {}});
  const std::string svg = plot::render_svg(spec, {});

  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);  // the 3-point series
  CHECK(svg.find("<circle") != std::string::npos);    // markers incl. the single point
  CHECK(svg.find("rates a&lt;b &amp; c") != std::string::npos);
  CHECK(svg.find("first &quot;series&quot;") != std::string::npos);
  CHECK(svg.find("a<b") == std::string::npos);  // raw text never leaks
  CHECK(svg.find("elements") != std::string::npos);
  CHECK(svg.find("bits") != std::string::npos);

  // deterministic output
  CHECK(plot::render_svg(spec, {}) == svg);
}

TEST_CASE("a flat series still renders with a padded vertical range") {
  PlotSpec spec;
  spec.series.push_back({"flat", {1.0, 2.0, 3.0}, {4.0, 4.0, 4.0}, {}});
  const auto data = plot::build_plot_data(spec, {});
  CHECK(data.y_min < 4.0);
  CHECK(data.y_max > 4.0);
  const std::string svg = plot::render_svg(spec, {});
  CHECK(svg.find("<polyline") != std::string::npos);
}
