#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rissec/stats.hpp"
#include "rissec/types.hpp"

using namespace rissec;

TEST_CASE("mean and standard error on a hand-computed sample") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::mean(xs) == doctest::Approx(2.5));
  // sample stddev = sqrt(5/3), stderr = sqrt(5/3)/2
  CHECK(stats::stderr_mean(xs) ==
        doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("degenerate samples") {
  CHECK_THROWS_AS(stats::mean({}), config_error);
  CHECK(stats::stderr_mean({}) == 0.0);
  CHECK(stats::stderr_mean({3.0}) == 0.0);
  CHECK(stats::stderr_mean({2.0, 2.0, 2.0}) == 0.0);
}

TEST_CASE("line fit recovers an exact line with r_squared = 1") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(-2.0 * xi + 5.0);
  const auto f = stats::fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line fit on noisy data reports partial r_squared") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{0.1, 0.9, 2.2, 2.8, 4.1};
  const auto f = stats::fit_line(x, y);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(f.r_squared > 0.98);
  CHECK(f.r_squared < 1.0);
}

TEST_CASE("flat y is a perfect horizontal fit") {
  const auto f = stats::fit_line({1.0, 2.0, 3.0}, {4.0, 4.0, 4.0});
  CHECK(f.slope == 0.0);
  CHECK(f.intercept == doctest::Approx(4.0));
  CHECK(f.r_squared == 1.0);
}

TEST_CASE("line fit input validation") {
  CHECK_THROWS_AS(stats::fit_line({1.0}, {1.0}), config_error);
  CHECK_THROWS_AS(stats::fit_line({1.0, 2.0}, {1.0}), config_error);
  CHECK_THROWS_AS(stats::fit_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}),
                  config_error);
}
