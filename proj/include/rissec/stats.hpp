// Small statistics helpers: sample mean, standard error, least-squares line fit.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rissec/types.hpp"

namespace rissec::stats {

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw config_error("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Standard error of the mean (sample stddev / sqrt(n)); zero for n < 2.
inline double stderr_mean(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) /
         std::sqrt(static_cast<double>(n));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = slope * x + intercept with coefficient of
// determination. Degenerate x spans throw; a flat y yields r_squared = 1
// when the fit matches exactly.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw config_error("fit_line needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw config_error("fit_line: x values are all identical");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy <= 0.0) {
    f.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (f.slope * x[i] + f.intercept);
      ss_res += e * e;
    }
    f.r_squared = 1.0 - ss_res / syy;
  }
  return f;
}

}  // namespace rissec::stats
