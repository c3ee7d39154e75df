// Independent verification machinery used only by tests: central finite
// differences, extended-precision determinant evaluation, and exhaustive
// grid search over small angle spaces. No solver code path is reused here.
#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "rissec/ris_model.hpp"
#include "rissec/types.hpp"

namespace rissec::oracle {

struct FdSpec {
  double h = 1e-6;        // central-difference step
  double rel_tol = 1e-5;  // acceptance threshold used by gradient tests
};

struct FdGradTheta {
  VectorXd grad;
  std::vector<bool> one_sided;  // coordinate hit a bound; order-h accuracy
};

// Central differences per coordinate. When theta[m] +/- h would leave
// [lo, hi], the difference degrades to one-sided and is flagged.
FdGradTheta fd_grad_theta(const std::function<double(const VectorXd&)>& objective,
                          const VectorXd& theta, const FdSpec& spec,
                          double lo = -std::numeric_limits<double>::infinity(),
                          double hi = std::numeric_limits<double>::infinity());

// Conjugate-cogradient assembly from independent real/imaginary
// perturbations: for f real-valued, df/dT*_{ij} = (df/dx + i df/dy)/2 with
// x = Re T_ij, y = Im T_ij. This is the convention of the analytic
// precoder gradient, so the two are directly comparable.
MatrixXcd fd_grad_precoder(const std::function<double(const MatrixXcd&)>& objective,
                           const MatrixXcd& t, const FdSpec& spec);

struct GridResult {
  VectorXd theta;
  double value;
};

// Exhaustive maximization on a uniform resolution^m grid over
// [theta_min, theta_max]^m. Refuses m > 3 (cost guard). Chunks of the first
// axis run in parallel; the best point is combined in fixed chunk order
// with lowest-index tie-breaking, so the result is thread-count independent.
GridResult grid_search_theta(const std::function<double(const VectorXd&)>& objective,
                             const RisParams& p, int resolution, int m);

// log2 det(a) for a Hermitian positive-definite matrix, evaluated in
// extended precision by direct unpivoted elimination — an independent route
// from the library's Cholesky-based rate computation. Rejects non-Hermitian
// input (config_error); rejects matrices that are not positive definite
// (numeric_error), certified by the elimination pivots, which equal ratios
// of leading principal minors and must all be real and positive.
double log2_det_direct(const MatrixXcd& a);

// log2 det(I + H T T^H H^H / sigma2) through the direct determinant route.
double rate_direct(const MatrixXcd& h_eff, const MatrixXcd& t, double sigma2);

}  // namespace rissec::oracle
