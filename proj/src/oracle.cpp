#include "rissec/oracle.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace rissec::oracle {

namespace {

double fd_coordinate(const std::function<double(const VectorXd&)>& objective,
                     VectorXd theta, Eigen::Index m, double h, double lo,
                     double hi, bool& one_sided) {
  const double x = theta[m];
  double lo_pt = x - h, hi_pt = x + h;
  one_sided = false;
  if (lo_pt < lo) {
    lo_pt = x;
    one_sided = true;
  }
  if (hi_pt > hi) {
    hi_pt = x;
    one_sided = true;
  }
  if (!(hi_pt > lo_pt))
    throw std::domain_error("finite difference: interval too narrow for h");
  theta[m] = hi_pt;
  const double f_hi = objective(theta);
  theta[m] = lo_pt;
  const double f_lo = objective(theta);
  if (!std::isfinite(f_hi) || !std::isfinite(f_lo))
    throw numeric_error("finite difference: objective not finite");
  return (f_hi - f_lo) / (hi_pt - lo_pt);
}

}  // namespace

FdGradTheta fd_grad_theta(const std::function<double(const VectorXd&)>& objective,
                          const VectorXd& theta, const FdSpec& spec, double lo,
                          double hi) {
  FdGradTheta out;
  out.grad.resize(theta.size());
  out.one_sided.assign(static_cast<size_t>(theta.size()), false);
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    bool flag = false;
    out.grad[m] = fd_coordinate(objective, theta, m, spec.h, lo, hi, flag);
    out.one_sided[static_cast<size_t>(m)] = flag;
  }
  return out;
}

MatrixXcd fd_grad_precoder(const std::function<double(const MatrixXcd&)>& objective,
                           const MatrixXcd& t, const FdSpec& spec) {
  MatrixXcd g(t.rows(), t.cols());
  MatrixXcd probe = t;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const Complex orig = probe(i, j);
      probe(i, j) = orig + spec.h;
      const double fx_hi = objective(probe);
      probe(i, j) = orig - spec.h;
      const double fx_lo = objective(probe);
      probe(i, j) = orig + Complex(0.0, spec.h);
      const double fy_hi = objective(probe);
      probe(i, j) = orig - Complex(0.0, spec.h);
      const double fy_lo = objective(probe);
      probe(i, j) = orig;
      if (!std::isfinite(fx_hi) || !std::isfinite(fx_lo) ||
          !std::isfinite(fy_hi) || !std::isfinite(fy_lo))
        throw numeric_error("finite difference: objective not finite");
      const double dfdx = (fx_hi - fx_lo) / (2.0 * spec.h);
      const double dfdy = (fy_hi - fy_lo) / (2.0 * spec.h);
      g(i, j) = Complex(dfdx / 2.0, dfdy / 2.0);
    }
  }
  return g;
}

GridResult grid_search_theta(const std::function<double(const VectorXd&)>& objective,
                             const RisParams& p, int resolution, int m) {
  if (resolution < 2) throw config_error("grid search needs resolution >= 2");
  if (m < 1 || m > 3)
    throw config_error("grid search is a certificate tool; only 1 <= m <= 3 is supported");
  p.validate();

  const double lo = p.theta_min;
  const double span = p.theta_max - p.theta_min;
  const auto axis_value = [&](long idx) {
    return lo + span * static_cast<double>(idx) / (resolution - 1);
  };

  long inner_count = 1;
  for (int d = 1; d < m; ++d) inner_count *= resolution;

  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    long flat = -1;  // first-axis index * inner_count + inner index
  };
  std::vector<Best> per_first(static_cast<size_t>(resolution));

  // Parallel over the first axis; each chunk scans its inner block serially
  // and keeps the lowest flat index among ties.
#pragma omp parallel for schedule(static)
  for (int i0 = 0; i0 < resolution; ++i0) {
    VectorXd theta(m);
    theta[0] = axis_value(i0);
    Best best;
    for (long inner = 0; inner < inner_count; ++inner) {
      long rem = inner;
      for (int d = m - 1; d >= 1; --d) {
        theta[d] = axis_value(rem % resolution);
        rem /= resolution;
      }
      const double v = objective(theta);
      if (v > best.value) {
        best.value = v;
        best.flat = static_cast<long>(i0) * inner_count + inner;
      }
    }
    per_first[static_cast<size_t>(i0)] = best;
  }

  Best overall;
  for (const Best& b : per_first)
    if (b.value > overall.value) overall = b;  // fixed order => lowest index wins ties
  if (overall.flat < 0) throw numeric_error("grid search found no finite value");

  GridResult res;
  res.theta.resize(m);
  long rem = overall.flat;
  for (int d = m - 1; d >= 0; --d) {
    res.theta[d] = axis_value(rem % resolution);
    rem /= resolution;
  }
  res.value = overall.value;
  return res;
}

double log2_det_direct(const MatrixXcd& a) {
  if (a.rows() != a.cols()) throw config_error("determinant of a non-square matrix");
  const auto n = a.rows();
  if (n == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw config_error("direct determinant expects a Hermitian matrix");

  using XComplex = std::complex<long double>;
  std::vector<XComplex> lu(static_cast<size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      lu[static_cast<size_t>(i * n + j)] =
          XComplex(a(i, j).real(), a(i, j).imag());

  // Unpivoted elimination over long double complex arithmetic. For a
  // Hermitian matrix the k-th pivot equals the ratio of consecutive leading
  // principal minors, so the matrix is positive definite exactly when every
  // pivot is real and positive; pivoting would destroy that certificate and
  // is unnecessary on positive definite input.
  long double log_det = 0.0L;
  for (Eigen::Index k = 0; k < n; ++k) {
    const XComplex piv = lu[static_cast<size_t>(k * n + k)];
    if (!(std::real(piv) > 0.0L) ||
        std::abs(std::imag(piv)) >
            1e-9L * std::max<long double>(1.0L, std::abs(piv)))
      throw numeric_error("direct determinant: matrix is not positive definite");
    log_det += std::log(std::real(piv));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const XComplex f = lu[static_cast<size_t>(i * n + k)] / piv;
      lu[static_cast<size_t>(i * n + k)] = f;
      for (Eigen::Index j = k + 1; j < n; ++j)
        lu[static_cast<size_t>(i * n + j)] -= f * lu[static_cast<size_t>(k * n + j)];
    }
  }
  return static_cast<double>(log_det / std::log(2.0L));
}

double rate_direct(const MatrixXcd& h_eff, const MatrixXcd& t, double sigma2) {
  MatrixXcd a = MatrixXcd::Identity(h_eff.rows(), h_eff.rows());
  a.noalias() += h_eff * t * (h_eff * t).adjoint() / sigma2;
  return log2_det_direct(a);
}

}  // namespace rissec::oracle
