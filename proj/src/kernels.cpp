#include "rissec/kernels.hpp"

#include <cmath>

namespace rissec::kernels {

namespace {

void check_compose_dims(const MatrixXcd& direct, const MatrixXcd& ris_out,
                        const VectorXcd& phi, const MatrixXcd& ris_in) {
  if (ris_out.cols() != phi.size() || ris_in.rows() != phi.size() ||
      direct.rows() != ris_out.rows() || direct.cols() != ris_in.cols())
    throw config_error("effective-channel composition: dimension mismatch");
}

// One output entry: direct(i,j) + sum_m ris_out(i,m) phi(m) ris_in(m,j).
// Shared by the parallel kernel and its reference twin so both perform the
// identical floating-point reduction.
Complex compose_entry(const MatrixXcd& direct, const MatrixXcd& ris_out,
                      const VectorXcd& phi, const MatrixXcd& ris_in,
                      Eigen::Index i, Eigen::Index j) {
  Complex acc = direct(i, j);
  for (Eigen::Index m = 0; m < phi.size(); ++m)
    acc += ris_out(i, m) * phi[m] * ris_in(m, j);
  return acc;
}

Complex coupling_entry(const MatrixXcd& lhs, const MatrixXcd& rhs,
                       Eigen::Index m) {
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < lhs.cols(); ++k) acc += lhs(m, k) * rhs(k, m);
  return acc;
}

void reflection_entry(const VectorXd& theta, const RisParams& p,
                      Eigen::Index m, VectorXcd& phi, VectorXcd& dphi) {
  const double beta = amplitude_law(theta[m], p);
  const double slope = amplitude_slope(theta[m], p);
  const Complex rot = std::polar(1.0, theta[m]);
  phi[m] = beta * rot;
  dphi[m] = Complex(slope, beta) * rot;
}

}  // namespace

MatrixXcd compose_effective(const MatrixXcd& direct, const MatrixXcd& ris_out,
                            const VectorXcd& phi, const MatrixXcd& ris_in) {
  check_compose_dims(direct, ris_out, phi, ris_in);
  MatrixXcd out(direct.rows(), direct.cols());
  const Eigen::Index n = direct.size();
#pragma omp parallel for schedule(static)
  for (Eigen::Index e = 0; e < n; ++e) {
    const Eigen::Index i = e % direct.rows();
    const Eigen::Index j = e / direct.rows();
    out(i, j) = compose_entry(direct, ris_out, phi, ris_in, i, j);
  }
  return out;
}

VectorXcd coupling_diag(const MatrixXcd& lhs, const MatrixXcd& rhs) {
  if (lhs.cols() != rhs.rows() || lhs.rows() != rhs.cols())
    throw config_error("coupling diagonal: dimension mismatch");
  VectorXcd d(lhs.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < lhs.rows(); ++m)
    d[m] = coupling_entry(lhs, rhs, m);
  return d;
}

void reflection_batch(const VectorXd& theta, const RisParams& p, VectorXcd& phi,
                      VectorXcd& dphi) {
  phi.resize(theta.size());
  dphi.resize(theta.size());
#pragma omp parallel for schedule(static)
  for (Eigen::Index m = 0; m < theta.size(); ++m)
    reflection_entry(theta, p, m, phi, dphi);
}

namespace ref {

MatrixXcd compose_effective(const MatrixXcd& direct, const MatrixXcd& ris_out,
                            const VectorXcd& phi, const MatrixXcd& ris_in) {
  check_compose_dims(direct, ris_out, phi, ris_in);
  MatrixXcd out(direct.rows(), direct.cols());
  for (Eigen::Index j = 0; j < direct.cols(); ++j)
    for (Eigen::Index i = 0; i < direct.rows(); ++i)
      out(i, j) = compose_entry(direct, ris_out, phi, ris_in, i, j);
  return out;
}

VectorXcd coupling_diag(const MatrixXcd& lhs, const MatrixXcd& rhs) {
  if (lhs.cols() != rhs.rows() || lhs.rows() != rhs.cols())
    throw config_error("coupling diagonal: dimension mismatch");
  VectorXcd d(lhs.rows());
  for (Eigen::Index m = 0; m < lhs.rows(); ++m) d[m] = coupling_entry(lhs, rhs, m);
  return d;
}

void reflection_batch(const VectorXd& theta, const RisParams& p, VectorXcd& phi,
                      VectorXcd& dphi) {
  phi.resize(theta.size());
  dphi.resize(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m)
    reflection_entry(theta, p, m, phi, dphi);
}

}  // namespace ref

}  // namespace rissec::kernels
