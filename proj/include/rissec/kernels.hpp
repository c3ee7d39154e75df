// Data-parallel kernels over the M reflecting elements, with serial
// reference twins under kernels::ref.
//
// Every parallel loop assigns disjoint output elements and keeps each
// reduction inside a single iteration, so the result is bit-identical to
// the serial twin for any thread count or schedule. Tests assert exactly
// that, and tools/bench_kernels compares the timings.
#pragma once

#include "rissec/ris_model.hpp"
#include "rissec/types.hpp"

namespace rissec::kernels {

// direct + ris_out * diag(phi) * ris_in, without forming diag(phi).
// Shapes: direct N×K, ris_out N×M, phi M, ris_in M×K.
MatrixXcd compose_effective(const MatrixXcd& direct, const MatrixXcd& ris_out,
                            const VectorXcd& phi, const MatrixXcd& ris_in);

// d[m] = lhs.row(m) · rhs.col(m): the main diagonal of lhs*rhs without
// forming the M×M product. Shapes: lhs M×K, rhs K×M.
VectorXcd coupling_diag(const MatrixXcd& lhs, const MatrixXcd& rhs);

// Per-element reflection coefficient and its angle derivative:
// phi[m] = beta(theta[m]) e^{i theta[m]},
// dphi[m] = (beta'(theta[m]) + i beta(theta[m])) e^{i theta[m]}.
// Angles are taken as-is; bound checking is the caller's concern.
void reflection_batch(const VectorXd& theta, const RisParams& p, VectorXcd& phi,
                      VectorXcd& dphi);

namespace ref {

MatrixXcd compose_effective(const MatrixXcd& direct, const MatrixXcd& ris_out,
                            const VectorXcd& phi, const MatrixXcd& ris_in);
VectorXcd coupling_diag(const MatrixXcd& lhs, const MatrixXcd& rhs);
void reflection_batch(const VectorXd& theta, const RisParams& p, VectorXcd& phi,
                      VectorXcd& dphi);

}  // namespace ref

}  // namespace rissec::kernels
