#include "rissec/secrecy.hpp"

#include <cmath>
#include <numbers>

#include "rissec/kernels.hpp"

namespace rissec {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log2 det(A) for Hermitian positive definite A, from the Cholesky factor's
// diagonal.
double log2_det_pd(const MatrixXcd& a, const char* what) {
  const Eigen::LLT<MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success)
    throw numeric_error(std::string(what) + ": matrix is not numerically positive definite");
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::log(std::real(l(i, i)));
  // The factorization's pivot test cannot flag NaN entries (every NaN
  // comparison is false), so overflowed inputs are caught here instead of
  // leaking non-finite rates into results.
  if (!std::isfinite(acc))
    throw numeric_error(std::string(what) + ": log-determinant is not finite");
  return 2.0 * acc / kLn2;
}

void check_link_dims(const MatrixXcd& h_eff, const MatrixXcd& t) {
  if (h_eff.cols() != t.rows())
    throw config_error("rate: channel/precoder dimension mismatch");
}

// A = I + (H T)(H T)^H / sigma2 for one receiver, kept factored for solves.
struct ReceiverNormal {
  MatrixXcd p;  // H T
  Eigen::LLT<MatrixXcd> llt;

  ReceiverNormal(const MatrixXcd& h_eff, const MatrixXcd& t, double sigma2) {
    check_link_dims(h_eff, t);
    p = h_eff * t;
    MatrixXcd a = MatrixXcd::Identity(h_eff.rows(), h_eff.rows());
    a.noalias() += p * p.adjoint() / sigma2;
    llt.compute(a);
    if (llt.info() != Eigen::Success)
      throw numeric_error("receiver normal matrix is not positive definite");
  }
};

}  // namespace

double rate(const MatrixXcd& h_eff, const MatrixXcd& t, double sigma2) {
  check_link_dims(h_eff, t);
  if (!(sigma2 > 0.0)) throw config_error("rate: noise power must be positive");
  const MatrixXcd p = h_eff * t;
  // det(I + P P^H / s2) = det(I + P^H P / s2): factor the smaller Gram.
  if (p.cols() <= p.rows()) {
    MatrixXcd g = MatrixXcd::Identity(p.cols(), p.cols());
    g.noalias() += p.adjoint() * p / sigma2;
    return log2_det_pd(g, "rate");
  }
  MatrixXcd g = MatrixXcd::Identity(p.rows(), p.rows());
  g.noalias() += p * p.adjoint() / sigma2;
  return log2_det_pd(g, "rate");
}

RateBundle secrecy_rate(const EffectiveChannels& eff, const MatrixXcd& t,
                        const SystemConfig& cfg) {
  RateBundle rb;
  rb.rate_rx = rate(eff.to_rx, t, cfg.noise_rx);
  rb.rate_eve = rate(eff.to_eve, t, cfg.noise_eve);
  rb.secrecy = rb.rate_rx - rb.rate_eve;
  return rb;
}

RateBundle secrecy_rate(const ChannelSet& ch, const RisState& state,
                        const MatrixXcd& t, const SystemConfig& cfg) {
  return secrecy_rate(effective_channels(ch, state.phi), t, cfg);
}

MatrixXcd secrecy_grad_precoder(const EffectiveChannels& eff, const MatrixXcd& t,
                                const SystemConfig& cfg) {
  const ReceiverNormal rx(eff.to_rx, t, cfg.noise_rx);
  const ReceiverNormal eve(eff.to_eve, t, cfg.noise_eve);
  // H^H A^{-1} (H T) / s2 per receiver, inverses applied as solves.
  MatrixXcd g = eff.to_rx.adjoint() * rx.llt.solve(rx.p) / cfg.noise_rx;
  g.noalias() -= eff.to_eve.adjoint() * eve.llt.solve(eve.p) / cfg.noise_eve;
  return g / kLn2;
}

namespace {

// diag[ (tx_ris T) Z ] where Z = Pb^H Yb / s2b - Pe^H Ye / s2e collects both
// receivers' small-side factors; the only M-sized products are the outer
// tx_ris*T and the per-element coupling diagonal.
VectorXcd theta_coupling(const ChannelSet& ch, const EffectiveChannels& eff,
                         const MatrixXcd& t, const SystemConfig& cfg,
                         bool through_normal_inverse) {
  const MatrixXcd u = ch.tx_ris * t;  // M x n_streams
  MatrixXcd z;
  if (through_normal_inverse) {
    const ReceiverNormal rx(eff.to_rx, t, cfg.noise_rx);
    const ReceiverNormal eve(eff.to_eve, t, cfg.noise_eve);
    z = rx.p.adjoint() * rx.llt.solve(ch.ris_rx) / cfg.noise_rx;
    z.noalias() -= eve.p.adjoint() * eve.llt.solve(ch.ris_eve) / cfg.noise_eve;
  } else {
    z = (eff.to_rx * t).adjoint() * ch.ris_rx / cfg.noise_rx;
    z.noalias() -= (eff.to_eve * t).adjoint() * ch.ris_eve / cfg.noise_eve;
  }
  return kernels::coupling_diag(u, z);  // n_streams-wide inner products
}

}  // namespace

VectorXd secrecy_grad_theta(const ChannelSet& ch, const EffectiveChannels& eff,
                            const RisState& state, const RisParams& p,
                            const MatrixXcd& t, const SystemConfig& cfg) {
  VectorXcd phi, dphi;
  kernels::reflection_batch(state.theta, p, phi, dphi);
  const VectorXcd d = theta_coupling(ch, eff, t, cfg, true);
  return (2.0 / kLn2) * (dphi.array() * d.array()).real();
}

VectorXd secrecy_grad_theta(const ChannelSet& ch, const RisState& state,
                            const RisParams& p, const MatrixXcd& t,
                            const SystemConfig& cfg) {
  return secrecy_grad_theta(ch, effective_channels(ch, state.phi), state, p, t,
                            cfg);
}

double channel_power_diff(const EffectiveChannels& eff, const MatrixXcd& t,
                          const SystemConfig& cfg) {
  check_link_dims(eff.to_rx, t);
  check_link_dims(eff.to_eve, t);
  return (eff.to_rx * t).squaredNorm() / cfg.noise_rx -
         (eff.to_eve * t).squaredNorm() / cfg.noise_eve;
}

double channel_power_diff(const ChannelSet& ch, const RisState& state,
                          const MatrixXcd& t, const SystemConfig& cfg) {
  return channel_power_diff(effective_channels(ch, state.phi), t, cfg);
}

VectorXd pdiff_grad_theta(const ChannelSet& ch, const EffectiveChannels& eff,
                          const RisState& state, const RisParams& p,
                          const MatrixXcd& t, const SystemConfig& cfg) {
  VectorXcd phi, dphi;
  kernels::reflection_batch(state.theta, p, phi, dphi);
  const VectorXcd d = theta_coupling(ch, eff, t, cfg, false);
  return 2.0 * (dphi.array() * d.array()).real();
}

VectorXd pdiff_grad_theta(const ChannelSet& ch, const RisState& state,
                          const RisParams& p, const MatrixXcd& t,
                          const SystemConfig& cfg) {
  return pdiff_grad_theta(ch, effective_channels(ch, state.phi), state, p, t,
                          cfg);
}

}  // namespace rissec
