// Rates, the secrecy objective, the channel-power-difference surrogate,
// and their analytic gradients.
#pragma once

#include "rissec/channel.hpp"
#include "rissec/ris_model.hpp"
#include "rissec/types.hpp"

namespace rissec {

// Transmit precoder with its power-budget contract.
struct Precoder {
  MatrixXcd mat;  // n_tx x n_streams

  double power() const { return mat.squaredNorm(); }  // Tr(T T^H)
  bool power_feasible(double budget, double rel_tol = 1e-9) const {
    return power() <= budget * (1.0 + rel_tol);
  }
};

struct RateBundle {
  double rate_rx = 0.0;   // achievable rate to Bob [bit/s/Hz]
  double rate_eve = 0.0;  // achievable rate to Eve [bit/s/Hz]
  double secrecy = 0.0;   // raw difference; may be negative

  // Reported secrecy rate: negative differences mean "send nothing",
  // so reporting clamps at zero while optimization uses the raw value.
  double clamped() const { return secrecy > 0.0 ? secrecy : 0.0; }
};

// log2 det(I + H T T^H H^H / sigma2), via a Cholesky factorization of the
// smaller-side Gram matrix (never an explicit determinant).
double rate(const MatrixXcd& h_eff, const MatrixXcd& t, double sigma2);

// Both receivers' rates and the secrecy difference for one (surface, T).
RateBundle secrecy_rate(const EffectiveChannels& eff, const MatrixXcd& t,
                        const SystemConfig& cfg);
RateBundle secrecy_rate(const ChannelSet& ch, const RisState& state,
                        const MatrixXcd& t, const SystemConfig& cfg);

// Conjugate cogradient of the secrecy rate with respect to the precoder:
// (1/ln2) [Hb^H Ab^{-1} Hb T / s2b - He^H Ae^{-1} He T / s2e], with
// A = I + H T T^H H^H / s2 applied via factor-and-solve.
MatrixXcd secrecy_grad_precoder(const EffectiveChannels& eff, const MatrixXcd& t,
                                const SystemConfig& cfg);

// Gradient of the secrecy rate with respect to the element angles,
// keeping all M-sized factors outermost. The first overload reuses
// already-composed effective channels (they must match state.phi).
VectorXd secrecy_grad_theta(const ChannelSet& ch, const EffectiveChannels& eff,
                            const RisState& state, const RisParams& p,
                            const MatrixXcd& t, const SystemConfig& cfg);
VectorXd secrecy_grad_theta(const ChannelSet& ch, const RisState& state,
                            const RisParams& p, const MatrixXcd& t,
                            const SystemConfig& cfg);

// Tr[T^H (Hb^H Hb / s2b - He^H He / s2e) T]; may be negative.
double channel_power_diff(const EffectiveChannels& eff, const MatrixXcd& t,
                          const SystemConfig& cfg);
double channel_power_diff(const ChannelSet& ch, const RisState& state,
                          const MatrixXcd& t, const SystemConfig& cfg);

// Gradient of the channel power difference with respect to the angles.
VectorXd pdiff_grad_theta(const ChannelSet& ch, const EffectiveChannels& eff,
                          const RisState& state, const RisParams& p,
                          const MatrixXcd& t, const SystemConfig& cfg);
VectorXd pdiff_grad_theta(const ChannelSet& ch, const RisState& state,
                          const RisParams& p, const MatrixXcd& t,
                          const SystemConfig& cfg);

}  // namespace rissec
