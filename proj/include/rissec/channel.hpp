// Link geometry, distance path loss, Rayleigh channel generation, and
// effective-channel composition through the reflecting surface.
#pragma once

#include "rissec/types.hpp"

namespace rissec {

// Node positions in meters.
struct Geometry {
  Vector3d alice{0.0, 5.0, 10.0};  // transmitter
  Vector3d ris{100.0, 0.0, 2.0};   // reflecting surface
  Vector3d bob{100.0, 3.0, 0.0};   // intended receiver
  Vector3d eve{90.0, 2.0, 0.0};    // eavesdropper

  void validate() const {
    const Vector3d* nodes[] = {&alice, &ris, &bob, &eve};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if ((*nodes[i] - *nodes[j]).norm() <= 0.0)
          throw config_error("node positions must be pairwise distinct");
  }
};

// rho(d) = rho0 * (d/d0)^(-gamma), with a per-link exponent.
struct PathLossModel {
  double rho0_db = -30.0;  // gain at the reference distance [dB]
  double d0 = 1.0;         // reference distance [m]
  double gamma_tx_ris = 2.2;
  double gamma_ris_rx = 2.5;
  double gamma_ris_eve = 2.5;
  double gamma_tx_rx = 3.5;
  double gamma_tx_eve = 3.5;

  void validate() const {
    if (!(d0 > 0.0)) throw config_error("reference distance must be positive");
    for (double g : {gamma_tx_ris, gamma_ris_rx, gamma_ris_eve, gamma_tx_rx,
                     gamma_tx_eve})
      if (g < 2.0) throw config_error("path-loss exponents must be >= 2");
  }
};

// The five channel matrices of one realization, path loss included.
struct ChannelSet {
  MatrixXcd tx_rx;    // Alice -> Bob            (n_rx  x n_tx)
  MatrixXcd tx_ris;   // Alice -> surface        (M     x n_tx)
  MatrixXcd ris_rx;   // surface -> Bob          (n_rx  x M)
  MatrixXcd tx_eve;   // Alice -> Eve            (n_eve x n_tx)
  MatrixXcd ris_eve;  // surface -> Eve          (n_eve x M)

  void check_dims(const SystemConfig& cfg) const;
};

struct EffectiveChannels {
  MatrixXcd to_rx;   // tx_rx  + ris_rx  * diag(phi) * tx_ris
  MatrixXcd to_eve;  // tx_eve + ris_eve * diag(phi) * tx_ris
};

// Linear gain at distance d for exponent gamma.
double path_loss(double d, double gamma, const PathLossModel& plm);

// i.i.d. unit-variance circularly-symmetric Gaussian entries scaled by
// sqrt(path loss). Each matrix draws from its own named stream
// (tx_rx, tx_ris, ris_rx, tx_eve, ris_eve) indexed by the entry's row-major
// position, so realizations depend only on (seed, link, entry) — never on
// fill order, other links' sizes, or thread count.
ChannelSet generate_channels(const SystemConfig& cfg, const Geometry& geo,
                             const PathLossModel& plm);

EffectiveChannels effective_channels(const ChannelSet& ch, const VectorXcd& phi);

}  // namespace rissec
