// Shared fixtures for the unit tests: a representative lossy-surface
// parameter set, small system configs, and unit-scale random channels that
// skip the geometric path loss (so numbers stay O(1) and tolerances are
// meaningful).
#pragma once

#include <string>

#include "rissec/channel.hpp"
#include "rissec/rng.hpp"
#include "rissec/types.hpp"

namespace testutil {

using namespace rissec;

// Amplitude-law parameters of the same magnitude as a fitted 2-ohm surface.
inline RisParams test_params() {
  RisParams p;
  p.beta_min = 0.35;
  p.alpha = 1.5;
  p.theta_tilde = 1.36;
  p.theta_min = -3.0;
  p.theta_max = 2.84;
  p.resistance = 2.0;
  return p;
}

// Square n-antenna system with m elements and O(1) powers.
inline SystemConfig toy_system(int n, int m, double power = 10.0,
                               double noise = 1.0) {
  SystemConfig cfg;
  cfg.n_tx = cfg.n_rx = cfg.n_eve = cfg.n_streams = n;
  cfg.n_elements = m;
  cfg.power = power;
  cfg.noise_rx = cfg.noise_eve = noise;
  cfg.seed = 1;
  return cfg;
}

inline MatrixXcd random_matrix(int rows, int cols, std::uint64_t seed,
                               const std::string& stream) {
  StreamRng rng(seed, stream);
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

// Unit-variance channels with the library's link names but no path loss.
inline ChannelSet unit_channels(const SystemConfig& cfg, std::uint64_t seed) {
  ChannelSet ch;
  ch.tx_rx = random_matrix(cfg.n_rx, cfg.n_tx, seed, "test/tx_rx");
  ch.tx_ris = random_matrix(cfg.n_elements, cfg.n_tx, seed, "test/tx_ris");
  ch.ris_rx = random_matrix(cfg.n_rx, cfg.n_elements, seed, "test/ris_rx");
  ch.tx_eve = random_matrix(cfg.n_eve, cfg.n_tx, seed, "test/tx_eve");
  ch.ris_eve = random_matrix(cfg.n_eve, cfg.n_elements, seed, "test/ris_eve");
  return ch;
}

// Random precoder scaled onto the power-budget boundary.
inline MatrixXcd random_precoder(const SystemConfig& cfg, std::uint64_t seed,
                                 double fill = 1.0) {
  MatrixXcd t = random_matrix(cfg.n_tx, cfg.n_streams, seed, "test/precoder");
  return t * std::sqrt(fill * cfg.power / t.squaredNorm());
}

// Feasible angle vector drawn uniformly inside the bounds.
inline VectorXd random_theta(int m, const RisParams& p, std::uint64_t seed,
                             double margin = 0.0) {
  StreamRng rng(seed, "test/theta");
  VectorXd theta(m);
  for (int i = 0; i < m; ++i)
    theta[i] = rng.uniform(p.theta_min + margin, p.theta_max - margin);
  return theta;
}

}  // namespace testutil
