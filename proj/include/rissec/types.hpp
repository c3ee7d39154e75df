// Shared value types, unit conversions and error categories.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace rissec {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Invalid user input (config files, CLI arguments, inconsistent dimensions).
// The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown (failed factorization, non-convergent fit).
// The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

// Antenna/stream dimensions and radio-level powers of one simulated link.
// All powers are linear watts; dB(m) values are converted when configs are
// parsed, never inside numerical code.
struct SystemConfig {
  int n_tx = 4;         // transmit antennas (Alice)
  int n_rx = 4;         // receive antennas at the intended user (Bob)
  int n_eve = 4;        // receive antennas at the eavesdropper (Eve)
  int n_streams = 4;    // parallel data streams
  int n_elements = 50;  // reflecting elements on the surface
  double power = dbm_to_watt(30.0);       // transmit power budget [W]
  double noise_rx = dbm_to_watt(-110.0);  // noise power at Bob [W]
  double noise_eve = dbm_to_watt(-110.0); // noise power at Eve [W]
  std::uint64_t seed = 1;

  void validate() const {
    if (n_tx < 1 || n_rx < 1 || n_eve < 1 || n_streams < 1 || n_elements < 1)
      throw config_error("antenna, stream and element counts must all be >= 1");
    if (n_streams > std::min(n_tx, n_rx))
      throw config_error("n_streams must not exceed min(n_tx, n_rx)");
    if (!(power > 0.0) || !(noise_rx > 0.0) || !(noise_eve > 0.0))
      throw config_error("power and noise levels must be positive");
  }
};

}  // namespace rissec
