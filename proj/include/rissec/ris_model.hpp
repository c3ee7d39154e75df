// Lossy reflecting-surface physics: equivalent-circuit reflection
// coefficient, the fitted amplitude-vs-phase law with its derivative, and
// the bounded-angle projection used by the gradient solvers.
#pragma once

#include <numbers>
#include <utility>

#include "rissec/types.hpp"

namespace rissec {

// Equivalent circuit of one reflecting element: a parallel branch of L1
// against the series chain (L2, tunable C, loss resistance R), terminated
// against free space.
struct CircuitParams {
  double l1 = 2.5e-9;         // bottom-layer inductance [H]
  double l2 = 0.7e-9;         // top-layer inductance [H]
  double frequency = 2.5e9;   // operating frequency [Hz]
  double resistance = 0.0;    // element loss [ohm]
  double z0 = 377.0;          // free-space impedance [ohm]
  double cap_min = 0.47e-12;  // tunable capacitance range [F]
  double cap_max = 2.35e-12;

  void validate() const {
    if (!(l1 > 0.0) || !(l2 > 0.0) || !(frequency > 0.0) || !(z0 > 0.0))
      throw config_error("circuit inductances, frequency and z0 must be positive");
    if (resistance < 0.0) throw config_error("circuit resistance must be >= 0");
    if (!(cap_min > 0.0) || !(cap_min < cap_max))
      throw config_error("capacitance range must satisfy 0 < cap_min < cap_max");
  }

  static CircuitParams with_resistance(double r) {
    CircuitParams cp;
    cp.resistance = r;
    return cp;
  }
};

// Parameters of the sinusoidal amplitude law
//   beta(theta) = (1 - beta_min) * ((sin(theta - theta_tilde) + 1)/2)^alpha
//                 + beta_min
// together with the feasible phase interval attained by the circuit sweep.
struct RisParams {
  double beta_min = 1.0;
  double alpha = 1.0;
  double theta_tilde = 0.0;
  double theta_min = -3.0;
  double theta_max = 3.0;
  double resistance = 0.0;  // loss value the fit was made for

  void validate() const {
    if (!(beta_min >= 0.0) || !(beta_min <= 1.0))
      throw config_error("beta_min must lie in [0, 1]");
    if (!(alpha > 0.0)) throw config_error("alpha must be positive");
    if (!(theta_min > -std::numbers::pi) || !(theta_max < std::numbers::pi) ||
        !(theta_min < theta_max))
      throw config_error("phase bounds must satisfy -pi < theta_min < theta_max < pi");
    if (resistance < 0.0) throw config_error("resistance must be >= 0");
  }

  // Lossless surface with (numerically) unrestricted phase.
  static RisParams ideal() {
    RisParams p;
    p.beta_min = 1.0;
    p.alpha = 1.0;
    p.theta_tilde = 0.0;
    p.theta_min = -std::numbers::pi + 1e-9;
    p.theta_max = std::numbers::pi - 1e-9;
    p.resistance = 0.0;
    return p;
  }
};

// One surface configuration: angles with their induced amplitudes and
// complex reflection coefficients.
struct RisState {
  VectorXd theta;
  VectorXd beta;
  VectorXcd phi;

  // Builds the state, requiring every angle inside [theta_min, theta_max].
  static RisState from_theta(const VectorXd& theta, const RisParams& p);

  // Same construction but evaluating the amplitude law outside the fitted
  // bounds as well — used when a configuration optimized under one model is
  // re-evaluated under another whose feasible interval differs.
  static RisState from_theta_unbounded(const VectorXd& theta, const RisParams& p);
};

// Reflection coefficient of the element circuit at capacitance c.
Complex circuit_reflection(double c, const CircuitParams& cp);

struct RisFit {
  RisParams params;
  double amplitude_rms;  // residual of the fitted law over the sweep
};

// Sweeps the circuit over its capacitance range (log-spaced n_samples),
// takes the attained phase extremes as the feasible interval, and fits
// (beta_min, alpha, theta_tilde) to the sampled amplitudes by damped
// Gauss-Newton least squares.
RisFit fit_ris_params(const CircuitParams& cp, int n_samples = 512);

// Amplitude law, valid for any real theta (the formula is globally defined).
double amplitude_law(double theta, const RisParams& p);

// d(beta)/d(theta) of the amplitude law.
double amplitude_slope(double theta, const RisParams& p);

// Amplitude law restricted to the fitted interval; throws std::domain_error
// outside it.
double amplitude_of_phase(double theta, const RisParams& p);

// phi[m] = beta(theta[m]) e^{i theta[m]} and its derivative
// dphi[m] = (beta'(theta[m]) + i beta(theta[m])) e^{i theta[m]}.
std::pair<VectorXcd, VectorXcd> reflection_and_derivative(const VectorXd& theta,
                                                          const RisParams& p);

// Projection of a raw gradient-ascent angle onto [theta_min, theta_max]:
// wrap into (-pi, pi]; keep if feasible; otherwise snap to the nearer bound
// measured around the circle (lifted midpoint rule, ties to theta_min).
double project_theta(double theta_hat, const RisParams& p);
VectorXd project_theta(const VectorXd& theta_hat, const RisParams& p);

}  // namespace rissec
