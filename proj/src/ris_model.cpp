#include "rissec/ris_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rissec/kernels.hpp"

namespace rissec {

namespace {

constexpr double kPi = std::numbers::pi;

// Wrap an arbitrary angle into (-pi, pi].
double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  if (w == -kPi) w = kPi;  // keep the half-open convention (-pi, pi]
  return w;
}

}  // namespace

Complex circuit_reflection(double c, const CircuitParams& cp) {
  cp.validate();
  if (!(c >= cp.cap_min && c <= cp.cap_max))
    throw std::domain_error("capacitance outside the tunable range");
  const double w = 2.0 * kPi * cp.frequency;
  const Complex jwl1(0.0, w * cp.l1);
  // series branch: top inductor, tunable capacitor, loss resistance
  const Complex series = Complex(cp.resistance, w * cp.l2 - 1.0 / (w * c));
  const Complex z = jwl1 * series / (jwl1 + series);
  const Complex denom = z + cp.z0;
  if (std::abs(denom) < 1e-12)
    throw numeric_error("element impedance cancels the free-space impedance");
  return (z - cp.z0) / denom;
}

double amplitude_law(double theta, const RisParams& p) {
  const double s = (std::sin(theta - p.theta_tilde) + 1.0) / 2.0;
  return (1.0 - p.beta_min) * std::pow(s, p.alpha) + p.beta_min;
}

double amplitude_slope(double theta, const RisParams& p) {
  const double d = theta - p.theta_tilde;
  const double s = (std::sin(d) + 1.0) / 2.0;
  if (s <= 0.0) {
    // At the floor of the law, s^(alpha-1) is 0 for alpha > 1 and the
    // cos factor is 0 at the same point for alpha = 1; the slope vanishes.
    return 0.0;
  }
  return (1.0 - p.beta_min) * p.alpha * std::pow(s, p.alpha - 1.0) *
         std::cos(d) / 2.0;
}

double amplitude_of_phase(double theta, const RisParams& p) {
  if (!(theta >= p.theta_min && theta <= p.theta_max))
    throw std::domain_error("phase outside the fitted interval");
  return amplitude_law(theta, p);
}

std::pair<VectorXcd, VectorXcd> reflection_and_derivative(const VectorXd& theta,
                                                          const RisParams& p) {
  for (Eigen::Index m = 0; m < theta.size(); ++m)
    if (!(theta[m] >= p.theta_min && theta[m] <= p.theta_max))
      throw std::domain_error("phase outside the fitted interval");
  VectorXcd phi(theta.size()), dphi(theta.size());
  kernels::reflection_batch(theta, p, phi, dphi);
  return {std::move(phi), std::move(dphi)};
}

double project_theta(double theta_hat, const RisParams& p) {
  const double w = wrap_angle(theta_hat);
  if (w >= p.theta_min && w <= p.theta_max) return w;
  const double lifted = w >= 0.0 ? w : w + 2.0 * kPi;
  const double center = ((p.theta_min + 2.0 * kPi) + p.theta_max) / 2.0;
  return lifted >= center ? p.theta_min : p.theta_max;
}

VectorXd project_theta(const VectorXd& theta_hat, const RisParams& p) {
  VectorXd out(theta_hat.size());
  for (Eigen::Index m = 0; m < theta_hat.size(); ++m)
    out[m] = project_theta(theta_hat[m], p);
  return out;
}

RisState RisState::from_theta(const VectorXd& theta, const RisParams& p) {
  for (Eigen::Index m = 0; m < theta.size(); ++m)
    if (!(theta[m] >= p.theta_min && theta[m] <= p.theta_max))
      throw std::domain_error("phase outside the fitted interval");
  return from_theta_unbounded(theta, p);
}

RisState RisState::from_theta_unbounded(const VectorXd& theta,
                                        const RisParams& p) {
  RisState st;
  st.theta = theta;
  st.beta.resize(theta.size());
  st.phi.resize(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    st.beta[m] = amplitude_law(theta[m], p);
    st.phi[m] = std::polar(st.beta[m], theta[m]);
  }
  return st;
}

namespace {

// Residuals and Jacobian of the amplitude law against sampled (theta, beta)
// pairs, for parameters q = (beta_min, alpha, theta_tilde).
void fit_residuals(const std::vector<double>& theta,
                   const std::vector<double>& beta, const double q[3],
                   VectorXd& r, MatrixXd* jac) {
  const double bmin = q[0], alpha = q[1], tt = q[2];
  const auto n = static_cast<Eigen::Index>(theta.size());
  r.resize(n);
  if (jac) jac->resize(n, 3);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = theta[static_cast<size_t>(k)] - tt;
    const double s = (std::sin(d) + 1.0) / 2.0;
    const double sa = std::pow(s, alpha);
    r[k] = (1.0 - bmin) * sa + bmin - beta[static_cast<size_t>(k)];
    if (!jac) continue;
    (*jac)(k, 0) = 1.0 - sa;
    (*jac)(k, 1) = s > 0.0 ? (1.0 - bmin) * sa * std::log(s) : 0.0;
    (*jac)(k, 2) = s > 0.0 ? -(1.0 - bmin) * alpha * std::pow(s, alpha - 1.0) *
                                 std::cos(d) / 2.0
                           : 0.0;
  }
}

}  // namespace

RisFit fit_ris_params(const CircuitParams& cp, int n_samples) {
  cp.validate();
  if (n_samples < 16) throw config_error("fit needs at least 16 sweep samples");

  // Sample the circuit over a log-spaced capacitance sweep.
  std::vector<double> theta(static_cast<size_t>(n_samples));
  std::vector<double> beta(static_cast<size_t>(n_samples));
  const double log_lo = std::log(cp.cap_min), log_hi = std::log(cp.cap_max);
  double theta_lo = kPi, theta_hi = -kPi;
  size_t k_dip = 0;
  for (int k = 0; k < n_samples; ++k) {
    const double c =
        std::clamp(std::exp(log_lo + (log_hi - log_lo) * k / double(n_samples - 1)),
                   cp.cap_min, cp.cap_max);
    const Complex refl = circuit_reflection(c, cp);
    const double mag = std::abs(refl);
    if (mag > 1.0 + 1e-9)
      throw numeric_error("sweep produced |reflection| > 1 for a passive element");
    theta[static_cast<size_t>(k)] = std::arg(refl);
    beta[static_cast<size_t>(k)] = mag;
    theta_lo = std::min(theta_lo, theta[static_cast<size_t>(k)]);
    theta_hi = std::max(theta_hi, theta[static_cast<size_t>(k)]);
    if (mag < beta[k_dip]) k_dip = static_cast<size_t>(k);
  }
  if (theta_hi - theta_lo < 0.1)
    throw numeric_error("capacitance sweep spans a degenerate phase interval");

  // Damped Gauss-Newton on (beta_min, alpha, theta_tilde). The amplitude
  // dip sits a quarter period below theta_tilde, which gives the start.
  double q[3] = {*std::min_element(beta.begin(), beta.end()), 1.0,
                 wrap_angle(theta[k_dip] + kPi / 2.0)};
  VectorXd r;
  MatrixXd jac;
  fit_residuals(theta, beta, q, r, &jac);
  double cost = 0.5 * r.squaredNorm();
  double damping = 1e-3;
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::Vector3d grad = jac.transpose() * r;
    if (grad.norm() < 1e-14) break;
    const Eigen::Matrix3d hess = jac.transpose() * jac;
    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::Matrix3d damped = hess;
      damped.diagonal() += damping * (hess.diagonal().array() + 1e-12).matrix();
      const Eigen::Vector3d step = damped.ldlt().solve(-grad);
      double qn[3] = {std::clamp(q[0] + step[0], 0.0, 1.0),
                      std::clamp(q[1] + step[1], 1e-3, 64.0),
                      wrap_angle(q[2] + step[2])};
      VectorXd rn;
      fit_residuals(theta, beta, qn, rn, nullptr);
      const double cost_n = 0.5 * rn.squaredNorm();
      if (cost_n < cost) {
        std::copy(qn, qn + 3, q);
        cost = cost_n;
        fit_residuals(theta, beta, q, r, &jac);
        damping = std::max(damping * 0.3, 1e-12);
        stepped = true;
        break;
      }
      damping *= 10.0;
      if (damping > 1e12) break;
    }
    if (!stepped) break;  // damping exhausted: stationary within tolerance
  }
  if (!std::isfinite(cost))
    throw numeric_error("amplitude-law fit diverged");

  RisFit fit;
  fit.params.beta_min = q[0];
  fit.params.alpha = q[1];
  fit.params.theta_tilde = q[2];
  fit.params.theta_min = theta_lo;
  fit.params.theta_max = theta_hi;
  fit.params.resistance = cp.resistance;
  fit.params.validate();
  fit.amplitude_rms = std::sqrt(2.0 * cost / n_samples);
  return fit;
}

}  // namespace rissec
