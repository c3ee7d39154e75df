#include "rissec/cpdm.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "rissec/rng.hpp"
#include "rissec/secrecy.hpp"

namespace rissec::cpdm {

EigenPrecoder optimal_precoder(const EffectiveChannels& eff,
                               const SystemConfig& cfg, PowerSplit split) {
  cfg.validate();
  MatrixXcd g = eff.to_rx.adjoint() * eff.to_rx / cfg.noise_rx;
  g.noalias() -= eff.to_eve.adjoint() * eff.to_eve / cfg.noise_eve;

  const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
  if (es.info() != Eigen::Success)
    throw numeric_error("eigendecomposition of the gain-difference matrix failed");

  EigenPrecoder out;
  const Eigen::Index n = g.rows();
  out.spectrum = es.eigenvalues().reverse();  // descending
  out.t = MatrixXcd::Zero(cfg.n_tx, cfg.n_streams);

  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(cfg.n_streams, n); ++i)
    if (out.spectrum[i] > 0.0) ++n_pos;
  if (n_pos == 0) {
    out.no_positive_mode = true;  // every direction favors the eavesdropper
    return out;
  }

  VectorXd power(n_pos);
  switch (split) {
    case PowerSplit::proportional: {
      const double total = out.spectrum.head(n_pos).sum();
      for (Eigen::Index i = 0; i < n_pos; ++i)
        power[i] = cfg.power * out.spectrum[i] / total;
      break;
    }
    case PowerSplit::top_mode_only:
      power.setZero();
      power[0] = cfg.power;
      break;
    case PowerSplit::equal:
      power.setConstant(cfg.power / static_cast<double>(n_pos));
      break;
  }
  for (Eigen::Index i = 0; i < n_pos; ++i)
    out.t.col(i) = es.eigenvectors().col(n - 1 - i) * std::sqrt(power[i]);
  return out;
}

CpdmReport solve_theta(const ChannelSet& ch, const RisParams& p,
                       const SystemConfig& cfg, const pgm::PgmOptions& opts,
                       const MatrixXcd& t, const VectorXd& theta_init) {
  cfg.validate();
  p.validate();
  opts.validate(p);
  ch.check_dims(cfg);
  if (theta_init.size() != cfg.n_elements)
    throw config_error("initial angles have wrong length");

  const auto t_start = std::chrono::steady_clock::now();
  CpdmReport rep;
  VectorXd theta = project_theta(theta_init, p);

  const double theta_step_max = opts.theta_step_max > 0.0
                                    ? opts.theta_step_max
                                    : (p.theta_max - p.theta_min) / 4.0;

  const auto compose = [&](const VectorXd& angles) {
    return effective_channels(ch, RisState::from_theta(angles, p).phi);
  };
  const auto objective = [&](const EffectiveChannels& eff) {
    ++rep.n_objective_evals;
    return channel_power_diff(eff, t, cfg);
  };

  EffectiveChannels eff = compose(theta);
  double current = objective(eff);
  rep.pdiff_trace.push_back(current);

  double step = 0.0;
  try {
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      const double before = current;
      const RisState state = RisState::from_theta(theta, p);
      const VectorXd g = pdiff_grad_theta(ch, eff, state, p, t, cfg);
      if (g.cwiseAbs().maxCoeff() > 0.0) {
        if (step == 0.0) step = pgm::init_step_theta(g, theta_step_max);
        for (int inner = 0; inner < opts.max_inner; ++inner) {
          const VectorXd trial = project_theta(theta + step * g, p);
          EffectiveChannels trial_eff = compose(trial);
          const double value = objective(trial_eff);
          if (value >= current) {
            theta = trial;
            eff = std::move(trial_eff);
            current = value;
            break;
          }
          step *= opts.backtrack;
        }
      }
      rep.pdiff_trace.push_back(current);
      ++rep.n_outer;
      if (std::abs(current - before) <= opts.tol) {
        rep.termination = pgm::Termination::converged;
        break;
      }
    }
  } catch (const numeric_error& e) {
    rep.error = e.what();
  }

  rep.theta_sub = theta;
  rep.precoder_sub = t;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

CpdmReport solve(const ChannelSet& ch, const RisParams& p,
                 const SystemConfig& cfg, const CpdmOptions& opts,
                 const std::optional<VectorXd>& theta_init) {
  if (opts.alternations < 1)
    throw config_error("alternation count must be >= 1");

  VectorXd theta;
  if (theta_init) {
    theta = project_theta(*theta_init, p);
  } else {
    StreamRng rng(cfg.seed, "init/theta");
    theta.resize(cfg.n_elements);
    for (Eigen::Index m = 0; m < theta.size(); ++m)
      theta[m] = rng.uniform(p.theta_min, p.theta_max);
  }

  const auto t_start = std::chrono::steady_clock::now();
  CpdmReport rep;
  EigenPrecoder pre;
  for (int pass = 0; pass < opts.alternations; ++pass) {
    pre = optimal_precoder(effective_channels(ch, RisState::from_theta(theta, p).phi),
                           cfg, opts.split);
    if (pre.no_positive_mode) break;  // zero precoder: the ascent has no signal
    rep = solve_theta(ch, p, cfg, opts.ascent, pre.t, theta);
    theta = rep.theta_sub;
    if (!rep.error.empty()) break;
  }

  // Refresh the closed-form precoder at the final angles.
  pre = optimal_precoder(effective_channels(ch, RisState::from_theta(theta, p).phi),
                         cfg, opts.split);
  rep.no_positive_mode = pre.no_positive_mode;
  rep.eigen_spectrum = pre.spectrum;
  rep.precoder_sub = pre.t;
  rep.theta_sub = theta;
  if (rep.pdiff_trace.empty()) {
    rep.pdiff_trace.push_back(channel_power_diff(
        effective_channels(ch, RisState::from_theta(theta, p).phi), pre.t, cfg));
    rep.termination = pgm::Termination::converged;  // nothing to ascend
  }
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

SurrogateCheck check_surrogate_bound(const EffectiveChannels& eff,
                                     const MatrixXcd& t,
                                     const SystemConfig& cfg) {
  constexpr double kLn2 = std::numbers::ln2;
  const MatrixXcd pb = eff.to_rx * t;
  const MatrixXcd pe = eff.to_eve * t;
  const MatrixXcd fb = pb.adjoint() * pb / cfg.noise_rx;
  const MatrixXcd fe = pe.adjoint() * pe / cfg.noise_eve;

  SurrogateCheck out;
  const MatrixXcd diff = fb - fe;
  const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff);
  if (es.info() != Eigen::Success)
    throw numeric_error("eigendecomposition in the surrogate check failed");
  const double scale = std::max(diff.norm(), 1e-300);
  out.is_psd = es.eigenvalues().minCoeff() >= -1e-9 * scale;

  const Eigen::SelfAdjointEigenSolver<MatrixXcd> es_b(fb), es_e(fe);
  out.max_f_eigenvalue =
      std::max(es_b.eigenvalues().maxCoeff(), es_e.eigenvalues().maxCoeff());

  out.csec = secrecy_rate(eff, t, cfg).secrecy;
  out.pdiff_over_ln2 = std::real(diff.trace()) / kLn2;
  out.gap = out.pdiff_over_ln2 - out.csec;
  out.taylor_envelope =
      0.5 * (std::real((fb * fb).trace()) + std::real((fe * fe).trace())) / kLn2;
  return out;
}

}  // namespace rissec::cpdm
