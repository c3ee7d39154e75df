#include "rissec/pgm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rissec/rng.hpp"

namespace rissec::pgm {

Precoder project_precoder(const MatrixXcd& t_hat, double power_budget) {
  if (!(power_budget > 0.0))
    throw config_error("power budget must be positive");
  const double tr = t_hat.squaredNorm();
  if (tr <= power_budget) return {t_hat};
  return {t_hat * std::sqrt(power_budget / tr)};
}

double init_step_theta(const VectorXd& g, double theta_step_max) {
  if (!(theta_step_max > 0.0))
    throw config_error("theta_step_max must be positive");
  const double gmax = g.cwiseAbs().maxCoeff();
  if (gmax == 0.0)
    throw std::domain_error("cannot size a step from an all-zero gradient");
  return theta_step_max / gmax;
}

double init_step_precoder(const MatrixXcd& g, double power_budget, double tau) {
  if (!(power_budget > 0.0) || !(tau > 0.0))
    throw config_error("power budget and tau must be positive");
  const double gnorm = g.norm();
  if (gnorm == 0.0)
    throw std::domain_error("cannot size a step from an all-zero gradient");
  return tau * std::sqrt(power_budget) / gnorm;
}

namespace {

MatrixXcd default_precoder(const ChannelSet& ch, const SystemConfig& cfg) {
  // Leading right-singular directions of the direct Bob link, equal power.
  const Eigen::JacobiSVD<MatrixXcd> svd(ch.tx_rx, Eigen::ComputeFullV);
  MatrixXcd t = svd.matrixV().leftCols(cfg.n_streams);
  return t * std::sqrt(cfg.power / cfg.n_streams);
}

VectorXd default_theta(const RisParams& p, const SystemConfig& cfg) {
  StreamRng rng(cfg.seed, "init/theta");
  VectorXd theta(cfg.n_elements);
  for (Eigen::Index m = 0; m < theta.size(); ++m)
    theta[m] = rng.uniform(p.theta_min, p.theta_max);
  return theta;
}

}  // namespace

SolveReport solve(const ChannelSet& ch, const RisParams& p,
                  const SystemConfig& cfg, const PgmOptions& opts,
                  const std::optional<MatrixXcd>& t_init,
                  const std::optional<VectorXd>& theta_init) {
  cfg.validate();
  p.validate();
  opts.validate(p);
  ch.check_dims(cfg);

  const auto t_start = std::chrono::steady_clock::now();
  SolveReport rep;

  // Starting precoder, projected onto the budget if the caller's is outside.
  MatrixXcd t = t_init ? *t_init : default_precoder(ch, cfg);
  if (t.rows() != cfg.n_tx || t.cols() != cfg.n_streams)
    throw config_error("initial precoder has wrong dimensions");
  if (t.squaredNorm() > cfg.power * (1.0 + 1e-9)) {
    t = project_precoder(t, cfg.power).mat;
    rep.init_precoder_projected = true;
  }

  // Starting angles, projected into the feasible interval if outside.
  VectorXd theta;
  if (opts.with_ris) {
    theta = theta_init ? *theta_init : default_theta(p, cfg);
    if (theta.size() != cfg.n_elements)
      throw config_error("initial angles have wrong length");
    const VectorXd projected = project_theta(theta, p);
    if ((projected - theta).cwiseAbs().maxCoeff() > 0.0)
      rep.init_theta_projected = true;
    theta = projected;
  }

  const double theta_step_max = opts.theta_step_max > 0.0
                                    ? opts.theta_step_max
                                    : (p.theta_max - p.theta_min) / 4.0;

  const auto compose = [&](const VectorXd& angles) {
    if (!opts.with_ris) return EffectiveChannels{ch.tx_rx, ch.tx_eve};
    return effective_channels(ch, RisState::from_theta(angles, p).phi);
  };
  const auto objective = [&](const EffectiveChannels& eff) {
    ++rep.n_objective_evals;
    return secrecy_rate(eff, t, cfg).secrecy;
  };

  const auto audit = [&]() {
    rep.max_iterate_power = std::max(rep.max_iterate_power, t.squaredNorm());
    if (opts.with_ris)
      for (Eigen::Index m = 0; m < theta.size(); ++m)
        if (!(theta[m] >= p.theta_min && theta[m] <= p.theta_max))
          rep.theta_always_feasible = false;
  };

  EffectiveChannels eff = compose(theta);
  double current = objective(eff);
  rep.objective_trace.push_back(current);
  audit();

  double step_theta = 0.0, step_t = 0.0;  // sized on first use, then persist
  const bool fixed = opts.step_mode == StepMode::fixed;
  if (fixed) step_theta = step_t = opts.fixed_step;

  try {
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      const double before = current;

      if (opts.with_ris && opts.optimize_theta) {
        const RisState state = RisState::from_theta(theta, p);
        const VectorXd g = secrecy_grad_theta(ch, eff, state, p, t, cfg);
        if (g.cwiseAbs().maxCoeff() > 0.0) {
          if (!fixed && step_theta == 0.0)
            step_theta = init_step_theta(g, theta_step_max);
          if (fixed) {
            theta = project_theta(theta + step_theta * g, p);
            eff = compose(theta);
            current = objective(eff);
          } else {
            for (int inner = 0; inner < opts.max_inner; ++inner) {
              const VectorXd trial = project_theta(theta + step_theta * g, p);
              EffectiveChannels trial_eff = compose(trial);
              const double value = objective(trial_eff);
              if (value >= current) {  // accept any non-worsening step
                theta = trial;
                eff = std::move(trial_eff);
                current = value;
                break;
              }
              step_theta *= opts.backtrack;
            }
            // all trials worsened: keep the previous iterate
          }
        }
        audit();
      }

      {
        const MatrixXcd g = secrecy_grad_precoder(eff, t, cfg);
        if (g.norm() > 0.0) {
          if (!fixed && step_t == 0.0)
            step_t = init_step_precoder(g, cfg.power, opts.tau);
          if (fixed) {
            t = project_precoder(t + step_t * g, cfg.power).mat;
            current = objective(eff);
          } else {
            const MatrixXcd saved = t;
            bool accepted = false;
            for (int inner = 0; inner < opts.max_inner; ++inner) {
              t = project_precoder(saved + step_t * g, cfg.power).mat;
              const double value = objective(eff);
              if (value >= current) {
                current = value;
                accepted = true;
                break;
              }
              step_t *= opts.backtrack;
            }
            if (!accepted) t = saved;
          }
        }
        audit();
      }

      rep.objective_trace.push_back(current);
      rep.step_history.emplace_back(step_theta, step_t);
      rep.eval_trace.push_back(rep.n_objective_evals);
      ++rep.n_outer;
      if (std::abs(current - before) <= opts.tol) {
        rep.termination = Termination::converged;
        break;
      }
    }
  } catch (const numeric_error& e) {
    rep.error = e.what();  // keep the last feasible iterate
  }

  rep.theta_opt = theta;
  rep.precoder_opt = t;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rep;
}

}  // namespace rissec::pgm
