// Joint projected-gradient ascent over the precoder and the element
// angles, with adaptive step-size initialization and monotonicity-enforcing
// backtracking.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rissec/channel.hpp"
#include "rissec/ris_model.hpp"
#include "rissec/secrecy.hpp"
#include "rissec/types.hpp"

namespace rissec::pgm {

enum class StepMode {
  adaptive,  // gradient-scaled initialization + backtracking (the paper's scheme)
  fixed,     // constant step size, unconditional acceptance (baseline)
};

struct PgmOptions {
  int max_outer = 500;
  int max_inner = 30;
  double tol = 1e-4;           // terminate when |objective change| per outer pass <= tol
  double backtrack = 0.5;      // step-size reduction factor in (0,1)
  double tau = 0.5;            // precoder step scale in (0,1]
  double theta_step_max = 0.0; // first raw angle step, radians; <=0 selects (span)/4
  StepMode step_mode = StepMode::adaptive;
  double fixed_step = 1e-3;   // used only in fixed mode, for both variables
  bool optimize_theta = true; // false: hold the angles at their initial value
  bool with_ris = true;       // false: no surface in the link (direct channels only)

  void validate(const RisParams& p) const {
    if (max_outer < 1 || max_inner < 1)
      throw config_error("iteration limits must be >= 1");
    if (!(tol >= 0.0)) throw config_error("tolerance must be >= 0");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw config_error("backtracking factor must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw config_error("tau must lie in (0, 1]");
    const double span = p.theta_max - p.theta_min;
    if (theta_step_max > span / 2.0)
      throw config_error("theta_step_max must not exceed half the phase span");
    if (step_mode == StepMode::fixed && !(fixed_step > 0.0))
      throw config_error("fixed step size must be positive");
  }
};

enum class Termination { converged, max_iterations };

struct SolveReport {
  std::vector<double> objective_trace;  // secrecy rate at init and after each outer pass
  VectorXd theta_opt;
  MatrixXcd precoder_opt;
  std::vector<std::pair<double, double>> step_history;  // (theta step, precoder step)
  // cumulative objective evaluations at the end of each outer pass, aligned
  // with objective_trace[1..]
  std::vector<long> eval_trace;
  Termination termination = Termination::max_iterations;
  double wall_time_s = 0.0;
  long n_objective_evals = 0;
  int n_outer = 0;
  bool init_theta_projected = false;     // supplied start was infeasible
  bool init_precoder_projected = false;
  // Feasibility audit over every accepted iterate (the start point and the
  // state after each phase of each outer pass): the largest transmit power
  // Tr(T T^H) seen, and whether all angle vectors stayed inside
  // [theta_min, theta_max] elementwise.
  double max_iterate_power = 0.0;
  bool theta_always_feasible = true;
  std::string error;  // non-empty: numeric failure; last feasible iterate kept

  double final_objective() const { return objective_trace.back(); }
};

// Scale onto the trace-power ball: unchanged if Tr(T T^H) <= budget, else
// scaled by sqrt(budget / trace). A zero matrix is returned unchanged (it
// is feasible, though not on the boundary).
Precoder project_precoder(const MatrixXcd& t_hat, double power_budget);

// First angle step: theta_step_max / max_m |g_m|. Throws on a zero gradient
// (callers treat that as already converged).
double init_step_theta(const VectorXd& g, double theta_step_max);

// First precoder step: tau * sqrt(budget) / ||g||_F, so the first raw
// displacement has Frobenius norm tau*sqrt(budget).
double init_step_precoder(const MatrixXcd& g, double power_budget, double tau);

// Runs the full ascent. Defaults when no start is supplied: angles uniform
// over the feasible interval (stream "init/theta" of cfg.seed); precoder =
// the leading right-singular directions of the direct Bob link, equally
// powered to fill the budget.
SolveReport solve(const ChannelSet& ch, const RisParams& p,
                  const SystemConfig& cfg, const PgmOptions& opts,
                  const std::optional<MatrixXcd>& t_init = std::nullopt,
                  const std::optional<VectorXd>& theta_init = std::nullopt);

}  // namespace rissec::pgm
