// Channel-power-difference surrogate: closed-form eigen precoder, the
// angle-only projected-gradient ascent on the power difference, and the
// surrogate-bound checker.
#pragma once

#include <string>
#include <vector>

#include "rissec/channel.hpp"
#include "rissec/pgm.hpp"
#include "rissec/ris_model.hpp"
#include "rissec/types.hpp"

namespace rissec::cpdm {

enum class PowerSplit {
  proportional,    // column powers proportional to the selected eigenvalues
  top_mode_only,   // all power on the strongest direction
  equal,           // equal power on every selected direction
};

struct EigenPrecoder {
  MatrixXcd t;              // n_tx x n_streams; zero columns for unused modes
  VectorXd spectrum;        // eigenvalues of G, descending
  bool no_positive_mode = false;  // G had no positive eigenvalue; t is zero
};

// Maximizes Tr(T^H G T) under Tr(T^H T) <= P for
// G = Hb^H Hb / s2b - He^H He / s2e: eigenvectors of the largest positive
// eigenvalues, power split per `split`, trace exactly P (or 0 when no
// direction has positive gain).
EigenPrecoder optimal_precoder(const EffectiveChannels& eff,
                               const SystemConfig& cfg, PowerSplit split);

struct CpdmReport {
  std::vector<double> pdiff_trace;  // power difference at init and per outer pass
  VectorXd theta_sub;
  MatrixXcd precoder_sub;
  VectorXd eigen_spectrum;  // spectrum of G at the final angles
  pgm::Termination termination = pgm::Termination::max_iterations;
  double wall_time_s = 0.0;
  long n_objective_evals = 0;
  int n_outer = 0;
  bool no_positive_mode = false;
  std::string error;

  double final_pdiff() const { return pdiff_trace.back(); }
};

// Angle-only projected-gradient ascent on the power difference with the
// precoder held fixed — the same step sizing, backtracking, projection and
// termination machinery as the secrecy solver, on the cheaper objective.
CpdmReport solve_theta(const ChannelSet& ch, const RisParams& p,
                       const SystemConfig& cfg, const pgm::PgmOptions& opts,
                       const MatrixXcd& t, const VectorXd& theta_init);

struct CpdmOptions {
  pgm::PgmOptions ascent;  // options for the angle ascent passes
  PowerSplit split = PowerSplit::proportional;
  int alternations = 1;  // precoder->angles passes; the final precoder is
                         // always refreshed at the final angles
};

// Full surrogate pipeline: draw/accept initial angles, closed-form
// precoder, angle ascent, optionally alternate, and refresh the precoder at
// the final angles.
CpdmReport solve(const ChannelSet& ch, const RisParams& p,
                 const SystemConfig& cfg, const CpdmOptions& opts,
                 const std::optional<VectorXd>& theta_init = std::nullopt);

struct SurrogateCheck {
  bool is_psd = false;       // Fb - Fe numerically PSD
  double csec = 0.0;         // secrecy rate at (state, T)
  double pdiff_over_ln2 = 0.0;
  double gap = 0.0;          // pdiff/ln2 - csec; >= 0 whenever is_psd
  double taylor_envelope = 0.0;  // 0.5 (Tr Fb^2 + Tr Fe^2) / ln2
  double max_f_eigenvalue = 0.0; // largest eigenvalue across Fb, Fe
};

// Evaluates the surrogate bound ingredients at one operating point.
SurrogateCheck check_surrogate_bound(const EffectiveChannels& eff,
                                     const MatrixXcd& t,
                                     const SystemConfig& cfg);

}  // namespace rissec::cpdm
