// Configuration-driven sweep harness: runs the solver methods over a grid
// of (sweep value, method, seed) cells, aggregates Monte Carlo statistics,
// and emits CSV tables and SVG plots. One CSV row per
// (family, x, method, seed, metric); aggregate rows use seed "mean" and
// "stderr".
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rissec/channel.hpp"
#include "rissec/cpdm.hpp"
#include "rissec/pgm.hpp"
#include "rissec/ris_model.hpp"
#include "rissec/svg_plot.hpp"
#include "rissec/types.hpp"

namespace rissec::exp {

enum class Family {
  rate_vs_power,      // x: transmit power [dBm]; metric csec
  rate_vs_M,          // x: element count;        metric csec
  rate_vs_R,          // x: element loss [ohm];   metric csec
  runtime_vs_M,       // x: element count;        metric wall_time (fixed budget)
  convergence_trace,  // x: outer iteration;      metrics csec (per iteration), n_outer
  stepsize_compare,   // x: element count;        metrics csec, n_evals per step policy
  cpdm_vs_M,          // x: element count;        metric pdiff
  cpdm_runtime,       // x: element count;        metric wall_time (fixed budget)
};

enum class Method { practical_pgm, ideal_pgm, random_ris, no_ris, cpdm };

std::string family_name(Family f);
Family family_from_string(const std::string& s);
std::string method_name(Method m);
Method method_from_string(const std::string& s);

struct ExperimentConfig {
  Family family = Family::rate_vs_M;
  std::vector<double> sweep;       // x grid (for convergence_trace: the single element count)
  int n_seeds = 50;
  std::uint64_t seed0 = 1;         // seed of realization i is seed0 + i
  std::vector<Method> methods;     // empty selects the family default

  SystemConfig system;             // powers already linear (converted at parse)
  Geometry geometry;
  PathLossModel path_loss;
  CircuitParams circuit;           // basis for the amplitude-law fits
  double resistance = 2.0;         // element loss when the family does not sweep it
  std::optional<RisParams> explicit_params;  // bypasses the circuit fit

  pgm::PgmOptions pgm;
  cpdm::PowerSplit split = cpdm::PowerSplit::proportional;
  int cpdm_alternations = 1;

  int runtime_outer = 50;  // fixed outer budget of the runtime families
  int trace_outer = 60;    // iteration budget of convergence_trace
  std::string output = ".";

  // Parses the declarative JSON config; unknown keys are rejected. Powers
  // are given in dBm ("power_dbm", "noise_dbm", ...) and converted here.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);

  void validate() const;

  // The method list with family defaults applied, as CSV series labels.
  std::vector<std::string> series_labels() const;

  cpdm::CpdmOptions cpdm_options() const {
    cpdm::CpdmOptions o;
    o.ascent = pgm;
    o.split = split;
    o.alternations = cpdm_alternations;
    return o;
  }
};

struct ResultRow {
  std::string family;
  double x = 0.0;
  std::string method;  // method or series label
  std::string seed;    // decimal seed, "mean", or "stderr"
  std::string metric;  // csec | pdiff | wall_time | n_outer | n_evals
  double value = 0.0;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> failures;  // "x=..,method=..,seed=..: reason" per skipped cell
};

// Runs every (x, method, seed) cell, concurrently for the rate families
// and serially for the wall-clock families, and assembles rows in the
// canonical (family, x, method, seed, metric) order with mean rows always
// and stderr rows when two or more seeds survive. Cell failures are
// recorded and skipped, never fatal.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string csv_string(const std::vector<ResultRow>& rows);
void emit_csv(const ExperimentResult& table, const std::string& path);
std::vector<ResultRow> parse_csv(const std::string& csv);

// The plot for one family present in the table: x from the sweep, y from
// the family's headline metric's mean rows, stderr rows as error bars, one
// series per method label. Exposed so tests can assert on the arrays.
plot::PlotSpec make_family_plot(const std::vector<ResultRow>& rows,
                                const std::string& family);

// One SVG per family present in the table, named <dir>/<family>.svg.
void emit_plots(const ExperimentResult& table, const std::string& dir);

}  // namespace rissec::exp
