#include "rissec/experiment.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rissec/rng.hpp"
#include "rissec/secrecy.hpp"
#include "rissec/serialize.hpp"
#include "rissec/stats.hpp"

namespace rissec::exp {

using nlohmann::json;

namespace {

struct FamilyInfo {
  Family family;
  const char* name;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::rate_vs_power, "rate_vs_power"},
    {Family::rate_vs_M, "rate_vs_M"},
    {Family::rate_vs_R, "rate_vs_R"},
    {Family::runtime_vs_M, "runtime_vs_M"},
    {Family::convergence_trace, "convergence_trace"},
    {Family::stepsize_compare, "stepsize_compare"},
    {Family::cpdm_vs_M, "cpdm_vs_M"},
    {Family::cpdm_runtime, "cpdm_runtime"},
};

struct MethodInfo {
  Method method;
  const char* name;
};

constexpr MethodInfo kMethods[] = {
    {Method::practical_pgm, "practical_pgm"}, {Method::ideal_pgm, "ideal_pgm"},
    {Method::random_ris, "random_ris"},       {Method::no_ris, "no_ris"},
    {Method::cpdm, "cpdm"},
};

bool is_element_sweep(Family f) {
  return f == Family::rate_vs_M || f == Family::runtime_vs_M ||
         f == Family::stepsize_compare || f == Family::cpdm_vs_M ||
         f == Family::cpdm_runtime;
}

bool is_timed(Family f) {
  return f == Family::runtime_vs_M || f == Family::cpdm_runtime;
}

// Metric emission order is fixed so re-runs order rows identically.
std::vector<const char*> family_metrics(Family f) {
  switch (f) {
    case Family::cpdm_vs_M: return {"pdiff"};
    case Family::runtime_vs_M:
    case Family::cpdm_runtime: return {"wall_time"};
    case Family::stepsize_compare: return {"csec", "n_evals"};
    case Family::convergence_trace: return {"n_outer"};
    default: return {"csec"};
  }
}

}  // namespace

std::string family_name(Family f) {
  for (const auto& fi : kFamilies)
    if (fi.family == f) return fi.name;
  throw config_error("unknown family enum value");
}

Family family_from_string(const std::string& s) {
  for (const auto& fi : kFamilies)
    if (s == fi.name) return fi.family;
  throw config_error("unknown experiment family '" + s + "'");
}

std::string method_name(Method m) {
  for (const auto& mi : kMethods)
    if (mi.method == m) return mi.name;
  throw config_error("unknown method enum value");
}

Method method_from_string(const std::string& s) {
  for (const auto& mi : kMethods)
    if (s == mi.name) return mi.method;
  throw config_error("unknown method '" + s + "'");
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* context) {
  if (!j.is_object())
    throw config_error(std::string(context) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw config_error("unknown key '" + key + "' in " + context);
  }
}

Vector3d parse_point(const json& j, const char* name) {
  if (!j.is_array() || j.size() != 3)
    throw config_error(std::string(name) + " must be an array of 3 coordinates");
  return Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <typename T>
void maybe(const json& j, const char* key, T& target) {
  if (auto it = j.find(key); it != j.end()) target = it->get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    check_keys(j, {"family", "sweep", "n_seeds", "seed", "methods", "system",
                   "geometry", "path_loss", "circuit", "resistance",
                   "ris_params", "pgm", "cpdm", "runtime_outer", "trace_outer",
                   "output"},
               "config");
    cfg.family = family_from_string(j.at("family").get<std::string>());
    cfg.sweep = j.at("sweep").get<std::vector<double>>();
    maybe(j, "n_seeds", cfg.n_seeds);
    maybe(j, "seed", cfg.seed0);
    if (auto it = j.find("methods"); it != j.end()) {
      for (const auto& m : *it)
        cfg.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (auto it = j.find("system"); it != j.end()) {
      const json& s = *it;
      check_keys(s,
                 {"n_tx", "n_rx", "n_eve", "n_streams", "n_elements",
                  "power_dbm", "noise_dbm", "noise_rx_dbm", "noise_eve_dbm"},
                 "system");
      maybe(s, "n_tx", cfg.system.n_tx);
      maybe(s, "n_rx", cfg.system.n_rx);
      maybe(s, "n_eve", cfg.system.n_eve);
      maybe(s, "n_streams", cfg.system.n_streams);
      maybe(s, "n_elements", cfg.system.n_elements);
      if (auto p = s.find("power_dbm"); p != s.end())
        cfg.system.power = dbm_to_watt(p->get<double>());
      if (auto p = s.find("noise_dbm"); p != s.end()) {
        cfg.system.noise_rx = dbm_to_watt(p->get<double>());
        cfg.system.noise_eve = cfg.system.noise_rx;
      }
      if (auto p = s.find("noise_rx_dbm"); p != s.end())
        cfg.system.noise_rx = dbm_to_watt(p->get<double>());
      if (auto p = s.find("noise_eve_dbm"); p != s.end())
        cfg.system.noise_eve = dbm_to_watt(p->get<double>());
    }
    if (auto it = j.find("geometry"); it != j.end()) {
      const json& g = *it;
      check_keys(g, {"alice", "ris", "bob", "eve"}, "geometry");
      if (g.contains("alice")) cfg.geometry.alice = parse_point(g["alice"], "alice");
      if (g.contains("ris")) cfg.geometry.ris = parse_point(g["ris"], "ris");
      if (g.contains("bob")) cfg.geometry.bob = parse_point(g["bob"], "bob");
      if (g.contains("eve")) cfg.geometry.eve = parse_point(g["eve"], "eve");
    }
    if (auto it = j.find("path_loss"); it != j.end()) {
      const json& p = *it;
      check_keys(p,
                 {"rho0_db", "d0", "gamma_tx_ris", "gamma_ris_rx",
                  "gamma_ris_eve", "gamma_tx_rx", "gamma_tx_eve"},
                 "path_loss");
      maybe(p, "rho0_db", cfg.path_loss.rho0_db);
      maybe(p, "d0", cfg.path_loss.d0);
      maybe(p, "gamma_tx_ris", cfg.path_loss.gamma_tx_ris);
      maybe(p, "gamma_ris_rx", cfg.path_loss.gamma_ris_rx);
      maybe(p, "gamma_ris_eve", cfg.path_loss.gamma_ris_eve);
      maybe(p, "gamma_tx_rx", cfg.path_loss.gamma_tx_rx);
      maybe(p, "gamma_tx_eve", cfg.path_loss.gamma_tx_eve);
    }
    if (auto it = j.find("circuit"); it != j.end()) {
      const json& c = *it;
      check_keys(c, {"l1", "l2", "frequency", "z0", "cap_min", "cap_max"},
                 "circuit");
      maybe(c, "l1", cfg.circuit.l1);
      maybe(c, "l2", cfg.circuit.l2);
      maybe(c, "frequency", cfg.circuit.frequency);
      maybe(c, "z0", cfg.circuit.z0);
      maybe(c, "cap_min", cfg.circuit.cap_min);
      maybe(c, "cap_max", cfg.circuit.cap_max);
    }
    maybe(j, "resistance", cfg.resistance);
    if (auto it = j.find("ris_params"); it != j.end())
      cfg.explicit_params = ris_params_from_json(*it);
    if (auto it = j.find("pgm"); it != j.end()) {
      const json& p = *it;
      check_keys(p,
                 {"max_outer", "max_inner", "tol", "backtrack", "tau",
                  "theta_step_max", "step_mode", "fixed_step"},
                 "pgm");
      maybe(p, "max_outer", cfg.pgm.max_outer);
      maybe(p, "max_inner", cfg.pgm.max_inner);
      maybe(p, "tol", cfg.pgm.tol);
      maybe(p, "backtrack", cfg.pgm.backtrack);
      maybe(p, "tau", cfg.pgm.tau);
      maybe(p, "theta_step_max", cfg.pgm.theta_step_max);
      if (auto m = p.find("step_mode"); m != p.end()) {
        const std::string mode = m->get<std::string>();
        if (mode == "adaptive")
          cfg.pgm.step_mode = pgm::StepMode::adaptive;
        else if (mode == "fixed")
          cfg.pgm.step_mode = pgm::StepMode::fixed;
        else
          throw config_error("step_mode must be 'adaptive' or 'fixed'");
      }
      maybe(p, "fixed_step", cfg.pgm.fixed_step);
    }
    if (auto it = j.find("cpdm"); it != j.end()) {
      const json& c = *it;
      check_keys(c, {"split", "alternations"}, "cpdm");
      if (auto s = c.find("split"); s != c.end()) {
        const std::string split = s->get<std::string>();
        if (split == "proportional")
          cfg.split = cpdm::PowerSplit::proportional;
        else if (split == "top_mode_only")
          cfg.split = cpdm::PowerSplit::top_mode_only;
        else if (split == "equal")
          cfg.split = cpdm::PowerSplit::equal;
        else
          throw config_error("split must be proportional, top_mode_only or equal");
      }
      maybe(c, "alternations", cfg.cpdm_alternations);
    }
    maybe(j, "runtime_outer", cfg.runtime_outer);
    maybe(j, "trace_outer", cfg.trace_outer);
    maybe(j, "output", cfg.output);
  } catch (const json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::validate() const {
  if (sweep.empty()) throw config_error("sweep must be non-empty");
  for (size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i] > sweep[i - 1]))
      throw config_error("sweep values must be strictly increasing");
  if (n_seeds < 1) throw config_error("n_seeds must be >= 1");
  if (runtime_outer < 1 || trace_outer < 1)
    throw config_error("iteration budgets must be >= 1");
  if (resistance < 0.0) throw config_error("resistance must be >= 0");
  if (cpdm_alternations < 1) throw config_error("alternations must be >= 1");

  if (is_element_sweep(family) || family == Family::convergence_trace) {
    for (double v : sweep)
      if (!(v >= 1.0) || v != std::floor(v))
        throw config_error("element counts must be positive integers");
  }
  if (family == Family::rate_vs_R) {
    for (double v : sweep)
      if (v < 0.0) throw config_error("resistance sweep values must be >= 0");
    if (explicit_params)
      throw config_error("rate_vs_R sweeps the circuit loss; explicit "
                         "ris_params cannot be combined with it");
  }
  if (family == Family::convergence_trace && sweep.size() != 1)
    throw config_error("convergence_trace takes a single sweep value "
                       "(the element count)");

  std::set<Method> seen;
  for (Method m : methods)
    if (!seen.insert(m).second)
      throw config_error("duplicate method '" + method_name(m) + "'");
  const auto labels = series_labels();
  if (explicit_params &&
      std::find(labels.begin(), labels.end(), "ideal_pgm") != labels.end())
    throw config_error("ideal_pgm needs the lossless circuit fit; it cannot "
                       "be combined with explicit ris_params");

  system.validate();
  geometry.validate();
  path_loss.validate();
  circuit.validate();
  if (explicit_params) explicit_params->validate();
}

std::vector<std::string> ExperimentConfig::series_labels() const {
  if (family == Family::convergence_trace) return {"cpdm_init", "random_init"};
  if (family == Family::stepsize_compare)
    return {"adaptive", "fixed_0.1", "fixed_0.01", "fixed_0.001"};
  std::vector<Method> ms = methods;
  if (ms.empty()) {
    switch (family) {
      case Family::runtime_vs_M: ms = {Method::practical_pgm}; break;
      case Family::cpdm_runtime: ms = {Method::cpdm}; break;
      case Family::cpdm_vs_M: ms = {Method::cpdm, Method::random_ris}; break;
      default:
        ms = {Method::practical_pgm, Method::ideal_pgm, Method::random_ris,
              Method::no_ris, Method::cpdm};
    }
  }
  std::vector<std::string> out;
  out.reserve(ms.size());
  for (Method m : ms) out.push_back(method_name(m));
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Cell execution

struct RunContext {
  std::vector<RisParams> practical;  // per sweep index for rate_vs_R, else one
  std::optional<RisParams> ideal;    // lossless fit, when ideal_pgm runs
};

struct MethodRun {
  double csec = 0.0;
  double pdiff = 0.0;
  double wall_time = 0.0;
  double n_evals = 0.0;
  double n_outer = 0.0;
  std::string error;
};

struct CellOutcome {
  bool ok = false;
  std::string reason;
  std::vector<double> metric_values;  // aligned with family_metrics()
  std::vector<double> trace;          // convergence_trace: clamped, padded
};

VectorXd draw_random_theta(const SystemConfig& sys, const RisParams& p) {
  StreamRng rng(sys.seed, "random_ris/theta");
  VectorXd theta(sys.n_elements);
  for (int m = 0; m < sys.n_elements; ++m)
    theta[m] = rng.uniform(p.theta_min, p.theta_max);
  return theta;
}

// Uninformed start for the convergence-trace comparison: a complex Gaussian
// precoder scaled to fill the power budget. (The solver's own default start
// is an informed one — singular directions of the direct link — so it would
// not serve as the "random start" arm of the comparison.)
MatrixXcd draw_random_precoder(const SystemConfig& sys) {
  StreamRng rng(sys.seed, "trace/t_init");
  MatrixXcd t(sys.n_tx, sys.n_streams);
  for (int i = 0; i < sys.n_tx; ++i)
    for (int j = 0; j < sys.n_streams; ++j) t(i, j) = rng.complex_normal();
  return t * std::sqrt(sys.power / t.squaredNorm());
}

// Runs one of the five comparison methods and evaluates its headline
// numbers at the final operating point (under the practical law for every
// surface-assisted method, which for ideal_pgm is the cross-model
// re-evaluation of its losslessly optimized configuration).
MethodRun execute_method(Method m, const ChannelSet& ch, const SystemConfig& sys,
                         const RisParams& practical, const RisParams* ideal,
                         const pgm::PgmOptions& opts,
                         const cpdm::CpdmOptions& copts) {
  MethodRun out;
  if (m == Method::cpdm) {
    const cpdm::CpdmReport rep = cpdm::solve(ch, practical, sys, copts);
    if (!rep.error.empty()) {
      out.error = rep.error;
      return out;
    }
    out.pdiff = rep.final_pdiff();
    const RisState st = RisState::from_theta_unbounded(rep.theta_sub, practical);
    out.csec = secrecy_rate(ch, st, rep.precoder_sub, sys).clamped();
    out.wall_time = rep.wall_time_s;
    out.n_evals = static_cast<double>(rep.n_objective_evals);
    out.n_outer = rep.n_outer;
    return out;
  }

  pgm::PgmOptions o = opts;
  const RisParams* solve_params = &practical;
  std::optional<VectorXd> theta0;
  if (m == Method::ideal_pgm) solve_params = ideal;
  if (m == Method::random_ris) {
    o.optimize_theta = false;
    theta0 = draw_random_theta(sys, practical);
  }
  if (m == Method::no_ris) o.with_ris = false;

  const pgm::SolveReport rep =
      pgm::solve(ch, *solve_params, sys, o, std::nullopt, theta0);
  if (!rep.error.empty()) {
    out.error = rep.error;
    return out;
  }
  out.wall_time = rep.wall_time_s;
  out.n_evals = static_cast<double>(rep.n_objective_evals);
  out.n_outer = rep.n_outer;
  if (m == Method::no_ris) {
    const EffectiveChannels eff{ch.tx_rx, ch.tx_eve};
    out.csec = std::max(0.0, rep.final_objective());
    out.pdiff = channel_power_diff(eff, rep.precoder_opt, sys);
  } else {
    const RisState st = RisState::from_theta_unbounded(rep.theta_opt, practical);
    out.csec = secrecy_rate(ch, st, rep.precoder_opt, sys).clamped();
    out.pdiff = channel_power_diff(ch, st, rep.precoder_opt, sys);
  }
  return out;
}

double median3(double a, double b, double c) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  return v[1];
}

CellOutcome run_cell(const ExperimentConfig& cfg, const RunContext& ctx, int xi,
                     const std::string& series, std::uint64_t seed) {
  CellOutcome out;
  SystemConfig sys = cfg.system;
  sys.seed = seed;
  const double x = cfg.sweep[static_cast<size_t>(xi)];
  if (cfg.family == Family::rate_vs_power)
    sys.power = dbm_to_watt(x);
  else if (is_element_sweep(cfg.family))
    sys.n_elements = static_cast<int>(x);
  else if (cfg.family == Family::convergence_trace)
    sys.n_elements = static_cast<int>(cfg.sweep[0]);
  sys.validate();

  const RisParams& practical =
      ctx.practical[cfg.family == Family::rate_vs_R ? static_cast<size_t>(xi) : 0];
  const RisParams* ideal = ctx.ideal ? &*ctx.ideal : nullptr;
  const ChannelSet ch = generate_channels(sys, cfg.geometry, cfg.path_loss);
  const cpdm::CpdmOptions copts = cfg.cpdm_options();

  switch (cfg.family) {
    case Family::rate_vs_power:
    case Family::rate_vs_M:
    case Family::rate_vs_R:
    case Family::cpdm_vs_M: {
      const MethodRun run = execute_method(method_from_string(series), ch, sys,
                                           practical, ideal, cfg.pgm, copts);
      if (!run.error.empty()) {
        out.reason = run.error;
        return out;
      }
      out.metric_values = {cfg.family == Family::cpdm_vs_M ? run.pdiff : run.csec};
      out.ok = true;
      return out;
    }
    case Family::runtime_vs_M:
    case Family::cpdm_runtime: {
      pgm::PgmOptions o = cfg.pgm;
      o.tol = 0.0;
      o.max_outer = cfg.runtime_outer;
      cpdm::CpdmOptions co = copts;
      co.ascent.tol = 0.0;
      co.ascent.max_outer = cfg.runtime_outer;
      MethodRun runs[3];
      for (MethodRun& r : runs) {
        r = execute_method(method_from_string(series), ch, sys, practical,
                           ideal, o, co);
        if (!r.error.empty()) {
          out.reason = r.error;
          return out;
        }
      }
      out.metric_values = {
          median3(runs[0].wall_time, runs[1].wall_time, runs[2].wall_time)};
      out.ok = true;
      return out;
    }
    case Family::stepsize_compare: {
      pgm::PgmOptions o = cfg.pgm;
      if (series == "adaptive") {
        o.step_mode = pgm::StepMode::adaptive;
      } else {
        o.step_mode = pgm::StepMode::fixed;
        if (series == "fixed_0.1")
          o.fixed_step = 0.1;
        else if (series == "fixed_0.01")
          o.fixed_step = 0.01;
        else
          o.fixed_step = 0.001;
      }
      const MethodRun run = execute_method(Method::practical_pgm, ch, sys,
                                           practical, ideal, o, copts);
      if (!run.error.empty()) {
        out.reason = run.error;
        return out;
      }
      out.metric_values = {run.csec, run.n_evals};
      out.ok = true;
      return out;
    }
    case Family::convergence_trace: {
      pgm::PgmOptions o = cfg.pgm;
      o.tol = 0.0;
      o.max_outer = cfg.trace_outer;
      pgm::SolveReport rep;
      if (series == "cpdm_init") {
        const cpdm::CpdmReport warm = cpdm::solve(ch, practical, sys, copts);
        if (!warm.error.empty()) {
          out.reason = warm.error;
          return out;
        }
        rep = pgm::solve(ch, practical, sys, o, warm.precoder_sub, warm.theta_sub);
      } else {
        // Random start: Gaussian precoder at full power; the angles fall
        // back to the solver's uniform draw over the feasible interval.
        rep = pgm::solve(ch, practical, sys, o, draw_random_precoder(sys),
                         std::nullopt);
      }
      if (!rep.error.empty()) {
        out.reason = rep.error;
        return out;
      }
      // At tol = 0 the ascent stops only at an exact fixed point, where
      // further passes would repeat the same value: pad so every seed spans
      // the full iteration grid.
      std::vector<double> tr = rep.objective_trace;
      const double last = tr.back();
      tr.resize(static_cast<size_t>(cfg.trace_outer) + 1, last);
      for (double& v : tr) v = std::max(0.0, v);
      out.trace = std::move(tr);
      out.metric_values = {static_cast<double>(rep.n_outer)};
      out.ok = true;
      return out;
    }
  }
  out.reason = "unhandled family";
  return out;
}

CellOutcome run_cell_guarded(const ExperimentConfig& cfg, const RunContext& ctx,
                             int xi, const std::string& series,
                             std::uint64_t seed) {
  try {
    return run_cell(cfg, ctx, xi, series, seed);
  } catch (const std::exception& e) {
    CellOutcome out;
    out.reason = e.what();
    return out;
  }
}

std::string format_x(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> series = cfg.series_labels();
  const std::string fam = family_name(cfg.family);

  RunContext ctx;
  std::map<double, RisParams> fit_cache;
  auto params_for = [&](double r) -> RisParams {
    if (auto it = fit_cache.find(r); it != fit_cache.end()) return it->second;
    CircuitParams cp = cfg.circuit;
    cp.resistance = r;
    const RisParams p = fit_ris_params(cp).params;
    fit_cache.emplace(r, p);
    return p;
  };
  if (cfg.family == Family::rate_vs_R) {
    for (double r : cfg.sweep) ctx.practical.push_back(params_for(r));
  } else if (cfg.explicit_params) {
    ctx.practical.push_back(*cfg.explicit_params);
  } else {
    ctx.practical.push_back(params_for(cfg.resistance));
  }
  if (std::find(series.begin(), series.end(), "ideal_pgm") != series.end())
    ctx.ideal = params_for(0.0);

  const int nx = static_cast<int>(cfg.sweep.size());
  const int nser = static_cast<int>(series.size());
  const int nseed = cfg.n_seeds;
  const long total = static_cast<long>(nx) * nser * nseed;
  std::vector<CellOutcome> cells(static_cast<size_t>(total));
  auto cell_index = [&](int xi, int si, int sdi) {
    return (static_cast<long>(xi) * nser + si) * nseed + sdi;
  };

  // The wall-clock families run their cells back to back so timings are
  // not distorted by sibling cells on other cores.
  if (is_timed(cfg.family)) {
    for (long c = 0; c < total; ++c) {
      const int sdi = static_cast<int>(c % nseed);
      const int si = static_cast<int>((c / nseed) % nser);
      const int xi = static_cast<int>(c / (static_cast<long>(nseed) * nser));
      cells[static_cast<size_t>(c)] =
          run_cell_guarded(cfg, ctx, xi, series[static_cast<size_t>(si)],
                           cfg.seed0 + static_cast<std::uint64_t>(sdi));
    }
  } else {
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < total; ++c) {
      const int sdi = static_cast<int>(c % nseed);
      const int si = static_cast<int>((c / nseed) % nser);
      const int xi = static_cast<int>(c / (static_cast<long>(nseed) * nser));
      cells[static_cast<size_t>(c)] =
          run_cell_guarded(cfg, ctx, xi, series[static_cast<size_t>(si)],
                           cfg.seed0 + static_cast<std::uint64_t>(sdi));
    }
  }

  ExperimentResult out;
  for (int xi = 0; xi < nx; ++xi)
    for (int si = 0; si < nser; ++si)
      for (int sdi = 0; sdi < nseed; ++sdi) {
        const CellOutcome& c = cells[static_cast<size_t>(cell_index(xi, si, sdi))];
        if (!c.ok)
          out.failures.push_back(
              "x=" + format_x(cfg.sweep[static_cast<size_t>(xi)]) +
              ",method=" + series[static_cast<size_t>(si)] +
              ",seed=" + std::to_string(cfg.seed0 + static_cast<std::uint64_t>(sdi)) +
              ": " + c.reason);
      }

  const std::vector<const char*> metrics = family_metrics(cfg.family);
  auto push_group = [&](double x, const std::string& label,
                        const std::vector<const char*>& names,
                        const std::vector<std::vector<double>>& per_seed_values,
                        const std::vector<std::string>& seed_names) {
    // per_seed_values: one inner vector per surviving seed, aligned with
    // names; seed_names parallel to per_seed_values.
    for (size_t s = 0; s < per_seed_values.size(); ++s)
      for (size_t mi = 0; mi < names.size(); ++mi)
        out.rows.push_back({fam, x, label, seed_names[s], names[mi],
                            per_seed_values[s][mi]});
    if (per_seed_values.empty()) return;
    std::vector<double> col(per_seed_values.size());
    for (size_t mi = 0; mi < names.size(); ++mi) {
      for (size_t s = 0; s < per_seed_values.size(); ++s)
        col[s] = per_seed_values[s][mi];
      out.rows.push_back({fam, x, label, "mean", names[mi], stats::mean(col)});
    }
    if (per_seed_values.size() >= 2)
      for (size_t mi = 0; mi < names.size(); ++mi) {
        for (size_t s = 0; s < per_seed_values.size(); ++s)
          col[s] = per_seed_values[s][mi];
        out.rows.push_back(
            {fam, x, label, "stderr", names[mi], stats::stderr_mean(col)});
      }
  };

  if (cfg.family == Family::convergence_trace) {
    for (int k = 0; k <= cfg.trace_outer; ++k)
      for (int si = 0; si < nser; ++si) {
        std::vector<const char*> names = {"csec"};
        if (k == 0) names.push_back("n_outer");
        std::vector<std::vector<double>> values;
        std::vector<std::string> seed_names;
        for (int sdi = 0; sdi < nseed; ++sdi) {
          const CellOutcome& c =
              cells[static_cast<size_t>(cell_index(0, si, sdi))];
          if (!c.ok) continue;
          std::vector<double> v = {c.trace[static_cast<size_t>(k)]};
          if (k == 0) v.push_back(c.metric_values[0]);
          values.push_back(std::move(v));
          seed_names.push_back(
              std::to_string(cfg.seed0 + static_cast<std::uint64_t>(sdi)));
        }
        push_group(k, series[static_cast<size_t>(si)], names, values, seed_names);
      }
  } else {
    for (int xi = 0; xi < nx; ++xi)
      for (int si = 0; si < nser; ++si) {
        std::vector<std::vector<double>> values;
        std::vector<std::string> seed_names;
        for (int sdi = 0; sdi < nseed; ++sdi) {
          const CellOutcome& c =
              cells[static_cast<size_t>(cell_index(xi, si, sdi))];
          if (!c.ok) continue;
          values.push_back(c.metric_values);
          seed_names.push_back(
              std::to_string(cfg.seed0 + static_cast<std::uint64_t>(sdi)));
        }
        push_group(cfg.sweep[static_cast<size_t>(xi)],
                   series[static_cast<size_t>(si)], metrics, values, seed_names);
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {
constexpr const char* kCsvHeader = "family,x,method,seed,metric,value";
}

std::string csv_string(const std::vector<ResultRow>& rows) {
  std::string s = kCsvHeader;
  s += '\n';
  char buf[48];
  for (const ResultRow& r : rows) {
    s += r.family;
    s += ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.x);
    s += buf;
    s += ',';
    s += r.method;
    s += ',';
    s += r.seed;
    s += ',';
    s += r.metric;
    s += ',';
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    s += buf;
    s += '\n';
  }
  return s;
}

void emit_csv(const ExperimentResult& table, const std::string& path) {
  std::ofstream out_file(path, std::ios::binary);  // no newline translation
  if (!out_file) throw std::runtime_error("cannot open " + path + " for writing");
  out_file << csv_string(table.rows);
  if (!out_file) throw std::runtime_error("write failed: " + path);
}

std::vector<ResultRow> parse_csv(const std::string& csv) {
  std::vector<ResultRow> rows;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw config_error("bad CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 6> f;
    size_t start = 0;
    for (int i = 0; i < 6; ++i) {
      const size_t comma = line.find(',', start);
      if (i < 5) {
        if (comma == std::string::npos)
          throw config_error("CSV row with fewer than 6 fields: " + line);
        f[static_cast<size_t>(i)] = line.substr(start, comma - start);
        start = comma + 1;
      } else {
        if (comma != std::string::npos)
          throw config_error("CSV row with more than 6 fields: " + line);
        f[static_cast<size_t>(i)] = line.substr(start);
      }
    }
    ResultRow r;
    r.family = f[0];
    r.x = std::stod(f[1]);
    r.method = f[2];
    r.seed = f[3];
    r.metric = f[4];
    r.value = std::stod(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Plots

namespace {

struct PlotAxes {
  const char* headline;
  const char* x_label;
  const char* y_label;
};

PlotAxes plot_axes(const std::string& family) {
  if (family == "rate_vs_power")
    return {"csec", "transmit power [dBm]", "secrecy rate [bit/s/Hz]"};
  if (family == "rate_vs_M")
    return {"csec", "surface elements", "secrecy rate [bit/s/Hz]"};
  if (family == "rate_vs_R")
    return {"csec", "element resistance [ohm]", "secrecy rate [bit/s/Hz]"};
  if (family == "runtime_vs_M")
    return {"wall_time", "surface elements", "wall time [s]"};
  if (family == "convergence_trace")
    return {"csec", "outer iteration", "secrecy rate [bit/s/Hz]"};
  if (family == "stepsize_compare")
    return {"csec", "surface elements", "secrecy rate [bit/s/Hz]"};
  if (family == "cpdm_vs_M")
    return {"pdiff", "surface elements", "channel power difference"};
  if (family == "cpdm_runtime")
    return {"wall_time", "surface elements", "wall time [s]"};
  throw config_error("unknown experiment family '" + family + "'");
}

}  // namespace

plot::PlotSpec make_family_plot(const std::vector<ResultRow>& rows,
                                const std::string& family) {
  const PlotAxes axes = plot_axes(family);
  plot::PlotSpec spec;
  spec.title = family;
  spec.x_label = axes.x_label;
  spec.y_label = axes.y_label;

  std::vector<std::string> order;
  std::map<std::string, plot::Series> bag;
  for (const ResultRow& r : rows) {
    if (r.family != family || r.metric != axes.headline || r.seed != "mean")
      continue;
    auto [it, inserted] = bag.try_emplace(r.method);
    if (inserted) {
      it->second.label = r.method;
      order.push_back(r.method);
    }
    it->second.x.push_back(r.x);
    it->second.y.push_back(r.value);
    it->second.yerr.push_back(0.0);
  }
  for (const ResultRow& r : rows) {
    if (r.family != family || r.metric != axes.headline || r.seed != "stderr")
      continue;
    auto it = bag.find(r.method);
    if (it == bag.end()) continue;
    for (size_t i = 0; i < it->second.x.size(); ++i)
      if (it->second.x[i] == r.x) {
        it->second.yerr[i] = r.value;
        break;
      }
  }
  for (const std::string& label : order) {
    plot::Series s = bag[label];
    bool any_err = false;
    for (double e : s.yerr) any_err = any_err || e > 0.0;
    if (!any_err) s.yerr.clear();
    spec.series.push_back(std::move(s));
  }
  if (spec.series.empty())
    throw config_error("no mean rows for family '" + family + "' in table");
  return spec;
}

void emit_plots(const ExperimentResult& table, const std::string& dir) {
  std::vector<std::string> families;
  for (const ResultRow& r : table.rows)
    if (std::find(families.begin(), families.end(), r.family) == families.end())
      families.push_back(r.family);
  for (const std::string& fam : families) {
    const plot::PlotSpec spec = make_family_plot(table.rows, fam);
    const std::string base = dir.empty() ? std::string(".") : dir;
    plot::write_svg(spec, base + "/" + fam + ".svg");
  }
}

}  // namespace rissec::exp
