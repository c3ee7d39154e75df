// Command-line front end: run experiment configs, fit the amplitude law
// for a given element loss, and validate configs without running them.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rissec/experiment.hpp"
#include "rissec/ris_model.hpp"
#include "rissec/serialize.hpp"
#include "rissec/types.hpp"

namespace {

using nlohmann::json;

rissec::CircuitParams load_circuit(const std::string& path) {
  rissec::CircuitParams cp;
  if (path.empty()) return cp;
  std::ifstream in(path);
  if (!in) throw rissec::config_error("cannot open circuit file " + path);
  json j;
  try {
    in >> j;
    if (!j.is_object()) throw rissec::config_error("circuit file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "l1")
        cp.l1 = value.get<double>();
      else if (key == "l2")
        cp.l2 = value.get<double>();
      else if (key == "frequency")
        cp.frequency = value.get<double>();
      else if (key == "resistance")
        cp.resistance = value.get<double>();
      else if (key == "z0")
        cp.z0 = value.get<double>();
      else if (key == "cap_min")
        cp.cap_min = value.get<double>();
      else if (key == "cap_max")
        cp.cap_max = value.get<double>();
      else
        throw rissec::config_error("unknown key '" + key + "' in circuit file");
    }
  } catch (const json::exception& e) {
    throw rissec::config_error(path + ": " + e.what());
  }
  return cp;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
  rissec::exp::ExperimentConfig cfg =
      rissec::exp::ExperimentConfig::from_file(config_path);
  if (!out_dir.empty()) cfg.output = out_dir;
  std::filesystem::create_directories(cfg.output);

  const rissec::exp::ExperimentResult table = rissec::exp::run_experiment(cfg);
  const std::string fam = rissec::exp::family_name(cfg.family);
  const std::string csv_path = cfg.output + "/" + fam + ".csv";
  rissec::exp::emit_csv(table, csv_path);
  rissec::exp::emit_plots(table, cfg.output);

  std::cout << fam << ": " << table.rows.size() << " rows -> " << csv_path
            << " and " << cfg.output << "/" << fam << ".svg\n";
  if (!table.failures.empty()) {
    std::cerr << table.failures.size() << " cell(s) skipped:\n";
    for (const std::string& f : table.failures) std::cerr << "  " << f << "\n";
    std::ofstream flog(cfg.output + "/" + fam + "_failures.txt");
    for (const std::string& f : table.failures) flog << f << "\n";
  }
  return 0;
}

int cmd_fit(double resistance, const std::string& circuit_file) {
  rissec::CircuitParams cp = load_circuit(circuit_file);
  cp.resistance = resistance;
  const rissec::RisFit fit = rissec::fit_ris_params(cp);
  std::cout << rissec::to_json(fit.params).dump(2) << "\n";
  std::cerr << "amplitude fit rms: " << fit.amplitude_rms << "\n";
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const rissec::exp::ExperimentConfig cfg =
      rissec::exp::ExperimentConfig::from_file(config_path);
  const auto series = cfg.series_labels();
  std::cout << "ok: " << rissec::exp::family_name(cfg.family) << ", "
            << cfg.sweep.size() << " sweep point(s), " << series.size()
            << " method(s), " << cfg.n_seeds << " seed(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate simulator for a lossy reflecting surface"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  int run_threads = 0;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", run_config, "JSON experiment config")->required();
  run->add_option("--out", run_out, "output directory (overrides the config)");
  run->add_option("--threads", run_threads, "worker thread count");

  double fit_r = 0.0;
  std::string fit_circuit;
  CLI::App* fit =
      app.add_subcommand("fit-ris", "Fit the amplitude law for a loss value");
  fit->add_option("--R", fit_r, "element resistance [ohm]")->required();
  fit->add_option("--circuit-file", fit_circuit, "JSON circuit overrides");

  std::string val_config;
  CLI::App* val = app.add_subcommand("validate", "Check a config and exit");
  val->add_option("config", val_config, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_config, run_out, run_threads);
    if (fit->parsed()) return cmd_fit(fit_r, fit_circuit);
    return cmd_validate(val_config);
  } catch (const rissec::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rissec::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
