#include "rissec/serialize.hpp"

#include <fstream>
#include <vector>

namespace rissec {

using nlohmann::json;

json to_json(const RisParams& p) {
  return json{{"beta_min", p.beta_min},   {"alpha", p.alpha},
              {"theta_tilde", p.theta_tilde}, {"theta_min", p.theta_min},
              {"theta_max", p.theta_max}, {"resistance", p.resistance}};
}

RisParams ris_params_from_json(const json& j) {
  RisParams p;
  try {
    p.beta_min = j.at("beta_min").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.theta_tilde = j.at("theta_tilde").get<double>();
    p.theta_min = j.at("theta_min").get<double>();
    p.theta_max = j.at("theta_max").get<double>();
    p.resistance = j.at("resistance").get<double>();
  } catch (const json::exception& e) {
    throw config_error(std::string("surface parameter JSON: ") + e.what());
  }
  p.validate();
  return p;
}

namespace {

json matrix_to_json(const MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

json options_to_json(const pgm::PgmOptions& o) {
  return json{{"max_outer", o.max_outer},
              {"max_inner", o.max_inner},
              {"tol", o.tol},
              {"backtrack", o.backtrack},
              {"tau", o.tau},
              {"theta_step_max", o.theta_step_max},
              {"step_mode", o.step_mode == pgm::StepMode::adaptive ? "adaptive" : "fixed"},
              {"fixed_step", o.fixed_step},
              {"optimize_theta", o.optimize_theta},
              {"with_ris", o.with_ris}};
}

}  // namespace

json to_json(const pgm::SolveReport& rep, const pgm::PgmOptions& opts,
             std::uint64_t seed) {
  json j;
  j["objective_trace"] = rep.objective_trace;
  j["theta_opt"] = std::vector<double>(rep.theta_opt.begin(), rep.theta_opt.end());
  j["precoder_opt"] = matrix_to_json(rep.precoder_opt);
  json steps = json::array();
  for (const auto& [st, sp] : rep.step_history)
    steps.push_back(json{{"theta", st}, {"precoder", sp}});
  j["step_history"] = std::move(steps);
  j["eval_trace"] = rep.eval_trace;
  j["termination"] =
      rep.termination == pgm::Termination::converged ? "converged" : "max_iterations";
  j["wall_time_s"] = rep.wall_time_s;
  j["n_objective_evals"] = rep.n_objective_evals;
  j["n_outer"] = rep.n_outer;
  j["init_theta_projected"] = rep.init_theta_projected;
  j["init_precoder_projected"] = rep.init_precoder_projected;
  j["max_iterate_power"] = rep.max_iterate_power;
  j["theta_always_feasible"] = rep.theta_always_feasible;
  j["error"] = rep.error;
  j["options"] = options_to_json(opts);
  j["seed"] = seed;
  return j;
}

json to_json(const cpdm::CpdmReport& rep, std::uint64_t seed) {
  json j;
  j["pdiff_trace"] = rep.pdiff_trace;
  j["theta_sub"] = std::vector<double>(rep.theta_sub.begin(), rep.theta_sub.end());
  j["precoder_sub"] = matrix_to_json(rep.precoder_sub);
  j["eigen_spectrum"] =
      std::vector<double>(rep.eigen_spectrum.begin(), rep.eigen_spectrum.end());
  j["termination"] =
      rep.termination == pgm::Termination::converged ? "converged" : "max_iterations";
  j["wall_time_s"] = rep.wall_time_s;
  j["n_objective_evals"] = rep.n_objective_evals;
  j["n_outer"] = rep.n_outer;
  j["no_positive_mode"] = rep.no_positive_mode;
  j["error"] = rep.error;
  j["seed"] = seed;
  return j;
}

namespace {

void write_matrix(std::ofstream& out, const char* name, const MatrixXcd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  std::vector<double> buf;
  buf.reserve(static_cast<size_t>(m.size()) * 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      buf.push_back(m(i, j).real());
      buf.push_back(m(i, j).imag());
    }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!out) throw std::runtime_error("channel dump: write failed");
}

MatrixXcd read_matrix(std::ifstream& in, const std::string& expect_name) {
  std::string name;
  Eigen::Index rows = 0, cols = 0;
  in >> name >> rows >> cols;
  if (!in || name != expect_name || rows < 1 || cols < 1)
    throw std::runtime_error("channel dump: malformed header for " + expect_name);
  in.ignore(1);  // the newline after the header line
  std::vector<double> buf(static_cast<size_t>(rows * cols) * 2);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!in) throw std::runtime_error("channel dump: truncated data for " + expect_name);
  MatrixXcd m(rows, cols);
  size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, k += 2)
      m(i, j) = Complex(buf[k], buf[k + 1]);
  return m;
}

}  // namespace

void dump_channels(const ChannelSet& ch, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "channelset v1\n";
  write_matrix(out, "tx_rx", ch.tx_rx);
  write_matrix(out, "tx_ris", ch.tx_ris);
  write_matrix(out, "ris_rx", ch.ris_rx);
  write_matrix(out, "tx_eve", ch.tx_eve);
  write_matrix(out, "ris_eve", ch.ris_eve);
}

ChannelSet load_channels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "channelset" || version != "v1")
    throw std::runtime_error("not a channel dump: " + path);
  in.ignore(1);
  ChannelSet ch;
  ch.tx_rx = read_matrix(in, "tx_rx");
  ch.tx_ris = read_matrix(in, "tx_ris");
  ch.ris_rx = read_matrix(in, "ris_rx");
  ch.tx_eve = read_matrix(in, "tx_eve");
  ch.ris_eve = read_matrix(in, "ris_eve");
  return ch;
}

}  // namespace rissec
