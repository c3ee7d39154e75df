#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rissec/pgm.hpp"
#include "rissec/rng.hpp"
#include "test_util.hpp"

using namespace rissec;
using testutil::test_params;
using testutil::toy_system;
using testutil::unit_channels;

namespace {

bool bit_equal_vec(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("first angle step scales the largest gradient entry to the cap") {
  VectorXd g(3);
  g << 1.0, -4.0, 2.0;
  CHECK(pgm::init_step_theta(g, 0.7) == doctest::Approx(0.175).epsilon(1e-15));
  CHECK_THROWS_AS(pgm::init_step_theta(VectorXd::Zero(3), 0.7),
                  std::domain_error);
  CHECK_THROWS_AS(pgm::init_step_theta(g, 0.0), config_error);
}

TEST_CASE("first precoder step normalizes the raw displacement") {
  const MatrixXcd g = testutil::random_matrix(4, 2, 40, "g");
  const double power = 10.0, tau = 0.5;
  const double step = pgm::init_step_precoder(g, power, tau);
  CHECK(step == doctest::Approx(tau * std::sqrt(power) / g.norm()).epsilon(1e-15));
  CHECK((step * g).norm() ==
        doctest::Approx(tau * std::sqrt(power)).epsilon(1e-12));
  CHECK_THROWS_AS(pgm::init_step_precoder(MatrixXcd::Zero(2, 2), power, tau),
                  std::domain_error);
  CHECK_THROWS_AS(pgm::init_step_precoder(g, -1.0, tau), config_error);
}

TEST_CASE("precoder projection: scale onto the ball, keep the interior") {
  const MatrixXcd big = 5.0 * testutil::random_matrix(3, 2, 41, "t");
  REQUIRE(big.squaredNorm() > 10.0);
  const Precoder proj = pgm::project_precoder(big, 10.0);
  CHECK(proj.power() == doctest::Approx(10.0).epsilon(1e-12));
  // direction is preserved
  const Complex ratio = proj.mat(0, 0) / big(0, 0);
  CHECK((proj.mat - ratio * big).cwiseAbs().maxCoeff() < 1e-12);

  const MatrixXcd small = 0.1 * testutil::random_matrix(3, 2, 41, "t");
  const Precoder kept = pgm::project_precoder(small, 10.0);
  CHECK((kept.mat - small).cwiseAbs().maxCoeff() == 0.0);

  const Precoder zero = pgm::project_precoder(MatrixXcd::Zero(3, 2), 10.0);
  CHECK(zero.power() == 0.0);

  CHECK_THROWS_AS(pgm::project_precoder(big, 0.0), config_error);
}

TEST_CASE("ascent produces monotone traces and feasible iterates across seeds") {
  const RisParams p = test_params();
  pgm::PgmOptions opts;
  opts.max_outer = 40;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemConfig cfg = toy_system(2, 8);
    cfg.seed = seed;
    const ChannelSet ch = unit_channels(cfg, seed);
    const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);

    REQUIRE(rep.error.empty());
    REQUIRE(rep.objective_trace.size() == size_t(rep.n_outer) + 1);
    for (size_t i = 1; i < rep.objective_trace.size(); ++i)
      CHECK(rep.objective_trace[i] >= rep.objective_trace[i - 1]);

    // final point and every intermediate iterate respect the constraints
    CHECK(Precoder{rep.precoder_opt}.power_feasible(cfg.power));
    CHECK(rep.max_iterate_power <= cfg.power * (1.0 + 1e-9));
    CHECK(rep.theta_always_feasible);
    for (Eigen::Index m = 0; m < rep.theta_opt.size(); ++m) {
      CHECK(rep.theta_opt[m] >= p.theta_min);
      CHECK(rep.theta_opt[m] <= p.theta_max);
    }

    // bookkeeping alignment
    CHECK(rep.step_history.size() == size_t(rep.n_outer));
    CHECK(rep.eval_trace.size() == size_t(rep.n_outer));
    CHECK(rep.eval_trace.back() == rep.n_objective_evals);
    for (size_t i = 1; i < rep.step_history.size(); ++i) {
      CHECK(rep.step_history[i].first <= rep.step_history[i - 1].first);
      CHECK(rep.step_history[i].second <= rep.step_history[i - 1].second);
    }
  }
}

TEST_CASE("two identical calls agree bitwise") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 6);
  const ChannelSet ch = unit_channels(cfg, 99);
  pgm::PgmOptions opts;
  opts.max_outer = 25;
  const pgm::SolveReport a = pgm::solve(ch, p, cfg, opts);
  const pgm::SolveReport b = pgm::solve(ch, p, cfg, opts);
  CHECK(bit_equal_vec(a.theta_opt, b.theta_opt));
  CHECK((a.precoder_opt - b.precoder_opt).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (size_t i = 0; i < a.objective_trace.size(); ++i)
    CHECK(a.objective_trace[i] == b.objective_trace[i]);
  CHECK(a.n_objective_evals == b.n_objective_evals);
}

TEST_CASE("infeasible starting points are projected and flagged") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 5);
  const ChannelSet ch = unit_channels(cfg, 7);
  pgm::PgmOptions opts;
  opts.max_outer = 3;

  MatrixXcd t0 = testutil::random_precoder(cfg, 7);
  t0 *= 3.0;  // power 9x over budget
  VectorXd theta0 = VectorXd::Constant(cfg.n_elements, p.theta_max + 0.2);
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts, t0, theta0);
  CHECK(rep.init_precoder_projected);
  CHECK(rep.init_theta_projected);
  CHECK(rep.max_iterate_power <= cfg.power * (1.0 + 1e-9));
  CHECK(rep.theta_always_feasible);

  // feasible starts are not flagged
  const pgm::SolveReport clean = pgm::solve(
      ch, p, cfg, opts, testutil::random_precoder(cfg, 7),
      testutil::random_theta(cfg.n_elements, p, 7));
  CHECK(!clean.init_precoder_projected);
  CHECK(!clean.init_theta_projected);

  // dimension mismatches are rejected outright
  CHECK_THROWS_AS(
      pgm::solve(ch, p, cfg, opts, MatrixXcd::Zero(cfg.n_tx + 1, cfg.n_streams),
                 std::nullopt),
      config_error);
  CHECK_THROWS_AS(
      pgm::solve(ch, p, cfg, opts, std::nullopt, VectorXd::Zero(2)),
      config_error);
}

TEST_CASE("fixed step mode evaluates once per phase, unconditionally") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 6);
  const ChannelSet ch = unit_channels(cfg, 13);
  pgm::PgmOptions opts;
  opts.step_mode = pgm::StepMode::fixed;
  opts.fixed_step = 1e-3;
  opts.tol = 0.0;  // run the full budget
  opts.max_outer = 12;
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);
  CHECK(rep.n_outer == 12);
  // one evaluation at the start, then one per phase per outer pass
  CHECK(rep.n_objective_evals == 1 + 2 * rep.n_outer);
  for (const auto& [st, sp] : rep.step_history) {
    CHECK(st == 1e-3);
    CHECK(sp == 1e-3);
  }
}

TEST_CASE("angles can be frozen at their starting point") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 9);
  const ChannelSet ch = unit_channels(cfg, 17);
  pgm::PgmOptions opts;
  opts.optimize_theta = false;
  opts.max_outer = 20;
  const VectorXd theta0 = testutil::random_theta(cfg.n_elements, p, 17);
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts, std::nullopt, theta0);
  CHECK(bit_equal_vec(rep.theta_opt, theta0));
  CHECK(rep.objective_trace.back() >= rep.objective_trace.front());
}

TEST_CASE("the default angle start is the documented stream draw") {
  const RisParams p = test_params();
  SystemConfig cfg = toy_system(2, 7);
  cfg.seed = 123;
  const ChannelSet ch = unit_channels(cfg, 123);
  pgm::PgmOptions opts;
  opts.optimize_theta = false;  // freeze so the start is observable
  opts.max_outer = 1;
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);
  StreamRng rng(cfg.seed, "init/theta");
  VectorXd expected(cfg.n_elements);
  for (Eigen::Index m = 0; m < expected.size(); ++m)
    expected[m] = rng.uniform(p.theta_min, p.theta_max);
  CHECK(bit_equal_vec(rep.theta_opt, expected));
}

TEST_CASE("direct-only mode ignores the surface entirely") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(3, 10);
  ChannelSet ch = unit_channels(cfg, 19);
  pgm::PgmOptions opts;
  opts.with_ris = false;
  opts.max_outer = 30;
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);
  CHECK(rep.theta_opt.size() == 0);
  CHECK(rep.error.empty());

  // perturbing the surface links cannot change the result
  ChannelSet perturbed = ch;
  perturbed.ris_rx *= 5.0;
  perturbed.tx_ris *= 0.1;
  const pgm::SolveReport rep2 = pgm::solve(perturbed, p, cfg, opts);
  CHECK(rep.objective_trace.back() == rep2.objective_trace.back());
  CHECK((rep.precoder_opt - rep2.precoder_opt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical receiver channels converge immediately on a zero gradient") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 6);
  ChannelSet ch = unit_channels(cfg, 23);
  ch.tx_eve = ch.tx_rx;
  ch.ris_eve = ch.ris_rx;
  pgm::PgmOptions opts;
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);
  CHECK(rep.error.empty());
  CHECK(rep.termination == pgm::Termination::converged);
  CHECK(rep.n_outer <= 2);
  CHECK(rep.objective_trace.back() == 0.0);
}

TEST_CASE("a zero tolerance runs the full outer budget") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(2, 5);
  const ChannelSet ch = unit_channels(cfg, 29);
  pgm::PgmOptions opts;
  opts.tol = 0.0;
  opts.max_outer = 15;
  const pgm::SolveReport rep = pgm::solve(ch, p, cfg, opts);
  // either it hits an exact fixed point (both phases reject) or runs out
  if (rep.termination == pgm::Termination::max_iterations)
    CHECK(rep.n_outer == 15);
  else
    CHECK(rep.objective_trace.back() ==
          rep.objective_trace[rep.objective_trace.size() - 2]);
}

TEST_CASE("option validation") {
  const RisParams p = test_params();
  pgm::PgmOptions opts;
  opts.max_outer = 0;
  CHECK_THROWS_AS(opts.validate(p), config_error);
  opts = {};
  opts.backtrack = 1.0;
  CHECK_THROWS_AS(opts.validate(p), config_error);
  opts = {};
  opts.tau = 0.0;
  CHECK_THROWS_AS(opts.validate(p), config_error);
  opts = {};
  opts.theta_step_max = (p.theta_max - p.theta_min);  // over the half-span cap
  CHECK_THROWS_AS(opts.validate(p), config_error);
  opts = {};
  opts.step_mode = pgm::StepMode::fixed;
  opts.fixed_step = 0.0;
  CHECK_THROWS_AS(opts.validate(p), config_error);
  CHECK_NOTHROW(pgm::PgmOptions{}.validate(p));
}
