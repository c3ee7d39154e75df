#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rissec/cpdm.hpp"
#include "rissec/rng.hpp"
#include "test_util.hpp"

using namespace rissec;
using testutil::test_params;
using testutil::toy_system;
using testutil::unit_channels;

namespace {

// Effective channels built directly from two fixed matrices (no surface).
EffectiveChannels direct_eff(const MatrixXcd& hb, const MatrixXcd& he) {
  return {hb, he};
}

double gain_objective(const EffectiveChannels& eff, const MatrixXcd& t,
                      const SystemConfig& cfg) {
  const MatrixXcd g = eff.to_rx.adjoint() * eff.to_rx / cfg.noise_rx -
                      eff.to_eve.adjoint() * eff.to_eve / cfg.noise_eve;
  return (t.adjoint() * g * t).trace().real();
}

}  // namespace

TEST_CASE("closed-form precoder on a hand-computed diagonal gain difference") {
  // Hb = diag(2,1,0), He = diag(1,0,sqrt(2)), unit noise:
  // G = diag(4,1,0) - diag(1,0,2) = diag(3,1,-2).
  SystemConfig cfg = toy_system(3, 1, /*power=*/1.0);
  cfg.n_streams = 2;
  MatrixXcd hb = MatrixXcd::Zero(3, 3), he = MatrixXcd::Zero(3, 3);
  hb(0, 0) = 2.0;
  hb(1, 1) = 1.0;
  he(0, 0) = 1.0;
  he(2, 2) = std::sqrt(2.0);
  const EffectiveChannels eff = direct_eff(hb, he);

  SUBCASE("proportional split weights powers by eigenvalue") {
    const auto pre = cpdm::optimal_precoder(eff, cfg, cpdm::PowerSplit::proportional);
    REQUIRE(!pre.no_positive_mode);
    CHECK(pre.spectrum[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(pre.spectrum[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pre.spectrum[2] == doctest::Approx(-2.0).epsilon(1e-12));
    // col 0 carries 3/4 of the power on axis e1, col 1 carries 1/4 on e2
    CHECK(std::norm(pre.t(0, 0)) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::norm(pre.t(1, 1)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pre.t.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pre.t(1, 0)) < 1e-12);
    CHECK(std::abs(pre.t(2, 0)) < 1e-12);
    CHECK(std::abs(pre.t(0, 1)) < 1e-12);
    CHECK(gain_objective(eff, pre.t, cfg) == doctest::Approx(2.5).epsilon(1e-12));
  }

  SUBCASE("top-mode split concentrates the budget") {
    const auto pre = cpdm::optimal_precoder(eff, cfg, cpdm::PowerSplit::top_mode_only);
    CHECK(std::norm(pre.t(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pre.t.col(1).norm() == 0.0);
    CHECK(gain_objective(eff, pre.t, cfg) == doctest::Approx(3.0).epsilon(1e-12));
  }

  SUBCASE("equal split divides the budget across positive modes") {
    const auto pre = cpdm::optimal_precoder(eff, cfg, cpdm::PowerSplit::equal);
    CHECK(std::norm(pre.t(0, 0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(pre.t(1, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gain_objective(eff, pre.t, cfg) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("a single positive mode leaves the other column zero") {
    MatrixXcd hb1 = MatrixXcd::Zero(3, 3);
    hb1(0, 0) = 2.0;  // G = diag(3, 0, -2): only one strictly positive mode
    const auto pre = cpdm::optimal_precoder(direct_eff(hb1, he), cfg,
                                            cpdm::PowerSplit::proportional);
    REQUIRE(!pre.no_positive_mode);
    CHECK(std::norm(pre.t(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pre.t.col(1).norm() == 0.0);
  }
}

TEST_CASE("all-nonpositive gain difference yields the zero precoder") {
  SystemConfig cfg = toy_system(3, 1, 1.0);
  cfg.n_streams = 2;
  MatrixXcd he = MatrixXcd::Identity(3, 3);
  const auto pre = cpdm::optimal_precoder(direct_eff(MatrixXcd::Zero(3, 3), he),
                                          cfg, cpdm::PowerSplit::proportional);
  CHECK(pre.no_positive_mode);
  CHECK(pre.t.cwiseAbs().maxCoeff() == 0.0);
  CHECK(pre.spectrum.maxCoeff() <= 0.0);
}

TEST_CASE("no random feasible precoder beats the closed form") {
  const SystemConfig cfg = toy_system(4, 6);
  const ChannelSet ch = unit_channels(cfg, 51);
  const RisParams p = test_params();
  const RisState st =
      RisState::from_theta(testutil::random_theta(6, p, 51), p);
  const EffectiveChannels eff = effective_channels(ch, st.phi);
  const auto pre = cpdm::optimal_precoder(eff, cfg, cpdm::PowerSplit::proportional);
  const double best = gain_objective(eff, pre.t, cfg);

  StreamRng rng(51, "test/rand_precoder");
  for (int trial = 0; trial < 1000; ++trial) {
    MatrixXcd t(cfg.n_tx, cfg.n_streams);
    for (int i = 0; i < cfg.n_tx; ++i)
      for (int j = 0; j < cfg.n_streams; ++j) t(i, j) = rng.complex_normal();
    t *= std::sqrt(cfg.power / t.squaredNorm());
    CHECK(gain_objective(eff, t, cfg) <= best + 1e-9);
  }
}

TEST_CASE("angle-only ascent is monotone, feasible and improves the power difference") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(3, 12);
  const ChannelSet ch = unit_channels(cfg, 52);
  const MatrixXcd t = testutil::random_precoder(cfg, 52);
  const VectorXd theta0 = testutil::random_theta(cfg.n_elements, p, 52);
  pgm::PgmOptions opts;
  opts.max_outer = 40;
  const cpdm::CpdmReport rep = cpdm::solve_theta(ch, p, cfg, opts, t, theta0);
  REQUIRE(rep.error.empty());
  REQUIRE(rep.pdiff_trace.size() == size_t(rep.n_outer) + 1);
  for (size_t i = 1; i < rep.pdiff_trace.size(); ++i)
    CHECK(rep.pdiff_trace[i] >= rep.pdiff_trace[i - 1]);
  for (Eigen::Index m = 0; m < rep.theta_sub.size(); ++m) {
    CHECK(rep.theta_sub[m] >= p.theta_min);
    CHECK(rep.theta_sub[m] <= p.theta_max);
  }
  // the precoder is passed through untouched
  CHECK((rep.precoder_sub - t).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(cpdm::solve_theta(ch, p, cfg, opts, t, VectorXd::Zero(3)),
                  config_error);
}

TEST_CASE("full surrogate pipeline: trace, feasibility, spectrum, determinism") {
  const RisParams p = test_params();
  const SystemConfig cfg = toy_system(3, 10);
  const ChannelSet ch = unit_channels(cfg, 53);
  cpdm::CpdmOptions opts;
  opts.ascent.max_outer = 30;
  const cpdm::CpdmReport rep = cpdm::solve(ch, p, cfg, opts);
  REQUIRE(rep.error.empty());
  for (size_t i = 1; i < rep.pdiff_trace.size(); ++i)
    CHECK(rep.pdiff_trace[i] >= rep.pdiff_trace[i - 1]);
  CHECK(Precoder{rep.precoder_sub}.power_feasible(cfg.power));
  CHECK(rep.eigen_spectrum.size() == cfg.n_tx);
  for (Eigen::Index i = 1; i < rep.eigen_spectrum.size(); ++i)
    CHECK(rep.eigen_spectrum[i] <= rep.eigen_spectrum[i - 1]);

  const cpdm::CpdmReport again = cpdm::solve(ch, p, cfg, opts);
  REQUIRE(again.pdiff_trace.size() == rep.pdiff_trace.size());
  for (size_t i = 0; i < rep.pdiff_trace.size(); ++i)
    CHECK(again.pdiff_trace[i] == rep.pdiff_trace[i]);
  CHECK((again.precoder_sub - rep.precoder_sub).cwiseAbs().maxCoeff() == 0.0);
  CHECK((again.theta_sub - rep.theta_sub).cwiseAbs().maxCoeff() == 0.0);

  cpdm::CpdmOptions bad;
  bad.alternations = 0;
  CHECK_THROWS_AS(cpdm::solve(ch, p, cfg, bad), config_error);
}

TEST_CASE("surrogate bound holds with a guaranteed envelope on ordered links") {
  // He = c * Q * Hb with unitary Q and c < 1 makes the stream-space gain
  // difference PSD by construction: Fe = c^2 Fb in the Gram sense.
  const SystemConfig cfg = toy_system(4, 8, /*power=*/4.0);
  const RisParams p = test_params();
  StreamRng rng(54, "test/q");
  for (int inst = 0; inst < 25; ++inst) {
    const ChannelSet ch = unit_channels(cfg, 200 + inst);
    const RisState st = RisState::from_theta(
        testutil::random_theta(cfg.n_elements, p, 300 + inst), p);
    EffectiveChannels eff = effective_channels(ch, st.phi);
    MatrixXcd raw(cfg.n_eve, cfg.n_rx);
    for (int i = 0; i < cfg.n_eve; ++i)
      for (int j = 0; j < cfg.n_rx; ++j) raw(i, j) = rng.complex_normal();
    const MatrixXcd q = Eigen::HouseholderQR<MatrixXcd>(raw).householderQ();
    const double c = 0.2 + 0.6 * rng.uniform();
    eff.to_eve = c * q * eff.to_rx;

    const MatrixXcd t = testutil::random_precoder(cfg, 400 + inst, 0.9);
    const auto chk = cpdm::check_surrogate_bound(eff, t, cfg);
    CHECK(chk.is_psd);
    CHECK(chk.gap >= -1e-9);
    CHECK(chk.csec <= chk.pdiff_over_ln2 + 1e-9);
    CHECK(chk.gap <= chk.taylor_envelope + 1e-9);
    CHECK(chk.max_f_eigenvalue > 0.0);
  }
}

TEST_CASE("the surrogate check flags an indefinite instance") {
  SystemConfig cfg = toy_system(2, 1, 1.0);
  MatrixXcd hb = MatrixXcd::Zero(2, 2), he = MatrixXcd::Zero(2, 2);
  hb(0, 0) = 2.0;
  he(1, 1) = 2.0;  // Bob wins axis 1, Eve wins axis 2: indefinite difference
  const MatrixXcd t = MatrixXcd::Identity(2, 2) * std::sqrt(0.5);
  const auto chk = cpdm::check_surrogate_bound(direct_eff(hb, he), t, cfg);
  CHECK(!chk.is_psd);
}
