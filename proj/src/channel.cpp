#include "rissec/channel.hpp"

#include <cmath>
#include <string_view>

#include "rissec/kernels.hpp"
#include "rissec/rng.hpp"

namespace rissec {

double path_loss(double d, double gamma, const PathLossModel& plm) {
  plm.validate();
  if (!(d > 0.0)) throw std::domain_error("path loss requires distance > 0");
  return db_to_linear(plm.rho0_db) * std::pow(d / plm.d0, -gamma);
}

void ChannelSet::check_dims(const SystemConfig& cfg) const {
  const auto m = static_cast<Eigen::Index>(cfg.n_elements);
  if (tx_rx.rows() != cfg.n_rx || tx_rx.cols() != cfg.n_tx ||
      tx_ris.rows() != m || tx_ris.cols() != cfg.n_tx ||
      ris_rx.rows() != cfg.n_rx || ris_rx.cols() != m ||
      tx_eve.rows() != cfg.n_eve || tx_eve.cols() != cfg.n_tx ||
      ris_eve.rows() != cfg.n_eve || ris_eve.cols() != m)
    throw config_error("channel matrices inconsistent with the system config");
}

namespace {

MatrixXcd draw_link(std::uint64_t seed, std::string_view stream,
                    Eigen::Index rows, Eigen::Index cols, double gain) {
  const StreamRng rng(seed, stream);
  const double scale = std::sqrt(gain);
  MatrixXcd h(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      h(r, c) = scale * rng.complex_normal_at(
                            static_cast<std::uint64_t>(r * cols + c));
  return h;
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& cfg, const Geometry& geo,
                             const PathLossModel& plm) {
  cfg.validate();
  geo.validate();
  plm.validate();

  const double d_tx_ris = (geo.alice - geo.ris).norm();
  const double d_ris_rx = (geo.ris - geo.bob).norm();
  const double d_ris_eve = (geo.ris - geo.eve).norm();
  const double d_tx_rx = (geo.alice - geo.bob).norm();
  const double d_tx_eve = (geo.alice - geo.eve).norm();

  const auto m = static_cast<Eigen::Index>(cfg.n_elements);
  ChannelSet ch;
  ch.tx_rx = draw_link(cfg.seed, "channel/tx_rx", cfg.n_rx, cfg.n_tx,
                       path_loss(d_tx_rx, plm.gamma_tx_rx, plm));
  ch.tx_ris = draw_link(cfg.seed, "channel/tx_ris", m, cfg.n_tx,
                        path_loss(d_tx_ris, plm.gamma_tx_ris, plm));
  ch.ris_rx = draw_link(cfg.seed, "channel/ris_rx", cfg.n_rx, m,
                        path_loss(d_ris_rx, plm.gamma_ris_rx, plm));
  ch.tx_eve = draw_link(cfg.seed, "channel/tx_eve", cfg.n_eve, cfg.n_tx,
                        path_loss(d_tx_eve, plm.gamma_tx_eve, plm));
  ch.ris_eve = draw_link(cfg.seed, "channel/ris_eve", cfg.n_eve, m,
                         path_loss(d_ris_eve, plm.gamma_ris_eve, plm));
  return ch;
}

EffectiveChannels effective_channels(const ChannelSet& ch, const VectorXcd& phi) {
  EffectiveChannels eff;
  eff.to_rx = kernels::compose_effective(ch.tx_rx, ch.ris_rx, phi, ch.tx_ris);
  eff.to_eve = kernels::compose_effective(ch.tx_eve, ch.ris_eve, phi, ch.tx_ris);
  return eff;
}

}  // namespace rissec
