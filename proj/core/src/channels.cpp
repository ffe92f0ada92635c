#include "wpcn/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "json_mat.hpp"

namespace wpcn {

void Topology::validate() const {
  if (!(d_ps_ap > 0.0) || !(d_ps_eve > 0.0) || !(d_ap_eve > 0.0) || !(d_ap_ir > 0.0))
    throw std::invalid_argument("distances must be positive");
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  for (double a : {alpha_ps_ap, alpha_ap_ir, alpha_ps_eve, alpha_ap_eve, alpha_ps_ir})
    if (!(a >= 1.0)) throw std::invalid_argument("pathloss exponents must be >= 1");
}

double large_scale_gain(double gain_tx_dbi, double gain_rx_dbi, double d_m, double alpha,
                        double carrier_hz) {
  const double lambda = speed_of_light / carrier_hz;
  const double free_space = std::pow(lambda / (4.0 * std::numbers::pi), 2.0);
  return dbi_to_linear(gain_tx_dbi) * dbi_to_linear(gain_rx_dbi) * free_space *
         std::pow(d_m, -alpha);
}

ChannelSet generate_channels(const SystemConfig& cfg, const Topology& topo,
                             std::uint64_t seed) {
  topo.validate();
  Rng rng(derive_seed(seed, 0));
  ChannelSet ch;

  // IR positions on the ring around the AP; PS distance by the law of cosines
  // with the PS->AP baseline.
  ch.d_ps_ir = VecR::Zero(cfg.n_irs);
  std::vector<double> theta(static_cast<std::size_t>(cfg.n_irs));
  for (int k = 0; k < cfg.n_irs; ++k) {
    theta[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double d2 = topo.d_ps_ap * topo.d_ps_ap + topo.d_ap_ir * topo.d_ap_ir -
                      2.0 * topo.d_ps_ap * topo.d_ap_ir *
                          std::cos(theta[static_cast<std::size_t>(k)]);
    ch.d_ps_ir[k] = std::sqrt(std::max(d2, 1.0));
  }

  // PS->AP charging link: Rician with an all-ones line-of-sight component.
  {
    const double g = large_scale_gain(topo.gain_ps_dbi, topo.gain_ap_dbi, topo.d_ps_ap,
                                      topo.alpha_ps_ap, topo.carrier_hz);
    const double kappa = db_to_linear(topo.rician_factor_db);
    const double c_los = std::sqrt(kappa / (1.0 + kappa));
    const double c_nlos = std::sqrt(1.0 / (1.0 + kappa));
    const MatC scatter = rng.cnormal_matrix(cfg.n_ps, cfg.n_ap);
    ch.l_mat = std::sqrt(g) *
               (c_los * MatC::Ones(cfg.n_ps, cfg.n_ap) + c_nlos * scatter);
  }

  // Downlink and jamming links: Rayleigh.
  ch.h.resize(static_cast<std::size_t>(cfg.n_irs));
  for (int k = 0; k < cfg.n_irs; ++k) {
    const double g = large_scale_gain(topo.gain_ap_dbi, topo.gain_ir_dbi, topo.d_ap_ir,
                                      topo.alpha_ap_ir, topo.carrier_hz);
    ch.h[static_cast<std::size_t>(k)] =
        std::sqrt(g) * VecC(rng.cnormal_matrix(cfg.n_ap, 1));
  }
  ch.f.resize(static_cast<std::size_t>(cfg.n_irs));
  for (int k = 0; k < cfg.n_irs; ++k) {
    const double g = large_scale_gain(topo.gain_ps_dbi, topo.gain_ir_dbi, ch.d_ps_ir[k],
                                      topo.alpha_ps_ir, topo.carrier_hz);
    ch.f[static_cast<std::size_t>(k)] =
        std::sqrt(g) * VecC(rng.cnormal_matrix(cfg.n_ps, 1));
  }

  const double g_ae = large_scale_gain(topo.gain_ap_dbi, topo.gain_eve_dbi, topo.d_ap_eve,
                                       topo.alpha_ap_eve, topo.carrier_hz);
  const MatC g_true = std::sqrt(g_ae) * rng.cnormal_matrix(cfg.n_ap, cfg.n_ev);
  const double g_pe = large_scale_gain(topo.gain_ps_dbi, topo.gain_eve_dbi, topo.d_ps_eve,
                                       topo.alpha_ps_eve, topo.carrier_hz);
  const MatC e_true = std::sqrt(g_pe) * rng.cnormal_matrix(cfg.n_ps, cfg.n_ev);

  ch.ups_ap_e = radius_from_normalized_error(cfg.qos.sigma_eve2, g_true);
  ch.ups_ps_e = radius_from_normalized_error(cfg.qos.sigma_eve2, e_true);
  const MatC dg = sample_csi_error(ch.ups_ap_e, cfg.n_ap, cfg.n_ev, rng);
  const MatC de = sample_csi_error(ch.ups_ps_e, cfg.n_ps, cfg.n_ev, rng);
  ch.g_hat = g_true - dg;
  ch.e_hat = e_true - de;
  ch.true_dg = dg;
  ch.true_de = de;
  return ch;
}

MatC sample_csi_error(double radius, Eigen::Index rows, Eigen::Index cols, Rng& rng,
                      bool boundary) {
  if (radius < 0.0) throw std::invalid_argument("uncertainty radius must be nonnegative");
  MatC dir = rng.cnormal_matrix(rows, cols);
  const double norm = dir.norm();
  if (radius == 0.0 || norm == 0.0) return MatC::Zero(rows, cols);
  double r = radius;
  if (!boundary) {
    const double dim = 2.0 * static_cast<double>(rows) * static_cast<double>(cols);
    r *= std::pow(rng.uniform01(), 1.0 / dim);
  }
  return (r / norm) * dir;
}

double radius_from_normalized_error(double sigma_eve2, const MatC& nominal) {
  if (sigma_eve2 < 0.0) throw std::invalid_argument("error power must be nonnegative");
  return std::sqrt(sigma_eve2) * nominal.norm();
}

void to_json(nlohmann::json& j, const Topology& t) {
  j = nlohmann::json{{"d_ps_ap", t.d_ps_ap},
                     {"d_ps_eve", t.d_ps_eve},
                     {"d_ap_eve", t.d_ap_eve},
                     {"d_ap_ir", t.d_ap_ir},
                     {"alpha_ps_ap", t.alpha_ps_ap},
                     {"alpha_ap_ir", t.alpha_ap_ir},
                     {"alpha_ps_eve", t.alpha_ps_eve},
                     {"alpha_ap_eve", t.alpha_ap_eve},
                     {"alpha_ps_ir", t.alpha_ps_ir},
                     {"gain_ps_dbi", t.gain_ps_dbi},
                     {"gain_ap_dbi", t.gain_ap_dbi},
                     {"gain_ir_dbi", t.gain_ir_dbi},
                     {"gain_eve_dbi", t.gain_eve_dbi},
                     {"carrier_hz", t.carrier_hz},
                     {"rician_factor_db", t.rician_factor_db}};
}

void from_json(const nlohmann::json& j, Topology& t) {
  t = Topology{};
  j.at("d_ps_ap").get_to(t.d_ps_ap);
  j.at("d_ps_eve").get_to(t.d_ps_eve);
  j.at("d_ap_eve").get_to(t.d_ap_eve);
  j.at("d_ap_ir").get_to(t.d_ap_ir);
  j.at("alpha_ps_ap").get_to(t.alpha_ps_ap);
  j.at("alpha_ap_ir").get_to(t.alpha_ap_ir);
  j.at("alpha_ps_eve").get_to(t.alpha_ps_eve);
  j.at("alpha_ap_eve").get_to(t.alpha_ap_eve);
  j.at("alpha_ps_ir").get_to(t.alpha_ps_ir);
  j.at("gain_ps_dbi").get_to(t.gain_ps_dbi);
  j.at("gain_ap_dbi").get_to(t.gain_ap_dbi);
  j.at("gain_ir_dbi").get_to(t.gain_ir_dbi);
  j.at("gain_eve_dbi").get_to(t.gain_eve_dbi);
  j.at("carrier_hz").get_to(t.carrier_hz);
  j.at("rician_factor_db").get_to(t.rician_factor_db);
  t.validate();
}

void to_json(nlohmann::json& j, const ChannelSet& ch) {
  nlohmann::json hs = nlohmann::json::array(), fs = nlohmann::json::array();
  for (const auto& v : ch.h) hs.push_back(detail::mat_to_json(v));
  for (const auto& v : ch.f) fs.push_back(detail::mat_to_json(v));
  j = nlohmann::json{{"l_mat", detail::mat_to_json(ch.l_mat)},
                     {"h", std::move(hs)},
                     {"f", std::move(fs)},
                     {"g_hat", detail::mat_to_json(ch.g_hat)},
                     {"e_hat", detail::mat_to_json(ch.e_hat)},
                     {"ups_ap_e", ch.ups_ap_e},
                     {"ups_ps_e", ch.ups_ps_e},
                     {"d_ps_ir", detail::vec_to_json(ch.d_ps_ir)}};
  if (ch.true_dg) j["true_dg"] = detail::mat_to_json(*ch.true_dg);
  if (ch.true_de) j["true_de"] = detail::mat_to_json(*ch.true_de);
}

void from_json(const nlohmann::json& j, ChannelSet& ch) {
  ch = ChannelSet{};
  ch.l_mat = detail::mat_from_json(j.at("l_mat"));
  for (const auto& v : j.at("h")) ch.h.push_back(detail::mat_from_json(v));
  for (const auto& v : j.at("f")) ch.f.push_back(detail::mat_from_json(v));
  ch.g_hat = detail::mat_from_json(j.at("g_hat"));
  ch.e_hat = detail::mat_from_json(j.at("e_hat"));
  j.at("ups_ap_e").get_to(ch.ups_ap_e);
  j.at("ups_ps_e").get_to(ch.ups_ps_e);
  ch.d_ps_ir = detail::vec_from_json(j.at("d_ps_ir"));
  if (j.contains("true_dg")) ch.true_dg = detail::mat_from_json(j.at("true_dg"));
  if (j.contains("true_de")) ch.true_de = detail::mat_from_json(j.at("true_de"));
}

}  // namespace wpcn
