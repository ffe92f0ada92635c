// Random channel generation and bounded CSI-error sampling.
//
// Geometry: the AP sits at the origin, the PS 10 m away, the eavesdropper
// 30 m from the AP on the far side (the configured distance triple is exactly
// collinear). IRs lie on a ring of fixed radius around the AP at a uniform
// random angle; their PS distance follows from the law of cosines.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/types.hpp"

namespace wpcn {

struct Topology {
  double d_ps_ap = 10.0;   // m
  double d_ps_eve = 40.0;  // m
  double d_ap_eve = 30.0;  // m
  double d_ap_ir = 50.0;   // m (ring radius)

  double alpha_ps_ap = 2.0;  // pathloss exponents
  double alpha_ap_ir = 3.6;
  double alpha_ps_eve = 3.6;
  double alpha_ap_eve = 3.6;
  double alpha_ps_ir = 3.6;

  double gain_ps_dbi = 10.0;  // element gains
  double gain_ap_dbi = 8.0;
  double gain_ir_dbi = 0.0;
  double gain_eve_dbi = 0.0;

  double carrier_hz = 915e6;
  double rician_factor_db = 3.0;  // PS->AP link only

  void validate() const;
};

struct ChannelSet {
  MatC l_mat;               // PS->AP, n_ps x n_ap
  std::vector<VecC> h;      // AP->IR k, n_ap
  std::vector<VecC> f;      // PS->IR k, n_ps
  MatC g_hat;               // AP->Eve estimate, n_ap x n_ev
  MatC e_hat;               // PS->Eve estimate, n_ps x n_ev
  double ups_ap_e = 0.0;    // Frobenius uncertainty radius for the AP->Eve link
  double ups_ps_e = 0.0;    // and the PS->Eve link
  std::optional<MatC> true_dg;  // held-out true errors (solver never sees them)
  std::optional<MatC> true_de;
  VecR d_ps_ir;             // realized per-IR PS distances, m (diagnostic)
};

// Free-space-referenced large-scale power gain g_tx*g_rx*(lambda/4pi)^2*d^-alpha.
double large_scale_gain(double gain_tx_dbi, double gain_rx_dbi, double d_m, double alpha,
                        double carrier_hz);

// Deterministic generation: identical (cfg, topo, seed) gives bit-identical
// output. Draw order is fixed: IR angles, L, h_k, f_k, G, E, dG, dE.
ChannelSet generate_channels(const SystemConfig& cfg, const Topology& topo, std::uint64_t seed);

// Uniform draw from the Frobenius ball (or sphere, when boundary is set) of
// the given radius: uniform direction, norm = radius * U^(1/(2*rows*cols)).
MatC sample_csi_error(double radius, Eigen::Index rows, Eigen::Index cols, Rng& rng,
                      bool boundary = false);

// Radius from the normalized error bound: ups = sqrt(sigma_eve2) * ||nominal||_F.
double radius_from_normalized_error(double sigma_eve2, const MatC& nominal);

void to_json(nlohmann::json& j, const Topology& t);
void from_json(const nlohmann::json& j, Topology& t);
void to_json(nlohmann::json& j, const ChannelSet& ch);
void from_json(const nlohmann::json& j, ChannelSet& ch);

}  // namespace wpcn
