// Physical-layer model: transceiver distortion, non-linear energy harvesting,
// link rates, and power accounting.
#pragma once

#include <optional>

#include "wpcn/channels.hpp"
#include "wpcn/types.hpp"

namespace wpcn {
namespace model {

// Transmit distortion eta(x) = k1 * x^k2 for per-antenna average power x >= 0.
double tx_distortion(double x, const HwiParams& hwi);

// Receive distortion nu(x) = (k3/100)^2 * x for received power x >= 0.
double rx_distortion(double x, double k3);

struct DistortionCovariances {
  VecR phi;    // diagonal of the Phase-I PS transmit-distortion covariance (length n_ps)
  VecR theta;  // diagonal of the Phase-II PS transmit-distortion covariance (length n_ps)
  VecR psi;    // diagonal of the Phase-II AP transmit-distortion covariance (length n_ap)
};

// Diagonal distortion covariances implied by an allocation:
// [phi]_mm = eta([V]_mm), [theta]_mm = eta([Z]_mm),
// [psi]_nn = eta([sum_k w_k w_k^H + U]_nn).
DistortionCovariances transmit_covariances(const Allocation& alloc, const HwiParams& hwi);

// Harvested power Xi_tot(omega) = (M*sigmoid(a(omega-b)) - M*Omega0)/(1-Omega0).
// Exactly 0 at omega = 0; strictly increasing; sup = M.
double harvested_power(double omega, const EhParams& eh);

// Closed-form logit inverse of harvested_power; requires 0 <= xi < M.
double inverse_harvested_power(double xi, const EhParams& eh);

// True (non-linear hardware) SINR of IR k; requires recovered beamformers.
double ir_sinr(int k, const Allocation& alloc, const ChannelSet& ch, const SystemConfig& cfg);

// Eavesdropper rate per unit tau2 for IR k at a concrete channel error pair;
// the eavesdropper is treated as noiseless, so an (almost) unjammed
// eavesdropper has unbounded capacity: that case returns nullopt ("insecure").
std::optional<double> eve_capacity(int k, const Allocation& alloc, const ChannelSet& ch,
                                   const MatC& dg, const MatC& de, const SystemConfig& cfg);

// Secrecy rate [tau2*log2(1+Gamma_k) - tau2*C_k]^+; insecure => 0 secrecy.
double secrecy_rate(int k, const Allocation& alloc, const ChannelSet& ch,
                    const MatC& dg, const MatC& de, const SystemConfig& cfg);

struct PowerBreakdown {
  double p_ps1 = 0.0;      // W consumed at the PS in Phase I
  double p_ps2 = 0.0;      // W consumed at the PS in Phase II
  double p_ap2 = 0.0;      // W consumed at the AP in Phase II
  double objective = 0.0;  // tau1*p_ps1 + tau2*(p_ap2 + p_ps2), J per slot
  // Reporting convention used by the experiment tables: Phase-I consumption
  // plus the Phase-II energy actually drawn from the reserve (the
  // harvest-funded part is not counted again).
  double reported = 0.0;   // J per slot
};

PowerBreakdown power_accounting(const Allocation& alloc, const SystemConfig& cfg);

}  // namespace model
}  // namespace wpcn
