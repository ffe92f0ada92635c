// Scenario configuration and the resource-allocation record.
//
// Configuration i/o uses field-wise boundary units (dBm for transmit/noise
// powers, µW circuit power, mW harvester saturation, mJ reserve energy);
// everything stored here is SI.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wpcn/util.hpp"

namespace wpcn {

struct HwiParams {
  double k1 = 2.258e5;  // transmitter distortion gain, W^(1-k2)
  double k2 = 7.687;    // transmitter distortion exponent, >= 1
  double k3 = 0.0;      // receiver distortion percentage, in [0, 15]

  // nu(x) = (k3/100)^2 * x
  double nu_coeff() const { return (k3 / 100.0) * (k3 / 100.0); }
};

struct EhParams {
  double m_sat = 24e-3;  // saturation power M, W
  double a = 150.0;      // sigmoid slope, 1/W
  double b = 1.4e-3;     // sigmoid turn-on, W
  double omega_0 = 0.0;  // cached 1/(1+exp(a*b))

  void refresh() { omega_0 = 1.0 / (1.0 + std::exp(a * b)); }
};

struct QosParams {
  std::vector<double> r_req = {4.0, 4.0};  // per-IR minimum rate, bit/s/Hz
  double r_tol = 0.1;                      // max tolerable eavesdropper rate, bit/s/Hz
  double sigma_eve2 = 0.01;                // normalized CSI error bound on the Eve links
};

// Solver and experiment knobs (not physical parameters).
struct RunParams {
  double solver_tol = 1e-8;
  double rank_tol = 1e-6;
  int grid_n = 20;
  int omega_grid_n = 17;
  int ao_l_max = 30;
  double ao_psi = 1e-3;
  int audit_security_samples = 512;
  int security_samples = 10000;
  int randomization_candidates = 200;
  int threads = 0;  // 0 = hardware_concurrency
};

struct SystemConfig {
  int n_ps = 3;   // PS antennas
  int n_ap = 3;   // AP antennas
  int n_ev = 2;   // eavesdropper antennas
  int n_irs = 2;  // number of information receivers

  double p_max_ps = dbm_to_watt(30.0);  // W
  double p_max_ap = dbm_to_watt(30.0);  // W

  double sigma_n2 = dbm_to_watt(-77.0);   // W, receiver-side AWGN in the SINR
  double sigma_ir2 = dbm_to_watt(-77.0);  // W
  double sigma_e2 = dbm_to_watt(-77.0);   // W (unused by worst-case security analysis)

  double rho_ps = 1.0 / 0.3;  // amplifier inefficiency multipliers
  double rho_ap = 1.0 / 0.3;

  double p_c_ps = 50e-6;  // circuit powers, W
  double p_c_ap = 50e-6;

  double e_res = 0.0;   // residual AP energy, J per slot
  double t_max = 1.0;   // slot duration, s

  HwiParams hwi;
  EhParams eh;
  QosParams qos;
  RunParams run;

  // Throws std::invalid_argument on violated invariants; recomputes caches.
  void validate();
};

// Diagonal distortion-budget matrices are stored as their diagonals; their
// off-diagonal entries never enter any constraint.
struct AuxVars {
  VecR a;  // per-AP-antenna transmit-power epigraph, size n_ap
  VecR b;  // per-PS-antenna Phase-I epigraph, size n_ps
  VecR c;  // per-PS-antenna Phase-II epigraph, size n_ps
  VecR d;  // per-IR received-power epigraph, size n_irs
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus s);

struct Allocation {
  double tau1 = 0.0;
  double tau2 = 0.0;

  MatC v_cov;  // n_ps x n_ps, Phase-I charging covariance
  MatC z_cov;  // n_ps x n_ps, Phase-II PS jamming covariance
  MatC u_cov;  // n_ap x n_ap, Phase-II AP jamming covariance
  std::vector<MatC> w_cov;  // per-IR information covariances, n_ap x n_ap
  std::vector<VecC> w_vec;  // recovered beamformers (empty before recovery)

  VecR b_ps1;  // diagonal distortion budgets, W
  VecR b_ps2;
  VecR b_ap;
  VecR r_ir;   // per-IR receiver-distortion budget, W

  double rho_recv = 0.0;  // received-RF-power scalar the design was solved at, W
  AuxVars aux;

  bool has_beamformers() const { return !w_vec.empty(); }

  // Sum_k w_k w_k^H + U using recovered beamformers when present, else the
  // covariances; this is the AP transmit covariance entering distortion terms.
  MatC ap_transmit_covariance() const;
};

Allocation zero_allocation(const SystemConfig& cfg);

void to_json(nlohmann::json& j, const SystemConfig& cfg);
void from_json(const nlohmann::json& j, SystemConfig& cfg);
void to_json(nlohmann::json& j, const Allocation& a);
void from_json(const nlohmann::json& j, Allocation& a);

}  // namespace wpcn
