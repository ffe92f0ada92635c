// Design-problem assembly for one fixed operating point, beamformer recovery
// from the relaxed covariances, and the audit that re-checks every physical
// constraint of the original problem on the recovered allocation.
//
// The operating point fixes the two phase durations and the received-RF-power
// target omega_bar. With those frozen, harvested energy is a constant, every
// remaining constraint is linear, PSD, or a convex power bound, and the whole
// design becomes one conic program. The outer search over durations and
// omega_bar lives in a separate module.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpcn/channels.hpp"
#include "wpcn/conic.hpp"
#include "wpcn/robust.hpp"
#include "wpcn/types.hpp"

namespace wpcn::alloc {

// Assembled conic program plus every handle needed to read a solution back.
struct SdpProblem {
  conic::Program prog;

  std::vector<conic::MatVar> w;  // per-stream information covariances
  conic::MatVar v;               // Phase-I charging covariance
  conic::MatVar z;               // Phase-II charger jamming covariance
  conic::MatVar u;               // Phase-II AP jamming covariance

  std::vector<int> b_ap;    // per-antenna transmit-distortion budgets
  std::vector<int> b_ps1;
  std::vector<int> b_ps2;
  std::vector<int> pow_ap;  // per-antenna radiated-power epigraphs
  std::vector<int> pow_ps1;
  std::vector<int> pow_ps2;
  std::vector<int> recv_ir;  // per-stream received-power epigraphs
  std::vector<int> r_ir;     // per-stream receiver-distortion budgets

  robust::WiretapVars wiretap;

  double tau1 = 0.0;
  double tau2 = 0.0;
  double omega_bar = 0.0;          // received-RF-power target, W
  double gamma_tol = 0.0;          // eavesdropper SINR cap at this tau2
  std::vector<double> gamma_req;   // per-stream SINR targets at this tau2
};

// Builds the relaxed design problem at fixed phase durations (tau1, tau2) and
// received-power target omega_bar. Variables: stream covariances, the three
// jamming/charging covariances, diagonal distortion budgets with their
// power-curve epigraphs, receiver-distortion budgets, and the worst-case
// wiretap auxiliaries. The rank-one requirement on the stream covariances is
// dropped; recover_beamformers restores it after the solve.
SdpProblem build_sdp(double tau1, double tau2, double omega_bar,
                     const SystemConfig& cfg, const ChannelSet& ch);

// Reads the solved coordinates back into an Allocation (covariances only, no
// beamformers yet) and retightens the distortion budgets: the solver may
// return any point on the optimal face where a budget exceeds the distortion
// its matched power actually produces, and such slack would overstate the
// delivered jamming. Objective-preserving diagonal shifts (charging power for
// Phase-I, jamming power for the two Phase-II links) make every budget equal
// the physical distortion at its final power.
Allocation extract_allocation(const SdpProblem& sdp, const conic::Solution& sol,
                              const SystemConfig& cfg, const ChannelSet& ch);

// Eigenvalue diagnostics and outcome of the beamformer recovery.
struct RankReport {
  std::vector<double> stream_ratio;  // second-to-first eigenvalue ratio per stream
  double charge_ratio = 0.0;         // same ratio for the charging covariance
  double jam_ps_ratio = 0.0;         // and the two jamming covariances
  double jam_ap_ratio = 0.0;
  double max_stream_ratio = 0.0;
  bool randomized = false;  // true when the Gaussian fallback replaced a stream
};

// Extracts per-stream beamformers. Streams whose covariance is rank one
// within cfg.run.rank_tol take the scaled dominant eigenvector; otherwise a
// Gaussian-randomization fallback draws cfg.run.randomization_candidates
// candidate sets from the covariances, rescales each set to restore the SINR
// targets, and keeps the best candidate that passes the audit. Budgets are
// recomputed from the recovered beamformers so the record stays physical.
RankReport recover_beamformers(Allocation& alloc, const SystemConfig& cfg,
                               const ChannelSet& ch, std::uint64_t seed);

// One audited constraint: nonnegative slack means satisfied.
struct ConstraintCheck {
  std::string name;
  double slack = 0.0;
};

struct AuditReport {
  std::vector<ConstraintCheck> checks;
  double min_slack = conic::inf;

  VecR sinr;       // delivered per-stream SINR under the full hardware model
  VecR gamma_req;  // targets implied by the allocation's tau2
  double worst_eve_rate = 0.0;  // from the sampling audit (0 if skipped)
  int eve_violations = 0;

  bool feasible(double tol = 1e-6) const { return min_slack >= -tol; }
  double slack(const std::string& name) const;  // throws if unknown
};

// Evaluates every constraint of the original design problem with the full
// non-linear hardware model (true distortion curves, true harvester) and the
// recovered beamformers, plus the budget-coverage identities the reformulated
// problem promises to satisfy with equality. Violations are reported, never
// thrown. The eavesdropper cap is checked by sampling channel errors
// (cfg.run.audit_security_samples draws) when a jamming phase exists.
AuditReport audit_solution(const Allocation& alloc, const SystemConfig& cfg,
                           const ChannelSet& ch, std::uint64_t seed = 1);

}  // namespace wpcn::alloc
