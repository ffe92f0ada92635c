// Worst-case wiretap constraints over bounded CSI errors, and the sampling
// audit that falsifies delivered security levels.
//
// The eavesdropper-side cap "max over channel errors of per-stream Eve SINR
// <= gamma_tol" is a semi-infinite matrix inequality over two independent
// Frobenius-norm error balls (transmitter->Eve and charger->Eve). It is made
// finite by splitting the two balls with a shared Hermitian matrix and
// applying the robust quadratic matrix inequality lemma to each side, which
// yields one LMI per stream plus one for the charger link.
#pragma once

#include <cstdint>
#include <vector>

#include "wpcn/channels.hpp"
#include "wpcn/conic.hpp"
#include "wpcn/types.hpp"

namespace wpcn::robust {

// Handles to the auxiliary variables introduced by add_wiretap_constraints.
struct WiretapVars {
  conic::MatVar n_split;   // Hermitian split matrix shared by all streams
  std::vector<int> t_ap;   // ball multiplier per stream (-1: nominal path)
  int gamma_ps = -1;       // ball multiplier for the charger link
  double ups_ap = 0.0;     // effective radii (0 means the nominal channel
  double ups_ps = 0.0;     // estimate was enforced directly)
};

// Imposes, for every stream k,
//   G^H W_k G / gamma_tol <= G^H (U + diag(b_ap)) G + E^H (Z + diag(b_ps2)) E
// for all G = g_hat + dG, E = e_hat + dE with ||dG||_F <= ups_ap and
// ||dE||_F <= ups_ps. `b_ap` / `b_ps2` are the scalar coordinates of the
// diagonal transmit-distortion budgets. A radius that is zero or negligible
// against the channel magnitude drops the ball encoding and constrains the
// nominal channel directly.
WiretapVars add_wiretap_constraints(conic::Program& prog,
                                    const std::vector<conic::MatVar>& w,
                                    const conic::MatVar& u_cov,
                                    const conic::MatVar& z_cov,
                                    const std::vector<int>& b_ap,
                                    const std::vector<int>& b_ps2,
                                    const MatC& g_hat, const MatC& e_hat,
                                    double ups_ap, double ups_ps,
                                    double gamma_tol);

// Result of the Monte-Carlo security falsification.
struct SecurityAudit {
  double worst_eve_rate = 0.0;  // max over samples and streams of tau2 * capacity
  double worst_eve_sinr = 0.0;  // the matching SINR
  int violations = 0;           // samples whose Eve rate exceeds the tolerance
  int insecure_samples = 0;     // samples with no received jamming at all
  int samples = 0;
};

// Draws `n_samples` CSI-error pairs (alternating uniform-in-ball and
// boundary draws, always including the zero error and, when recorded, the
// true realization), evaluates the eavesdropper's capacity per stream with
// the physical distortion model, and reports the worst case. A violation is
// an Eve rate above r_tol * (1 + 1e-6) + 1e-12. Requires recovered
// beamformers and tau2 > 0.
SecurityAudit sample_security(const Allocation& alloc, const ChannelSet& ch,
                              const SystemConfig& cfg, int n_samples,
                              std::uint64_t seed);

}  // namespace wpcn::robust
