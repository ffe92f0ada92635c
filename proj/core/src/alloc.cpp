#include "wpcn/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "wpcn/model.hpp"

namespace wpcn::alloc {

using conic::LinExpr;
using conic::MatVar;
using conic::Program;

namespace {

// SINR that delivers `rate` within a jamming phase of length tau2; overflows
// cleanly to infinity when tau2 is far too short for the rate.
double sinr_target(double rate, double tau2) { return std::exp2(rate / tau2) - 1.0; }

// Smallest budget b in [0, total] with b >= eta(total - b): the split of a
// conserved per-antenna diagonal total into radiated power plus the matching
// distortion. Used to collapse the Phase-I degeneracy where charging power
// and its budget are interchangeable in every constraint they share.
double conserved_split(double total, const HwiParams& hwi) {
  if (total <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = total;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - model::tx_distortion(total - mid, hwi) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

// Largest extra jamming power d in [0, budget] with eta(p + d) + d <= budget.
// Moving d from a slack budget into real jamming power keeps the total
// claimed jamming (power + budget) and the power caps unchanged while making
// the budget equal the distortion its antenna actually produces.
double jam_shift(double p, double budget, const HwiParams& hwi) {
  if (budget <= 0.0 || model::tx_distortion(p, hwi) >= budget) return 0.0;
  double lo = 0.0;
  double hi = budget;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (model::tx_distortion(p + mid, hwi) + mid - budget >= 0.0 ? hi : lo) = mid;
  }
  return lo;
}

struct EigSplit {
  double lead = 0.0;   // largest eigenvalue, clamped at zero
  double ratio = 0.0;  // second-to-first eigenvalue ratio
  VecC vec;            // dominant eigenvector
};

EigSplit dominant_eigenpair(const MatC& m) {
  Eigen::SelfAdjointEigenSolver<MatC> es(m);
  const VecR ev = es.eigenvalues();  // ascending
  const Eigen::Index n = ev.size();
  EigSplit s;
  s.lead = std::max(0.0, ev[n - 1]);
  const double second = n > 1 ? std::max(0.0, ev[n - 2]) : 0.0;
  s.ratio = s.lead > 0.0 ? second / s.lead : 0.0;
  s.vec = es.eigenvectors().col(n - 1);
  return s;
}

// Rotates the global phase so the largest-magnitude entry is real positive;
// beamformers are phase-invariant and this keeps serialized output stable.
VecC canonical_phase(VecC v) {
  Eigen::Index imax = 0;
  const double mag = v.cwiseAbs().maxCoeff(&imax);
  if (mag > 0.0) v *= std::conj(v[imax]) / mag;
  return v;
}

// Refreshes the AP-side distortion bookkeeping (budgets, epigraphs, receiver
// distortion) from the allocation's current beamformers, so the record
// describes the waveform actually transmitted.
void refresh_ap_records(Allocation& a, const SystemConfig& cfg, const ChannelSet& ch) {
  const MatC s_ap = a.ap_transmit_covariance();
  for (Eigen::Index n = 0; n < s_ap.rows(); ++n) {
    const double pw = std::max(0.0, s_ap(n, n).real());
    a.aux.a[n] = pw;
    a.b_ap[n] = model::tx_distortion(pw, cfg.hwi);
  }
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    const VecC& h = ch.h[k];
    const VecC& f = ch.f[k];
    const double rx_in = (h.adjoint() * s_ap * h).value().real() +
                         (f.adjoint() * a.z_cov * f).value().real();
    a.aux.d[static_cast<Eigen::Index>(k)] = std::max(0.0, rx_in);
    a.r_ir[static_cast<Eigen::Index>(k)] =
        model::rx_distortion(std::max(0.0, rx_in), cfg.hwi.k3);
  }
}

}  // namespace

SdpProblem build_sdp(double tau1, double tau2, double omega_bar,
                     const SystemConfig& cfg, const ChannelSet& ch) {
  if (!(tau1 > 0.0) || !(tau2 > 0.0))
    throw std::invalid_argument("phase durations must be positive");
  if (omega_bar < 0.0)
    throw std::invalid_argument("received-power target must be nonnegative");
  const int k_streams = cfg.n_irs;
  if (static_cast<int>(ch.h.size()) != k_streams ||
      static_cast<int>(ch.f.size()) != k_streams)
    throw std::invalid_argument("per-stream channel count mismatch");
  if (static_cast<int>(cfg.qos.r_req.size()) != k_streams)
    throw std::invalid_argument("per-stream rate requirement count mismatch");
  for (double r : cfg.qos.r_req)
    if (!(r > 0.0)) throw std::invalid_argument("rate requirements must be positive");
  if (!(cfg.qos.r_tol > 0.0))
    throw std::invalid_argument("leakage tolerance must be positive");
  if (!(cfg.sigma_n2 > 0.0))
    throw std::invalid_argument("receiver noise power must be positive");

  SdpProblem s;
  s.tau1 = tau1;
  s.tau2 = tau2;
  s.omega_bar = omega_bar;
  s.gamma_tol = sinr_target(cfg.qos.r_tol, tau2);
  for (int k = 0; k < k_streams; ++k)
    s.gamma_req.push_back(sinr_target(cfg.qos.r_req[static_cast<std::size_t>(k)], tau2));

  Program& p = s.prog;
  for (int k = 0; k < k_streams; ++k)
    s.w.push_back(p.add_hermitian_psd("info_cov" + std::to_string(k), cfg.n_ap));
  s.v = p.add_hermitian_psd("charge_cov", cfg.n_ps);
  s.z = p.add_hermitian_psd("jam_cov_ps", cfg.n_ps);
  s.u = p.add_hermitian_psd("jam_cov_ap", cfg.n_ap);
  for (int n = 0; n < cfg.n_ap; ++n) {
    s.b_ap.push_back(p.add_scalar("budget_ap" + std::to_string(n), true));
    s.pow_ap.push_back(p.add_scalar("ant_pow_ap" + std::to_string(n), true));
  }
  for (int m = 0; m < cfg.n_ps; ++m) {
    s.b_ps1.push_back(p.add_scalar("budget_ps1_" + std::to_string(m), true));
    s.pow_ps1.push_back(p.add_scalar("ant_pow_ps1_" + std::to_string(m), true));
    s.b_ps2.push_back(p.add_scalar("budget_ps2_" + std::to_string(m), true));
    s.pow_ps2.push_back(p.add_scalar("ant_pow_ps2_" + std::to_string(m), true));
  }
  for (int k = 0; k < k_streams; ++k) {
    s.recv_ir.push_back(p.add_scalar("recv_pow_ir" + std::to_string(k), true));
    s.r_ir.push_back(p.add_scalar("recv_dist_ir" + std::to_string(k), true));
  }

  // Radiated-plus-budget totals reused by the objective, the power caps, and
  // the energy-causality row.
  LinExpr ps1_total = s.v.trace();
  for (int m : s.b_ps1) ps1_total += LinExpr::variable(m);
  LinExpr ps2_total = s.z.trace();
  for (int m : s.b_ps2) ps2_total += LinExpr::variable(m);
  LinExpr ap_total = s.u.trace();
  for (const MatVar& wk : s.w) ap_total += wk.trace();
  for (int n : s.b_ap) ap_total += LinExpr::variable(n);

  LinExpr obj = (tau1 * cfg.rho_ps) * ps1_total + (tau2 * cfg.rho_ap) * ap_total +
                (tau2 * cfg.rho_ps) * ps2_total;
  obj.c0 += tau1 * cfg.p_c_ps + tau2 * (cfg.p_c_ap + cfg.p_c_ps);
  p.set_objective(obj);

  // Per-stream channel outer products, divided by the receiver noise power.
  // Every receive-side row is homogeneous in that scaling (the SINR rows,
  // the receive-chain epigraphs, and the eavesdropper blocks all rescale
  // consistently), so dividing the channels out is exact and keeps the row
  // coefficients within a few orders of magnitude of the watt-scale
  // variables instead of 1e11 away from them.
  const double ns = cfg.sigma_n2;
  std::vector<MatC> hh;
  std::vector<MatC> ff;
  for (int k = 0; k < k_streams; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    hh.push_back(ch.h[ku] * ch.h[ku].adjoint() / ns);
    ff.push_back(ch.f[ku] * ch.f[ku].adjoint() / ns);
  }

  // Minimum-SINR rows: desired power over the target beats multiuser
  // interference, both transmit-distortion leakages, the receiver-distortion
  // budget, and noise (scaled to one by the normalization above; the
  // receive-side epigraph scalars live in the same normalized units).
  // Artificial noise is known to the receivers and cancelled, so neither
  // jamming covariance appears directly.
  for (int k = 0; k < k_streams; ++k) {
    LinExpr row = (1.0 / s.gamma_req[static_cast<std::size_t>(k)]) *
                  s.w[static_cast<std::size_t>(k)].trace_product(hh[static_cast<std::size_t>(k)]);
    for (int j = 0; j < k_streams; ++j)
      if (j != k)
        row -= s.w[static_cast<std::size_t>(j)].trace_product(hh[static_cast<std::size_t>(k)]);
    for (int n = 0; n < cfg.n_ap; ++n)
      row -= LinExpr::variable(s.b_ap[static_cast<std::size_t>(n)],
                               hh[static_cast<std::size_t>(k)](n, n).real());
    for (int m = 0; m < cfg.n_ps; ++m)
      row -= LinExpr::variable(s.b_ps2[static_cast<std::size_t>(m)],
                               ff[static_cast<std::size_t>(k)](m, m).real());
    row -= LinExpr::variable(s.r_ir[static_cast<std::size_t>(k)]);
    p.add_linear(row, 1.0, conic::inf);
  }

  // Worst-case eavesdropper cap over the CSI error balls. The noise
  // normalization extends to the eavesdropper channels and their error
  // radii; the split LMIs are congruence-invariant under it.
  const double sqrt_ns = std::sqrt(ns);
  s.wiretap = robust::add_wiretap_constraints(
      p, s.w, s.u, s.z, s.b_ap, s.b_ps2, (ch.g_hat / sqrt_ns).eval(),
      (ch.e_hat / sqrt_ns).eval(), ch.ups_ap_e / sqrt_ns, ch.ups_ps_e / sqrt_ns,
      s.gamma_tol);

  // Energy causality: Phase-II AP consumption is funded by the Phase-I
  // harvest at the fixed received-power target plus the reserve.
  const double funds =
      tau1 * model::harvested_power(omega_bar, cfg.eh) + cfg.e_res - tau2 * cfg.p_c_ap;
  p.add_linear((tau2 * cfg.rho_ap) * ap_total, -conic::inf, funds);

  // The charging signal (plus its distortion) must deliver the target
  // received RF power through the charger->AP link.
  const MatC ll = ch.l_mat * ch.l_mat.adjoint();
  LinExpr recv = s.v.trace_product(ll);
  for (int m = 0; m < cfg.n_ps; ++m)
    recv += LinExpr::variable(s.b_ps1[static_cast<std::size_t>(m)], ll(m, m).real());
  p.add_linear(recv, omega_bar, conic::inf);

  // Radiated-power caps (budgets count: distortion is radiated too).
  p.add_linear(ps1_total, -conic::inf, cfg.p_max_ps);
  p.add_linear(ps2_total, -conic::inf, cfg.p_max_ps);
  p.add_linear(ap_total, -conic::inf, cfg.p_max_ap);

  // Per-antenna power epigraphs feeding the distortion curves.
  for (int n = 0; n < cfg.n_ap; ++n) {
    const auto nu = static_cast<std::size_t>(n);
    LinExpr pw = s.u.diag(n);
    for (const MatVar& wk : s.w) pw += wk.diag(n);
    p.add_linear(pw - LinExpr::variable(s.pow_ap[nu]), -conic::inf, 0.0);
    p.add_power_bound(LinExpr::variable(s.b_ap[nu]), LinExpr::variable(s.pow_ap[nu]),
                      cfg.hwi.k1, cfg.hwi.k2, cfg.p_max_ap);
  }
  for (int m = 0; m < cfg.n_ps; ++m) {
    const auto mu = static_cast<std::size_t>(m);
    p.add_linear(s.v.diag(m) - LinExpr::variable(s.pow_ps1[mu]), -conic::inf, 0.0);
    p.add_power_bound(LinExpr::variable(s.b_ps1[mu]), LinExpr::variable(s.pow_ps1[mu]),
                      cfg.hwi.k1, cfg.hwi.k2, cfg.p_max_ps);
    p.add_linear(s.z.diag(m) - LinExpr::variable(s.pow_ps2[mu]), -conic::inf, 0.0);
    p.add_power_bound(LinExpr::variable(s.b_ps2[mu]), LinExpr::variable(s.pow_ps2[mu]),
                      cfg.hwi.k1, cfg.hwi.k2, cfg.p_max_ps);
  }

  // Receiver-distortion budgets: everything a stream's antenna receives from
  // the AP and the charger feeds the receive chain.
  for (int k = 0; k < k_streams; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    LinExpr d = s.u.trace_product(hh[ku]) + s.z.trace_product(ff[ku]);
    for (const MatVar& wk : s.w) d += wk.trace_product(hh[ku]);
    p.add_linear(d - LinExpr::variable(s.recv_ir[ku]), -conic::inf, 0.0);
    p.add_linear(LinExpr::variable(s.r_ir[ku]) -
                     LinExpr::variable(s.recv_ir[ku], cfg.hwi.nu_coeff()),
                 0.0, conic::inf);
  }
  return s;
}

Allocation extract_allocation(const SdpProblem& sdp, const conic::Solution& sol,
                              const SystemConfig& cfg, const ChannelSet& ch) {
  Allocation a = zero_allocation(cfg);
  a.tau1 = sdp.tau1;
  a.tau2 = sdp.tau2;
  const VecR& y = sol.y;
  if (y.size() == 0) return a;

  const Program& p = sdp.prog;
  for (std::size_t k = 0; k < sdp.w.size(); ++k) a.w_cov[k] = p.value_of(sdp.w[k], y);
  a.v_cov = p.value_of(sdp.v, y);
  a.z_cov = p.value_of(sdp.z, y);
  a.u_cov = p.value_of(sdp.u, y);

  // Phase-I retightening: charging power and its budget are interchangeable
  // in the delivered-power row, the cap, and the objective, so the solver may
  // return any split of their per-antenna total. Commit to the unique split
  // whose budget equals the distortion of its own radiated power.
  for (int m = 0; m < cfg.n_ps; ++m) {
    const double total = std::max(0.0, a.v_cov(m, m).real()) +
                         std::max(0.0, y[sdp.b_ps1[static_cast<std::size_t>(m)]]);
    const double bud = conserved_split(total, cfg.hwi);
    a.v_cov(m, m) = total - bud;
    a.b_ps1[m] = model::tx_distortion(total - bud, cfg.hwi);
  }

  // Phase-II retightening: budget slack over the physical distortion claims
  // jamming that no antenna radiates. Convert any slack into real jamming
  // power of the same total, after which budget and distortion agree.
  MatC s_ap = a.u_cov;
  for (const MatC& wc : a.w_cov) s_ap += wc;
  for (int n = 0; n < cfg.n_ap; ++n) {
    const double pw = std::max(0.0, s_ap(n, n).real());
    const double bud = std::max(0.0, y[sdp.b_ap[static_cast<std::size_t>(n)]]);
    const double d = jam_shift(pw, bud, cfg.hwi);
    a.u_cov(n, n) += d;
    a.b_ap[n] = model::tx_distortion(pw + d, cfg.hwi);
    a.aux.a[n] = pw + d;
  }
  for (int m = 0; m < cfg.n_ps; ++m) {
    const double pw = std::max(0.0, a.z_cov(m, m).real());
    const double bud = std::max(0.0, y[sdp.b_ps2[static_cast<std::size_t>(m)]]);
    const double d = jam_shift(pw, bud, cfg.hwi);
    a.z_cov(m, m) += d;
    a.b_ps2[m] = model::tx_distortion(pw + d, cfg.hwi);
    a.aux.c[m] = pw + d;
  }
  for (int m = 0; m < cfg.n_ps; ++m) a.aux.b[m] = a.v_cov(m, m).real();

  // Receiver-distortion bookkeeping and the delivered received power, both
  // re-evaluated at the final covariances.
  s_ap = a.u_cov;
  for (const MatC& wc : a.w_cov) s_ap += wc;
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    const double rx_in = (ch.h[k].adjoint() * s_ap * ch.h[k]).value().real() +
                         (ch.f[k].adjoint() * a.z_cov * ch.f[k]).value().real();
    a.aux.d[static_cast<Eigen::Index>(k)] = std::max(0.0, rx_in);
    a.r_ir[static_cast<Eigen::Index>(k)] =
        model::rx_distortion(std::max(0.0, rx_in), cfg.hwi.k3);
  }
  MatC phi = MatC::Zero(cfg.n_ps, cfg.n_ps);
  for (int m = 0; m < cfg.n_ps; ++m) phi(m, m) = a.b_ps1[m];
  a.rho_recv = (ch.l_mat.adjoint() * (a.v_cov + phi) * ch.l_mat).trace().real();
  return a;
}

RankReport recover_beamformers(Allocation& alloc, const SystemConfig& cfg,
                               const ChannelSet& ch, std::uint64_t seed) {
  RankReport rep;
  const int k_streams = static_cast<int>(alloc.w_cov.size());
  alloc.w_vec.clear();
  for (int k = 0; k < k_streams; ++k) {
    const EigSplit e = dominant_eigenpair(alloc.w_cov[static_cast<std::size_t>(k)]);
    rep.stream_ratio.push_back(e.ratio);
    rep.max_stream_ratio = std::max(rep.max_stream_ratio, e.ratio);
    alloc.w_vec.push_back(e.lead > 0.0
                              ? canonical_phase((std::sqrt(e.lead) * e.vec).eval())
                              : VecC::Zero(alloc.u_cov.rows()).eval());
  }
  rep.charge_ratio = dominant_eigenpair(alloc.v_cov).ratio;
  rep.jam_ps_ratio = dominant_eigenpair(alloc.z_cov).ratio;
  rep.jam_ap_ratio = dominant_eigenpair(alloc.u_cov).ratio;
  if (rep.max_stream_ratio <= cfg.run.rank_tol || alloc.tau2 <= 0.0) return rep;

  // Gaussian-randomization fallback: draw candidate beamformer sets from the
  // covariances, rescale each set so the design's interference model meets
  // the SINR targets exactly, and keep the cheapest candidate that passes the
  // full audit. The dominant-eigenpair recovery stays when no candidate does.
  std::vector<MatC> roots;
  for (const MatC& wc : alloc.w_cov) {
    Eigen::SelfAdjointEigenSolver<MatC> es(wc);
    const VecR lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    roots.push_back(es.eigenvectors() * lam.cast<cxd>().asDiagonal() *
                    es.eigenvectors().adjoint());
  }
  std::vector<double> gamma_req;
  std::vector<double> fixed;
  for (int k = 0; k < k_streams; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    gamma_req.push_back(sinr_target(cfg.qos.r_req[ku], alloc.tau2));
    double base = alloc.r_ir[k] + cfg.sigma_n2;
    for (int n = 0; n < cfg.n_ap; ++n)
      base += alloc.b_ap[n] * std::norm(ch.h[ku][n]);
    for (int m = 0; m < cfg.n_ps; ++m)
      base += alloc.b_ps2[m] * std::norm(ch.f[ku][m]);
    fixed.push_back(base);
  }

  Rng rng(derive_seed(seed, 0xbf01));
  Allocation best;
  double best_obj = conic::inf;
  for (int c = 0; c < cfg.run.randomization_candidates; ++c) {
    Allocation cand = alloc;
    for (int k = 0; k < k_streams; ++k) {
      VecC xi(alloc.u_cov.rows());
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.cnormal();
      cand.w_vec[static_cast<std::size_t>(k)] = roots[static_cast<std::size_t>(k)] * xi;
    }
    // Power rescale meeting every SINR row with equality in the design model.
    MatR sys(k_streams, k_streams);
    VecR rhs(k_streams);
    for (int k = 0; k < k_streams; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      for (int j = 0; j < k_streams; ++j) {
        const double cross = std::norm(ch.h[ku].dot(cand.w_vec[static_cast<std::size_t>(j)]));
        sys(k, j) = j == k ? cross : -gamma_req[ku] * cross;
      }
      rhs[k] = gamma_req[ku] * fixed[ku];
    }
    const VecR scale = sys.fullPivLu().solve(rhs);
    if (!scale.allFinite() || scale.minCoeff() <= 0.0) continue;
    for (int k = 0; k < k_streams; ++k)
      cand.w_vec[static_cast<std::size_t>(k)] = canonical_phase(
          (std::sqrt(scale[k]) * cand.w_vec[static_cast<std::size_t>(k)]).eval());
    refresh_ap_records(cand, cfg, ch);
    const AuditReport audit =
        audit_solution(cand, cfg, ch, derive_seed(seed, 0x1000 + static_cast<std::uint64_t>(c)));
    if (!audit.feasible()) continue;
    const double obj = model::power_accounting(cand, cfg).objective;
    if (obj < best_obj) {
      best_obj = obj;
      best = cand;
    }
  }
  if (std::isfinite(best_obj)) {
    alloc = best;
    rep.randomized = true;
  }
  return rep;
}

double AuditReport::slack(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c.slack;
  throw std::out_of_range("no audited constraint named " + name);
}

AuditReport audit_solution(const Allocation& alloc, const SystemConfig& cfg,
                           const ChannelSet& ch, std::uint64_t seed) {
  if (!alloc.has_beamformers())
    throw std::invalid_argument("audit needs recovered beamformers");

  AuditReport rep;
  auto push = [&rep](std::string name, double slack) {
    rep.min_slack = std::min(rep.min_slack, slack);
    rep.checks.push_back({std::move(name), slack});
  };

  const int k_streams = static_cast<int>(alloc.w_vec.size());
  rep.sinr = VecR::Zero(k_streams);
  rep.gamma_req = VecR::Zero(k_streams);
  for (int k = 0; k < k_streams; ++k) {
    const double g = model::ir_sinr(k, alloc, ch, cfg);
    rep.sinr[k] = g;
    const double req = cfg.qos.r_req[static_cast<std::size_t>(k)];
    rep.gamma_req[k] = alloc.tau2 > 0.0 ? sinr_target(req, alloc.tau2) : conic::inf;
    const double rate = alloc.tau2 > 0.0 ? alloc.tau2 * std::log2(1.0 + g) : 0.0;
    push("stream_rate_" + std::to_string(k), rate - req);
  }

  if (alloc.tau2 > 0.0) {
    const robust::SecurityAudit sec = robust::sample_security(
        alloc, ch, cfg, cfg.run.audit_security_samples, seed);
    rep.worst_eve_rate = sec.worst_eve_rate;
    rep.eve_violations = sec.violations;
    push("eve_rate_sampled", sec.insecure_samples > 0
                                 ? -conic::inf
                                 : cfg.qos.r_tol - sec.worst_eve_rate);
  } else {
    push("eve_rate_sampled", cfg.qos.r_tol);
  }

  push("time_budget", cfg.t_max - alloc.tau1 - alloc.tau2);
  push("phase_durations", std::min(alloc.tau1, alloc.tau2));

  const model::DistortionCovariances dc = model::transmit_covariances(alloc, cfg.hwi);
  const model::PowerBreakdown pb = model::power_accounting(alloc, cfg);

  MatC phi = MatC::Zero(cfg.n_ps, cfg.n_ps);
  for (int m = 0; m < cfg.n_ps; ++m) phi(m, m) = dc.phi[m];
  const double omega_true =
      (ch.l_mat.adjoint() * (alloc.v_cov + phi) * ch.l_mat).trace().real();
  push("energy_causality",
       alloc.tau1 * model::harvested_power(std::max(0.0, omega_true), cfg.eh) +
           cfg.e_res - alloc.tau2 * pb.p_ap2);
  push("received_power_claim", omega_true - alloc.rho_recv);

  push("charge_power_cap",
       cfg.p_max_ps - alloc.v_cov.trace().real() - dc.phi.sum());
  push("jam_ps_power_cap",
       cfg.p_max_ps - alloc.z_cov.trace().real() - dc.theta.sum());
  double ap_radiated = alloc.u_cov.trace().real();
  for (const VecC& w : alloc.w_vec) ap_radiated += w.squaredNorm();
  push("ap_power_cap", cfg.p_max_ap - ap_radiated - dc.psi.sum());

  push("charge_cov_psd", min_eigenvalue(alloc.v_cov));
  push("jam_ps_cov_psd", min_eigenvalue(alloc.z_cov));
  push("jam_ap_cov_psd", min_eigenvalue(alloc.u_cov));

  // Budget-coverage identities: every recorded distortion budget must cover
  // the distortion produced by the powers actually transmitted, and matches
  // it exactly at a retightened design point.
  for (int n = 0; n < cfg.n_ap; ++n)
    push("ap_budget_covers_" + std::to_string(n), alloc.b_ap[n] - dc.psi[n]);
  for (int m = 0; m < cfg.n_ps; ++m) {
    push("ps1_budget_covers_" + std::to_string(m), alloc.b_ps1[m] - dc.phi[m]);
    push("ps2_budget_covers_" + std::to_string(m), alloc.b_ps2[m] - dc.theta[m]);
  }
  const MatC s_ap = alloc.ap_transmit_covariance();
  for (int k = 0; k < k_streams; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double rx_in = (ch.h[ku].adjoint() * s_ap * ch.h[ku]).value().real() +
                         (ch.f[ku].adjoint() * alloc.z_cov * ch.f[ku]).value().real();
    push("ir_budget_covers_" + std::to_string(k),
         alloc.r_ir[k] - model::rx_distortion(std::max(0.0, rx_in), cfg.hwi.k3));
  }
  return rep;
}

}  // namespace wpcn::alloc
