#include "wpcn/robust.hpp"

#include <cmath>
#include <stdexcept>

#include "wpcn/model.hpp"

namespace wpcn::robust {

using conic::LinExpr;
using conic::MatExpr;
using conic::MatVar;
using conic::Program;

namespace {

// Below this radius the uncertainty ball is numerically indistinguishable from
// the point estimate (it perturbs any quadratic form by less than solver
// tolerance), while the ball encoding would carry 1/ups^2 ~ 1e18 coefficients.
// Such radii are treated as exactly zero and get the nominal constraint.
bool radius_negligible(double ups, const MatC& nominal) {
  return ups <= 1e-9 * (nominal.norm() + 1.0);
}

// diag(coords) as a matrix-valued expression
MatExpr diag_of(const std::vector<int>& coords) {
  const int n = static_cast<int>(coords.size());
  MatExpr e = MatExpr::zero(n);
  for (int i = 0; i < n; ++i) {
    MatC s = MatC::Zero(n, n);
    s(i, i) = 1.0;
    e.coef[coords[static_cast<std::size_t>(i)]] = s;
  }
  return e;
}

// [N - t I, 0; 0, (t/ups^2) I] + R^H M R >= 0 for R = [nominal, I].
void add_ball_lmi(Program& prog, const MatExpr& m, const MatExpr& split,
                  int multiplier, const MatC& nominal, double ups) {
  const int rows = static_cast<int>(nominal.rows());
  const int n_ev = static_cast<int>(nominal.cols());
  MatC r(rows, n_ev + rows);
  r.leftCols(n_ev) = nominal;
  r.rightCols(rows) = MatC::Identity(rows, rows);
  const MatExpr top =
      split - MatExpr::scaled_identity(n_ev, LinExpr::variable(multiplier));
  const MatExpr bottom = MatExpr::scaled_identity(
      rows, LinExpr::variable(multiplier, 1.0 / (ups * ups)));
  prog.add_psd(MatExpr::blkdiag(top, bottom) + m.congruence(r));
}

}  // namespace

WiretapVars add_wiretap_constraints(Program& prog, const std::vector<MatVar>& w,
                                    const MatVar& u_cov, const MatVar& z_cov,
                                    const std::vector<int>& b_ap,
                                    const std::vector<int>& b_ps2,
                                    const MatC& g_hat, const MatC& e_hat,
                                    double ups_ap, double ups_ps,
                                    double gamma_tol) {
  const int n_ap = static_cast<int>(g_hat.rows());
  const int n_ps = static_cast<int>(e_hat.rows());
  const int n_ev = static_cast<int>(g_hat.cols());
  if (e_hat.cols() != n_ev)
    throw std::invalid_argument("eavesdropper channel column mismatch");
  if (u_cov.dim != n_ap || static_cast<int>(b_ap.size()) != n_ap)
    throw std::invalid_argument("transmitter-side dimension mismatch");
  if (z_cov.dim != n_ps || static_cast<int>(b_ps2.size()) != n_ps)
    throw std::invalid_argument("charger-side dimension mismatch");
  if (!(gamma_tol > 0.0))
    throw std::invalid_argument("wiretap SINR cap must be positive");

  const bool ap_nominal = radius_negligible(ups_ap, g_hat);
  const bool ps_nominal = radius_negligible(ups_ps, e_hat);
  WiretapVars vars;
  vars.ups_ap = ap_nominal ? 0.0 : ups_ap;
  vars.ups_ps = ps_nominal ? 0.0 : ups_ps;
  vars.n_split = prog.add_hermitian_free("eve_split", n_ev);

  const MatExpr split = MatExpr::from_var(vars.n_split);
  const MatExpr jam_ap = MatExpr::from_var(u_cov) + diag_of(b_ap);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const MatExpr m_k = jam_ap - (1.0 / gamma_tol) * MatExpr::from_var(w[k]);
    if (ap_nominal) {
      vars.t_ap.push_back(-1);
      prog.add_psd(m_k.congruence(g_hat) + split);
    } else {
      const int t_k = prog.add_scalar("eve_ball_ap" + std::to_string(k), true);
      vars.t_ap.push_back(t_k);
      add_ball_lmi(prog, m_k, split, t_k, g_hat, vars.ups_ap);
    }
  }
  const MatExpr k_ps = MatExpr::from_var(z_cov) + diag_of(b_ps2);
  if (ps_nominal) {
    prog.add_psd(k_ps.congruence(e_hat) - 1.0 * split);
  } else {
    vars.gamma_ps = prog.add_scalar("eve_ball_ps", true);
    add_ball_lmi(prog, k_ps, -1.0 * split, vars.gamma_ps, e_hat, vars.ups_ps);
  }
  return vars;
}

SecurityAudit sample_security(const Allocation& alloc, const ChannelSet& ch,
                              const SystemConfig& cfg, int n_samples,
                              std::uint64_t seed) {
  if (!alloc.has_beamformers())
    throw std::invalid_argument("security audit needs recovered beamformers");
  if (!(alloc.tau2 > 0.0))
    throw std::invalid_argument("security audit needs a positive jamming phase");

  SecurityAudit audit;
  const double rate_cap = cfg.qos.r_tol * (1.0 + 1e-6) + 1e-12;
  Rng rng(derive_seed(seed, 0xa0d17));
  const int k_streams = static_cast<int>(alloc.w_vec.size());

  auto probe = [&](const MatC& dg, const MatC& de) {
    for (int k = 0; k < k_streams; ++k) {
      const auto cap = model::eve_capacity(k, alloc, ch, dg, de, cfg);
      if (!cap) {
        ++audit.insecure_samples;
        ++audit.violations;
        continue;
      }
      const double rate = alloc.tau2 * *cap;
      if (rate > audit.worst_eve_rate) {
        audit.worst_eve_rate = rate;
        audit.worst_eve_sinr = std::exp2(*cap) - 1.0;
      }
      if (rate > rate_cap) ++audit.violations;
    }
    ++audit.samples;
  };

  probe(MatC::Zero(ch.g_hat.rows(), ch.g_hat.cols()),
        MatC::Zero(ch.e_hat.rows(), ch.e_hat.cols()));
  if (ch.true_dg && ch.true_de) probe(*ch.true_dg, *ch.true_de);
  while (audit.samples < n_samples) {
    const bool boundary = (audit.samples % 2) == 0;
    const MatC dg =
        sample_csi_error(ch.ups_ap_e, ch.g_hat.rows(), ch.g_hat.cols(), rng, boundary);
    const MatC de =
        sample_csi_error(ch.ups_ps_e, ch.e_hat.rows(), ch.e_hat.cols(), rng, boundary);
    probe(dg, de);
  }
  return audit;
}

}  // namespace wpcn::robust
