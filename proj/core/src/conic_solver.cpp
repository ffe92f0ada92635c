// Primal-dual interior-point method for the block LMI form
//     min c^T y   s.t.   F_{j0} + sum_i y_i F_{ji} >= 0  (one block per j),
//                        A_eq y = b_eq,
// using the HKM direction with a Mehrotra predictor-corrector, Ruiz
// equilibration, and a Schur complement assembled block-wise with dense
// level-3 kernels. Complex Hermitian blocks arrive here already embedded as
// real symmetric blocks of twice the dimension.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "wpcn/conic.hpp"

namespace wpcn::conic {

namespace {

struct Block {
  int d = 0;
  MatR f0;
  std::vector<int> vars;  // global scalar indices of the coefficients
  MatR basis_t;           // (d*d) x |vars|; column k = vec of coefficient k
  // iteration workspace
  MatR s, x, r, si;
  Eigen::LLT<MatR> llt_s;
};

MatR sym(const MatR& a) { return 0.5 * (a + a.transpose()); }

MatR realify(const MatC& a) {
  const Eigen::Index d = a.rows();
  MatR r(2 * d, 2 * d);
  r.topLeftCorner(d, d) = a.real();
  r.bottomRightCorner(d, d) = a.real();
  r.topRightCorner(d, d) = -a.imag();
  r.bottomLeftCorner(d, d) = a.imag();
  return sym(r);
}

bool exactly_real(const MatExpr& e) {
  if ((e.f0.imag().array() != 0.0).any()) return false;
  for (const auto& [v, m] : e.coef)
    if ((m.imag().array() != 0.0).any()) return false;
  return true;
}

Eigen::Map<const VecR> vec(const MatR& m) { return {m.data(), m.size()}; }

// Largest alpha in (0, 1] with P + alpha * D >= 0, backed off by `frac`.
double max_step(const MatR& p, const MatR& d, double frac) {
  if (p.rows() == 1) {
    const double dv = d(0, 0);
    if (dv >= 0.0) return 1.0;
    return std::min(1.0, -frac * p(0, 0) / dv);
  }
  Eigen::LLT<MatR> llt(p);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatR l = llt.matrixL();
  MatR w = l.triangularView<Eigen::Lower>().solve(d);
  w = l.triangularView<Eigen::Lower>().solve(MatR(w.transpose()));
  Eigen::SelfAdjointEigenSolver<MatR> es(sym(w), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -frac / lmin);
}

struct KktSolver {
  Eigen::LLT<MatR> llt_m;
  MatR a_eq;  // p x m
  MatR w;     // m x p = M^{-1} A_eq^T
  Eigen::LLT<MatR> llt_e;

  bool factor(MatR m, const MatR& a) {
    a_eq = a;
    double reg = 0.0;
    const double base = m.diagonal().cwiseAbs().maxCoeff() + 1.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      llt_m.compute(m);
      if (llt_m.info() == Eigen::Success) break;
      reg = (reg == 0.0) ? 1e-13 * base : reg * 100.0;
      m.diagonal().array() += reg;
    }
    if (llt_m.info() != Eigen::Success) return false;
    if (a_eq.rows() > 0) {
      w = llt_m.solve(a_eq.transpose());
      MatR e = sym(a_eq * w);
      double ereg = 0.0;
      const double ebase = e.diagonal().cwiseAbs().maxCoeff() + 1.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        llt_e.compute(e);
        if (llt_e.info() == Eigen::Success) break;
        ereg = (ereg == 0.0) ? 1e-13 * ebase : ereg * 100.0;
        e.diagonal().array() += ereg;
      }
      if (llt_e.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Solves [M, -A^T; A, 0] [dy; dl] = [rhs; r_eq].
  void solve(const VecR& rhs, const VecR& r_eq, VecR& dy, VecR& dl) const {
    if (a_eq.rows() == 0) {
      dy = llt_m.solve(rhs);
      dl.resize(0);
      return;
    }
    const VecR m_rhs = llt_m.solve(rhs);
    dl = llt_e.solve(r_eq - a_eq * m_rhs);
    dy = m_rhs + w * dl;
  }
};

}  // namespace

Solution solve_once(const Program& p, const std::vector<LinExpr>& extra_rows,
                    const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = p.num_scalars();
  Solution sol;
  sol.y = VecR::Zero(m);

  // ----- presolve: substitute variables fixed by equality rows --------------
  // A single-variable equality pins its variable; substituting such variables
  // as constants (including chains exposed by earlier substitutions) removes
  // the rows from the KKT system entirely, which is worth doing: pinned
  // variables otherwise inflate the bordered system and its conditioning.
  std::vector<char> is_fixed(static_cast<std::size_t>(m), 0);
  std::vector<double> fixed_val(static_cast<std::size_t>(m), 0.0);
  {
    struct PendingEq {
      LinExpr e;
      double rhs;
      bool done = false;
    };
    std::vector<PendingEq> pend;
    for (const auto& lc : p.linear_constraints())
      if (lc.lo == lc.hi) {
        LinExpr e = lc.expr;
        e.compress();
        pend.push_back({std::move(e), lc.lo});
      }
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& pe : pend) {
        if (pe.done) continue;
        double c0 = pe.e.c0;
        const LinTerm* only = nullptr;
        int nfree = 0;
        for (const auto& t : pe.e.terms) {
          if (is_fixed[static_cast<std::size_t>(t.var)])
            c0 += t.coef * fixed_val[static_cast<std::size_t>(t.var)];
          else if (t.coef != 0.0) {
            ++nfree;
            only = &t;
          }
        }
        if (nfree > 1) continue;
        pe.done = true;
        if (nfree == 1) {
          is_fixed[static_cast<std::size_t>(only->var)] = 1;
          fixed_val[static_cast<std::size_t>(only->var)] = (pe.rhs - c0) / only->coef;
          changed = true;
        } else if (std::abs(c0 - pe.rhs) > 1e-9 * (1.0 + std::abs(pe.rhs))) {
          sol.status = SolveStatus::infeasible;
          sol.objective = inf;
          return sol;
        }
      }
    }
  }
  std::vector<int> remap(static_cast<std::size_t>(m), -1);
  std::vector<int> free_idx;
  for (int i = 0; i < m; ++i)
    if (!is_fixed[static_cast<std::size_t>(i)]) {
      remap[static_cast<std::size_t>(i)] = static_cast<int>(free_idx.size());
      free_idx.push_back(i);
    }
  const int mf = static_cast<int>(free_idx.size());
  auto expand_y = [&](const VecR& yf) {
    VecR full(m);
    for (int i = 0; i < m; ++i)
      full[i] = is_fixed[static_cast<std::size_t>(i)]
                    ? fixed_val[static_cast<std::size_t>(i)]
                    : yf[remap[static_cast<std::size_t>(i)]];
    return full;
  };

  // ----- assemble real symmetric blocks and equality rows -------------------
  std::vector<Block> blocks;
  std::vector<VecR> eq_rows;
  std::vector<double> eq_rhs;
  bool assembly_infeasible = false;

  auto add_row_block = [&](const LinExpr& e, double shift, double sign) {
    // sign * (value of e) + shift >= 0 as a 1x1 block
    double c0 = e.c0;
    std::vector<std::pair<int, double>> terms;
    for (const auto& t : e.terms) {
      if (is_fixed[static_cast<std::size_t>(t.var)])
        c0 += t.coef * fixed_val[static_cast<std::size_t>(t.var)];
      else
        terms.emplace_back(remap[static_cast<std::size_t>(t.var)], t.coef);
    }
    const double f0 = sign * c0 + shift;
    if (terms.empty()) {
      if (f0 < -1e-9 * (1.0 + std::abs(shift))) assembly_infeasible = true;
      return;
    }
    Block b;
    b.d = 1;
    b.f0 = MatR::Constant(1, 1, f0);
    b.basis_t.resize(1, static_cast<Eigen::Index>(terms.size()));
    Eigen::Index k = 0;
    for (const auto& [v, coef] : terms) {
      b.vars.push_back(v);
      b.basis_t(0, k++) = sign * coef;
    }
    blocks.push_back(std::move(b));
  };

  for (int i = 0; i < m; ++i) {
    if (!p.scalar_nonneg(i)) continue;
    if (is_fixed[static_cast<std::size_t>(i)]) {
      if (fixed_val[static_cast<std::size_t>(i)] <
          -1e-9 * (1.0 + std::abs(fixed_val[static_cast<std::size_t>(i)])))
        assembly_infeasible = true;
      continue;
    }
    add_row_block(LinExpr::variable(i), 0.0, 1.0);
  }

  for (const auto& lc : p.linear_constraints()) {
    if (lc.lo == lc.hi) {
      double rhs = lc.lo - lc.expr.c0;
      VecR row = VecR::Zero(mf);
      bool any_free = false;
      for (const auto& t : lc.expr.terms) {
        if (is_fixed[static_cast<std::size_t>(t.var)])
          rhs -= t.coef * fixed_val[static_cast<std::size_t>(t.var)];
        else {
          row[remap[static_cast<std::size_t>(t.var)]] += t.coef;
          any_free = true;
        }
      }
      // rows with no free variable left were checked during presolve
      if (any_free) {
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(rhs);
      }
      continue;
    }
    if (lc.lo != -inf) add_row_block(lc.expr, -lc.lo, 1.0);
    if (lc.hi != inf) add_row_block(lc.expr, lc.hi, -1.0);
  }
  for (const auto& row : extra_rows) add_row_block(row, 0.0, 1.0);

  for (const auto& pc : p.psd_constraints()) {
    const MatExpr& e = pc.expr;
    Block b;
    const bool real = exactly_real(e);
    b.d = real ? e.dim : 2 * e.dim;
    MatC f0c = e.f0;
    std::vector<std::pair<int, const MatC*>> keep;
    for (const auto& [v, mat] : e.coef) {
      if (is_fixed[static_cast<std::size_t>(v)])
        f0c += fixed_val[static_cast<std::size_t>(v)] * mat;
      else
        keep.emplace_back(remap[static_cast<std::size_t>(v)], &mat);
    }
    b.f0 = real ? MatR(sym(f0c.real())) : realify(f0c);
    b.basis_t.resize(static_cast<Eigen::Index>(b.d) * b.d,
                     static_cast<Eigen::Index>(keep.size()));
    Eigen::Index k = 0;
    for (const auto& [v, mat] : keep) {
      b.vars.push_back(v);
      const MatR rm = real ? MatR(sym(mat->real())) : realify(*mat);
      b.basis_t.col(k++) = vec(rm);
    }
    blocks.push_back(std::move(b));
  }

  if (assembly_infeasible) {
    sol.status = SolveStatus::infeasible;
    sol.objective = inf;
    sol.y = expand_y(VecR::Zero(mf));
    return sol;
  }

  const int p_eq = static_cast<int>(eq_rows.size());
  MatR a_eq(p_eq, mf);
  VecR eq_rhs_v(p_eq);
  for (int r = 0; r < p_eq; ++r) {
    a_eq.row(r) = eq_rows[static_cast<std::size_t>(r)].transpose();
    eq_rhs_v[r] = eq_rhs[static_cast<std::size_t>(r)];
  }

  VecR c = VecR::Zero(mf);
  for (const auto& t : p.objective().terms)
    if (!is_fixed[static_cast<std::size_t>(t.var)])
      c[remap[static_cast<std::size_t>(t.var)]] += t.coef;

  if (mf == 0) {
    // everything is pinned: feasibility of the remaining constant blocks is
    // all that is left to check
    sol.status = SolveStatus::optimal;
    for (const auto& b : blocks) {
      Eigen::SelfAdjointEigenSolver<MatR> es(sym(b.f0), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-9) sol.status = SolveStatus::infeasible;
    }
    sol.y = expand_y(VecR::Zero(0));
    sol.objective = sol.status == SolveStatus::optimal
                        ? p.value_of(p.objective(), sol.y)
                        : inf;
    return sol;
  }

  // ----- Ruiz equilibration -------------------------------------------------
  VecR var_scale = VecR::Ones(mf);
  for (int round = 0; round < 3; ++round) {
    for (auto& b : blocks) {
      double mx = 0.0;
      if (b.basis_t.size() > 0) mx = b.basis_t.cwiseAbs().maxCoeff();
      if (mx == 0.0) mx = std::max(1.0, b.f0.cwiseAbs().maxCoeff());
      const double s = 1.0 / std::sqrt(mx);
      b.basis_t *= s;
      b.f0 *= s;
    }
    for (int r = 0; r < p_eq; ++r) {
      const double mx = a_eq.row(r).cwiseAbs().maxCoeff();
      if (mx > 0.0) {
        const double s = 1.0 / std::sqrt(mx);
        a_eq.row(r) *= s;
        eq_rhs_v[r] *= s;
      }
    }
    VecR col_max = VecR::Zero(mf);
    for (const auto& b : blocks)
      for (std::size_t k = 0; k < b.vars.size(); ++k)
        col_max[b.vars[k]] =
            std::max(col_max[b.vars[k]],
                     b.basis_t.col(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff());
    for (int r = 0; r < p_eq; ++r)
      col_max = col_max.cwiseMax(a_eq.row(r).transpose().cwiseAbs());
    for (int i = 0; i < mf; ++i) {
      if (col_max[i] == 0.0) continue;
      const double t = 1.0 / std::sqrt(col_max[i]);
      var_scale[i] *= t;
    }
    for (auto& b : blocks)
      for (std::size_t k = 0; k < b.vars.size(); ++k) {
        const int i = b.vars[k];
        if (col_max[i] > 0.0)
          b.basis_t.col(static_cast<Eigen::Index>(k)) /= std::sqrt(col_max[i]);
      }
    for (int i = 0; i < mf; ++i)
      if (p_eq > 0 && col_max[i] > 0.0) a_eq.col(i) /= std::sqrt(col_max[i]);
  }
  VecR c_s = c.cwiseProduct(var_scale);
  const double obj_scale = std::max(1e-12, c_s.cwiseAbs().maxCoeff());
  c_s /= obj_scale;

  // ----- degenerate case: no cone blocks ------------------------------------
  int nu = 0;
  for (const auto& b : blocks) nu += b.d;
  if (nu == 0) {
    VecR y_s = VecR::Zero(mf);
    if (p_eq > 0) {
      y_s = a_eq.colPivHouseholderQr().solve(eq_rhs_v);
      const MatR at = a_eq.transpose();
      VecR proj = c_s - at * MatR(a_eq * at).ldlt().solve(a_eq * c_s);
      sol.status = proj.cwiseAbs().maxCoeff() < 1e-10 ? SolveStatus::optimal
                                                      : SolveStatus::unbounded;
    } else {
      sol.status = c_s.cwiseAbs().maxCoeff() == 0.0 ? SolveStatus::optimal
                                                    : SolveStatus::unbounded;
    }
    sol.y = expand_y(y_s.cwiseProduct(var_scale));
    sol.objective = p.value_of(p.objective(), sol.y);
    return sol;
  }

  // ----- interior-point iterations ------------------------------------------
  const double init_scale = 10.0;
  VecR y = VecR::Zero(mf);
  VecR lambda = VecR::Zero(p_eq);
  for (auto& b : blocks) {
    b.s = init_scale * MatR::Identity(b.d, b.d);
    b.x = init_scale * MatR::Identity(b.d, b.d);
  }

  MatR big_m(mf, mf);
  VecR asinv(mf), axrs(mf), ax(mf), rhs(mf), dy(mf), dy_a(mf);
  VecR dl(p_eq), dl_a(p_eq);
  std::vector<MatR> ds_a(blocks.size()), dx_a(blocks.size());
  std::vector<MatR> ds(blocks.size()), dx(blocks.size());
  KktSolver kkt;
  bool converged = false;
  VecR best_y = y;
  double best_merit = inf;

  auto gather = [&](const VecR& full, const Block& b) {
    VecR sub(static_cast<Eigen::Index>(b.vars.size()));
    for (std::size_t k = 0; k < b.vars.size(); ++k)
      sub[static_cast<Eigen::Index>(k)] = full[b.vars[k]];
    return sub;
  };
  auto unvec = [](const VecR& v, int d) {
    return MatR(Eigen::Map<const MatR>(v.data(), d, d));
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // residuals
    double mu = 0.0;
    double lmi_res = 0.0;
    double pobj = 0.0;
    for (auto& b : blocks) {
      MatR fy = b.f0;
      if (!b.vars.empty()) fy += unvec(b.basis_t * gather(y, b), b.d);
      b.r = sym(fy - b.s);
      mu += b.x.cwiseProduct(b.s).sum();
      lmi_res = std::max(lmi_res, b.r.norm() / (1.0 + b.f0.norm()));
      pobj -= b.f0.cwiseProduct(b.x).sum();
    }
    mu /= nu;
    const VecR r_eq = p_eq > 0 ? VecR(eq_rhs_v - a_eq * y) : VecR();
    if (p_eq > 0) pobj += eq_rhs_v.dot(lambda);

    ax.setZero();
    for (const auto& b : blocks) {
      if (b.vars.empty()) continue;
      const VecR v = b.basis_t.transpose() * vec(b.x);
      for (std::size_t k = 0; k < b.vars.size(); ++k)
        ax[b.vars[k]] += v[static_cast<Eigen::Index>(k)];
    }
    VecR r_d = c_s - ax;
    if (p_eq > 0) r_d -= a_eq.transpose() * lambda;

    const double dobj = c_s.dot(y);
    const double gap = std::abs(dobj - pobj) / (1.0 + std::abs(dobj) + std::abs(pobj));
    const double eq_res =
        p_eq > 0 ? r_eq.cwiseAbs().maxCoeff() / (1.0 + eq_rhs_v.cwiseAbs().maxCoeff())
                 : 0.0;
    const double dual_res = r_d.cwiseAbs().maxCoeff() / (1.0 + c_s.cwiseAbs().maxCoeff());

    if (opts.verbose)
      std::fprintf(stderr,
                   "  it %3d  mu %9.2e  lmi %9.2e  eq %9.2e  dual %9.2e  gap %9.2e\n",
                   iter, mu, lmi_res, eq_res, dual_res, gap);

    const double merit = std::max({lmi_res, eq_res, dual_res, gap});
    if (std::isfinite(merit) && merit < best_merit) {
      best_merit = merit;
      best_y = y;
    }

    if (lmi_res <= opts.tol && eq_res <= opts.tol && dual_res <= opts.tol &&
        gap <= opts.tol) {
      converged = true;
      sol.iterations = iter;
      break;
    }

    // Farkas-style certificate of an empty feasible set: scaled X (with
    // lambda) nearly annihilates every coefficient while <F0, X> - b^T lambda
    // stays negative.
    if (iter >= 5) {
      double xnorm = lambda.cwiseAbs().sum() + 1e-300;
      for (const auto& b : blocks) xnorm += b.x.norm();
      const double cert_val = -pobj;
      VecR cert_res = ax;
      if (p_eq > 0) cert_res += a_eq.transpose() * lambda;
      if (cert_val / xnorm < -1e-9 && cert_res.cwiseAbs().maxCoeff() / xnorm < 1e-9) {
        sol.status = SolveStatus::infeasible;
        sol.iterations = iter;
        sol.objective = inf;
        return sol;
      }
    }
    if (dobj < -1e11 && lmi_res <= 1e-4) {
      sol.status = SolveStatus::unbounded;
      sol.iterations = iter;
      sol.objective = -inf;
      sol.y = expand_y(y.cwiseProduct(var_scale));
      return sol;
    }
    if (!std::isfinite(mu) || mu > 1e200) break;

    // factor S blocks and assemble the Schur complement
    bool factor_fail = false;
    big_m.setZero();
    asinv.setZero();
    axrs.setZero();
    for (auto& b : blocks) {
      b.llt_s.compute(b.s);
      if (b.llt_s.info() != Eigen::Success) {
        factor_fail = true;
        break;
      }
      b.si = sym(b.llt_s.solve(MatR::Identity(b.d, b.d)));
      const int ni = static_cast<int>(b.vars.size());
      if (ni == 0) continue;
      MatR vmat(static_cast<Eigen::Index>(b.d) * b.d, ni);
      for (int k = 0; k < ni; ++k) {
        const MatR fk = unvec(b.basis_t.col(k), b.d);
        vmat.col(k) = vec(MatR(sym(b.x * fk * b.si)));
      }
      const MatR mb = b.basis_t.transpose() * vmat;
      for (int i = 0; i < ni; ++i)
        for (int k = 0; k < ni; ++k)
          big_m(b.vars[static_cast<std::size_t>(i)],
                b.vars[static_cast<std::size_t>(k)]) += mb(i, k);
      const VecR v1 = b.basis_t.transpose() * vec(b.si);
      const VecR v2 = b.basis_t.transpose() * vec(MatR(sym(b.x * b.r * b.si)));
      for (int k = 0; k < ni; ++k) {
        asinv[b.vars[static_cast<std::size_t>(k)]] += v1[k];
        axrs[b.vars[static_cast<std::size_t>(k)]] += v2[k];
      }
    }
    if (factor_fail) break;
    big_m = sym(big_m);
    if (!kkt.factor(big_m, a_eq)) break;

    // predictor (sigma = 0)
    rhs = -axrs - c_s;
    if (p_eq > 0) rhs += a_eq.transpose() * lambda;
    kkt.solve(rhs, r_eq, dy_a, dl_a);

    double ap = 1.0, ad = 1.0;
    for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
      auto& b = blocks[jb];
      MatR fdy = MatR::Zero(b.d, b.d);
      if (!b.vars.empty()) fdy = unvec(b.basis_t * gather(dy_a, b), b.d);
      ds_a[jb] = sym(fdy) + b.r;
      dx_a[jb] = sym(-b.x - b.x * ds_a[jb] * b.si);
      ap = std::min(ap, max_step(b.x, dx_a[jb], opts.step_fraction));
      ad = std::min(ad, max_step(b.s, ds_a[jb], opts.step_fraction));
    }
    double mu_aff = 0.0;
    for (std::size_t jb = 0; jb < blocks.size(); ++jb)
      mu_aff += (blocks[jb].x + ap * dx_a[jb])
                    .cwiseProduct(blocks[jb].s + ad * ds_a[jb])
                    .sum();
    mu_aff /= nu;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // Keep complementarity from collapsing below the residual level: the
    // X-update loses relative accuracy (and the Schur system conditioning
    // degrades) once mu is far smaller than the remaining infeasibility.
    const double res_rel = std::max({lmi_res, eq_res, dual_res});
    if (res_rel > 10.0 * opts.tol && res_rel > 0.5 * mu) sigma = std::max(sigma, 0.9);
    if (opts.verbose)
      std::fprintf(stderr,
                   "      sigma %8.2e  ap %6.3f  ad %6.3f  pobj %13.6e  dobj %13.6e\n",
                   sigma, ap, ad, pobj, dobj);

    // corrector
    rhs = sigma * mu * asinv - axrs - c_s;
    if (p_eq > 0) rhs += a_eq.transpose() * lambda;
    for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
      const auto& b = blocks[jb];
      if (b.vars.empty()) continue;
      const VecR v = b.basis_t.transpose() * vec(MatR(sym(dx_a[jb] * ds_a[jb] * b.si)));
      for (std::size_t k = 0; k < b.vars.size(); ++k)
        rhs[b.vars[k]] -= v[static_cast<Eigen::Index>(k)];
    }
    kkt.solve(rhs, r_eq, dy, dl);

    ap = 1.0;
    ad = 1.0;
    for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
      auto& b = blocks[jb];
      MatR fdy = MatR::Zero(b.d, b.d);
      if (!b.vars.empty()) fdy = unvec(b.basis_t * gather(dy, b), b.d);
      ds[jb] = sym(fdy) + b.r;
      dx[jb] = sym(sigma * mu * b.si - b.x - b.x * ds[jb] * b.si -
                   dx_a[jb] * ds_a[jb] * b.si);
      ap = std::min(ap, max_step(b.x, dx[jb], opts.step_fraction));
      ad = std::min(ad, max_step(b.s, ds[jb], opts.step_fraction));
    }

    // apply, shrinking if a factorization objects
    for (int attempt = 0;; ++attempt) {
      bool ok = true;
      for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
        if (Eigen::LLT<MatR>(MatR(blocks[jb].x + ap * dx[jb])).info() !=
                Eigen::Success ||
            Eigen::LLT<MatR>(MatR(blocks[jb].s + ad * ds[jb])).info() !=
                Eigen::Success) {
          ok = false;
          break;
        }
      }
      if (ok) break;
      if (attempt >= 8) {
        ap = 0.0;
        ad = 0.0;
        break;
      }
      ap *= 0.7;
      ad *= 0.7;
    }
    if (ap == 0.0 && ad == 0.0) break;

    for (std::size_t jb = 0; jb < blocks.size(); ++jb) {
      blocks[jb].x = sym(blocks[jb].x + ap * dx[jb]);
      blocks[jb].s = sym(blocks[jb].s + ad * ds[jb]);
    }
    y += ad * dy;
    if (p_eq > 0) lambda += ap * dl;  // the multiplier pairs with X in r_d
    sol.iterations = iter + 1;
  }

  sol.y = expand_y((converged ? y : best_y).cwiseProduct(var_scale));
  sol.objective = p.value_of(p.objective(), sol.y);
  sol.status = converged ? SolveStatus::optimal : SolveStatus::numerical_failure;

  // report true violations at the returned point
  double psdv = 0.0;
  for (const auto& pc : p.psd_constraints()) {
    MatC v = pc.expr.f0;
    for (const auto& [vi, mat] : pc.expr.coef) v += sol.y[vi] * mat;
    psdv = std::max(psdv, std::max(0.0, -min_eigenvalue(v)));
  }
  double linv = 0.0;
  auto lin_viol = [&](const LinExpr& e, double lo, double hi) {
    const double v = p.value_of(e, sol.y);
    if (lo != -inf) linv = std::max(linv, lo - v);
    if (hi != inf) linv = std::max(linv, v - hi);
  };
  for (const auto& lc : p.linear_constraints()) lin_viol(lc.expr, lc.lo, lc.hi);
  for (const auto& row : extra_rows) lin_viol(row, 0.0, inf);
  for (int i = 0; i < m; ++i)
    if (p.scalar_nonneg(i)) linv = std::max(linv, -sol.y[i]);
  sol.max_psd_violation = psdv;
  sol.max_linear_violation = std::max(0.0, linv);
  sol.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return sol;
}

}  // namespace wpcn::conic
