#include "wpcn/algos.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

#include "wpcn/model.hpp"

namespace wpcn::algos {
namespace {

using conic::inf;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Largest received RF power any admissible charger can deliver: the cap
// bounds radiated-plus-distortion power by p_max_ps, and every watt of it is
// received through at most the top eigenvalue of L L^H.
double omega_ceiling(const SystemConfig& cfg, const ChannelSet& ch) {
  Eigen::SelfAdjointEigenSolver<MatC> es(ch.l_mat * ch.l_mat.adjoint());
  return std::max(0.0, es.eigenvalues().maxCoeff()) * cfg.p_max_ps;
}

// Equality rows forcing the charging covariance to a scalar multiple of the
// identity. The scalar stays free, so the pinned problem keeps a strictly
// feasible interior point.
void pin_isotropic(conic::Program& p, const conic::MatVar& v) {
  for (int m = 1; m < v.dim; ++m) p.add_linear(v.diag(0) - v.diag(m), 0.0, 0.0);
  for (int j = 1; j < v.dim; ++j) {
    for (int i = 0; i < j; ++i) {
      p.add_linear(v.entry_re(i, j), 0.0, 0.0);
      p.add_linear(v.entry_im(i, j), 0.0, 0.0);
    }
  }
}

// One design solve at a fixed operating point; +inf objective encodes "no
// feasible design here". Optionally hands back the solution and the
// assembled problem so the caller can extract an allocation.
struct Evaluator {
  const SystemConfig& cfg;
  const ChannelSet& ch;
  bool isotropic = false;
  std::atomic<int>* solves = nullptr;

  double operator()(double t1, double t2, double omega, conic::Solution* keep = nullptr,
                    alloc::SdpProblem* keep_prob = nullptr) const {
    alloc::SdpProblem sdp = alloc::build_sdp(t1, t2, omega, cfg, ch);
    if (isotropic) pin_isotropic(sdp.prog, sdp.v);
    conic::SolverOptions opt;
    opt.tol = cfg.run.solver_tol;
    conic::Solution sol = sdp.prog.solve(opt);
    if (solves) solves->fetch_add(1, std::memory_order_relaxed);
    if (sol.status != SolveStatus::optimal) return inf;
    const double objective = sol.objective;
    if (keep) *keep = std::move(sol);
    if (keep_prob) *keep_prob = std::move(sdp);
    return objective;
  }
};

// Tolerant slope sign between consecutive samples; +inf values act as a
// very expensive plateau.
int trend(double a, double b) {
  const bool ia = std::isinf(a), ib = std::isinf(b);
  if (ia && ib) return 0;
  if (ia) return -1;
  if (ib) return 1;
  const double tol = 1e-9 * (1.0 + std::min(std::abs(a), std::abs(b)));
  if (b > a + tol) return 1;
  if (b < a - tol) return -1;
  return 0;
}

// A valley-shaped sample sequence never falls again once it has risen.
bool valley_shaped(const std::map<double, double>& pts) {
  bool rising = false;
  bool have_prev = false;
  double prev = 0.0;
  for (const auto& [w, f] : pts) {
    (void)w;
    if (have_prev) {
      const int t = trend(prev, f);
      if (t > 0) rising = true;
      if (t < 0 && rising) return false;
    }
    prev = f;
    have_prev = true;
  }
  return true;
}

struct LineResult {
  double omega = 0.0;
  double objective = inf;
  bool grid_fallback = false;
  int evals = 0;
};

// Golden-section search for the received-power target on [0, omega_hi],
// seeded with both endpoints and any caller hints. The samples are audited
// for valley shape afterwards; a failed audit (or an all-infeasible search)
// reruns on a uniform grid and keeps the best point seen anywhere. Ties in
// the final scan resolve to the smallest omega.
LineResult line_search_omega(const Evaluator& ev, double t1, double t2, double omega_hi,
                             int grid_pts, const std::vector<double>& hints = {}) {
  std::map<double, double> seen;
  auto probe = [&](double w) {
    w = std::clamp(w, 0.0, std::max(0.0, omega_hi));
    auto it = seen.find(w);
    if (it != seen.end()) return it->second;
    const double f = ev(t1, t2, w);
    seen.emplace(w, f);
    return f;
  };
  auto best_seen = [&](LineResult& r) {
    for (const auto& [w, f] : seen) {
      if (f < r.objective) {
        r.objective = f;
        r.omega = w;
      }
    }
  };

  LineResult r;
  probe(0.0);
  if (omega_hi > 0.0) {
    probe(omega_hi);
    for (double h : hints) {
      if (h > 0.0 && h < omega_hi) probe(h);
    }
    const double gold = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = omega_hi;
    double x1 = b - gold * (b - a);
    double x2 = a + gold * (b - a);
    double f1 = probe(x1);
    double f2 = probe(x2);
    const double tol = 1e-7 * omega_hi;
    for (int it = 0; it < 64 && b - a > tol; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gold * (b - a);
        f1 = probe(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gold * (b - a);
        f2 = probe(x2);
      }
    }
  }
  best_seen(r);
  if (omega_hi > 0.0 && (std::isinf(r.objective) || !valley_shaped(seen))) {
    r.grid_fallback = true;
    const int n = std::max(2, grid_pts);
    for (int i = 0; i < n; ++i) probe(omega_hi * i / (n - 1.0));
    best_seen(r);
  }
  r.evals = static_cast<int>(seen.size());
  return r;
}

// Cheap certificates that no design can exist at this duration pair: even an
// interference-free full-power beam cannot carry the required rate, or the
// distortion-free minimum radiated power already exceeds the AP cap or what
// a maximal harvest could fund.
bool pair_hopeless(const SystemConfig& cfg, const ChannelSet& ch, double t1, double t2,
                   double omega_hi) {
  double radiated_min = 0.0;
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    const double h2 = ch.h[k].squaredNorm();
    if (!(h2 > 0.0)) return true;
    const double sinr_cap = cfg.p_max_ap * h2 / cfg.sigma_n2;
    const double need = cfg.qos.r_req[k] / t2;
    if (std::log2(1.0 + sinr_cap) < need - 1e-12) return true;
    radiated_min += (std::exp2(need) - 1.0) * cfg.sigma_n2 / h2;
  }
  if (radiated_min > cfg.p_max_ap * (1.0 + 1e-9)) return true;
  const double spend = cfg.rho_ap * radiated_min + cfg.p_c_ap;
  const double funds = t1 * model::harvested_power(omega_hi, cfg.eh) + cfg.e_res;
  return t2 * spend > funds * (1.0 + 1e-9) + 1e-15;
}

// Materializes the winning operating point into a full scheme result:
// re-solve, extract, recover beamformers under the design model, audit under
// the evaluation model.
SchemeResult finish_point(const Evaluator& ev, const SystemConfig& design,
                          const SystemConfig& eval_cfg, const ChannelSet& ch,
                          std::uint64_t seed, double t1, double t2, double omega,
                          SolveReport rep) {
  conic::Solution sol;
  alloc::SdpProblem sdp;
  const double obj = ev(t1, t2, omega, &sol, &sdp);
  if (std::isinf(obj)) {
    rep.status = SolveStatus::numerical_failure;
    return {std::move(rep), zero_allocation(eval_cfg)};
  }
  Allocation a = alloc::extract_allocation(sdp, sol, design, ch);
  rep.rank = alloc::recover_beamformers(a, design, ch, seed);
  rep.audit = alloc::audit_solution(a, eval_cfg, ch, seed + 1);
  rep.status = SolveStatus::optimal;
  rep.objective = model::power_accounting(a, eval_cfg).objective;
  rep.tau1 = t1;
  rep.tau2 = t2;
  rep.omega_bar = omega;
  return {std::move(rep), std::move(a)};
}

// Exhaustive duration grid shared by the grid-based schemes. Pairs are
// screened, then line-searched in parallel; the winner is chosen by a
// canonical (tau1-major, tau2-minor) scan so the outcome does not depend on
// scheduling.
SchemeResult grid_scheme(const SystemConfig& design, const SystemConfig& eval_cfg,
                         bool isotropic, const ChannelSet& ch, std::uint64_t seed,
                         int grid_n, int omega_grid_n) {
  const auto t_start = std::chrono::steady_clock::now();
  if (grid_n < 2) throw std::invalid_argument("duration grid needs at least 2 intervals");
  if (omega_grid_n < 2) throw std::invalid_argument("received-power grid needs at least 2 points");

  std::atomic<int> solves{0};
  const Evaluator ev{design, ch, isotropic, &solves};
  const double omega_hi = omega_ceiling(design, ch);

  const double lo = tau_floor;
  const double hi = design.t_max - tau_floor;
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i <= grid_n; ++i) {
    const double t1 = lo + (hi - lo) * i / grid_n;
    for (int j = 0; j <= grid_n; ++j) {
      const double t2 = lo + (hi - lo) * j / grid_n;
      if (t1 + t2 <= design.t_max + 1e-12) pairs.emplace_back(t1, t2);
    }
  }

  std::vector<LineResult> results(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
      if (idx >= pairs.size()) return;
      const auto [t1, t2] = pairs[idx];
      if (pair_hopeless(design, ch, t1, t2, omega_hi)) continue;
      results[idx] = line_search_omega(ev, t1, t2, omega_hi, omega_grid_n);
    }
  };
  const int n_threads =
      std::min<int>(resolve_threads(design.run.threads), static_cast<int>(pairs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SolveReport rep;
  std::size_t win = pairs.size();
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    rep.omega_fallbacks += results[idx].grid_fallback ? 1 : 0;
    if (results[idx].objective < (win < pairs.size() ? results[win].objective : inf)) win = idx;
  }
  rep.sdp_solves = solves.load();
  auto elapsed = [&]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };
  if (win == pairs.size()) {
    rep.status = SolveStatus::infeasible;
    rep.solve_ms = elapsed();
    return {std::move(rep), zero_allocation(eval_cfg)};
  }
  SchemeResult out = finish_point(ev, design, eval_cfg, ch, seed, pairs[win].first,
                                  pairs[win].second, results[win].omega, std::move(rep));
  out.report.sdp_solves = solves.load();
  out.report.solve_ms = elapsed();
  return out;
}

SystemConfig without_distortion(SystemConfig cfg) {
  cfg.hwi.k1 = 0.0;
  cfg.hwi.k3 = 0.0;
  return cfg;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::optimal: return "optimal";
    case Scheme::ao: return "ao";
    case Scheme::isotropic: return "isotropic";
    case Scheme::ignore_hwi: return "ignore-hwi";
    case Scheme::perfect_hw: return "perfect-hw";
  }
  throw std::invalid_argument("unknown scheme id");
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "optimal") return Scheme::optimal;
  if (name == "ao") return Scheme::ao;
  if (name == "isotropic") return Scheme::isotropic;
  if (name == "ignore-hwi" || name == "ignore_hwi") return Scheme::ignore_hwi;
  if (name == "perfect-hw" || name == "perfect_hw") return Scheme::perfect_hw;
  throw std::invalid_argument("unknown scheme name: " + name);
}

TauStep tau_lp(const Allocation& fixed, const SystemConfig& cfg, const ChannelSet& ch) {
  TauStep out;
  if (!(fixed.tau2 > 0.0) || fixed.w_cov.empty()) return out;
  const model::PowerBreakdown pb = model::power_accounting(fixed, cfg);

  // Smallest tau2 the rate rows allow at the frozen covariances, whose SINRs
  // are evaluated under the design model (distortion entering through the
  // recorded budgets, not the curves).
  double rate_bound = tau_floor;
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    const VecC& h = ch.h[k];
    const VecC& f = ch.f[k];
    const double signal = (h.adjoint() * fixed.w_cov[k] * h).value().real();
    double clutter = cfg.sigma_n2 + fixed.r_ir[static_cast<Eigen::Index>(k)];
    for (std::size_t j = 0; j < fixed.w_cov.size(); ++j) {
      if (j != k) clutter += (h.adjoint() * fixed.w_cov[j] * h).value().real();
    }
    clutter += (h.adjoint() * fixed.u_cov * h).value().real();
    for (int n = 0; n < cfg.n_ap; ++n) clutter += std::norm(h[n]) * fixed.b_ap[n];
    for (int m = 0; m < cfg.n_ps; ++m) {
      clutter += std::norm(f[m]) * fixed.b_ps2[m];
      clutter += (f.adjoint() * fixed.z_cov * f).value().real() / cfg.n_ps;
    }
    const double sinr = signal / clutter;
    if (!(sinr > 0.0) || !std::isfinite(sinr)) return out;
    rate_bound = std::max(rate_bound, cfg.qos.r_req[k] / std::log2(1.0 + sinr));
  }

  // The wiretap certificate carried by the frozen variables only covers
  // eavesdropper-rate caps down to the incumbent tau2, so tau2 may shrink but
  // never grow. With no harvest the reserve alone must fund Phase II.
  double tau2_cap = fixed.tau2;
  const double xi = model::harvested_power(std::max(0.0, fixed.rho_recv), cfg.eh);
  if (!(xi > 0.0)) tau2_cap = std::min(tau2_cap, cfg.e_res / pb.p_ap2);
  if (rate_bound > tau2_cap * (1.0 + 1e-6) || tau2_cap < tau_floor) return out;
  const double t2 = std::clamp(rate_bound, tau_floor, tau2_cap);

  // Both objective coefficients are positive, so tau1 falls to its largest
  // lower bound: the floor or the energy-causality line at fixed powers.
  double t1 = tau_floor;
  if (xi > 0.0) t1 = std::max(t1, (t2 * pb.p_ap2 - cfg.e_res) / xi);
  if (t1 + t2 > cfg.t_max + 1e-9) return out;

  out.feasible = true;
  out.tau1 = t1;
  out.tau2 = t2;
  return out;
}

SchemeResult solve_optimal(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                           int grid_n, int omega_grid_n) {
  return grid_scheme(cfg, cfg, false, ch, seed, grid_n > 0 ? grid_n : cfg.run.grid_n,
                     omega_grid_n > 0 ? omega_grid_n : cfg.run.omega_grid_n);
}

SchemeResult solve_ao(const SystemConfig& cfg, const ChannelSet& ch, std::uint64_t seed,
                      int l_max, double psi) {
  const auto t_start = std::chrono::steady_clock::now();
  if (l_max <= 0) l_max = cfg.run.ao_l_max;
  if (psi <= 0.0) psi = cfg.run.ao_psi;

  std::atomic<int> solves{0};
  const Evaluator ev{cfg, ch, false, &solves};
  const double omega_hi = omega_ceiling(cfg, ch);
  const int grid_pts = cfg.run.omega_grid_n;

  SolveReport rep;
  auto elapsed = [&]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  double t1 = 0.2 * cfg.t_max;
  double t2 = 0.8 * cfg.t_max;
  LineResult line = line_search_omega(ev, t1, t2, omega_hi, grid_pts);
  if (std::isinf(line.objective)) {
    t1 = 0.5 * cfg.t_max;
    t2 = 0.5 * cfg.t_max;
    line = line_search_omega(ev, t1, t2, omega_hi, grid_pts);
  }
  rep.omega_fallbacks += line.grid_fallback ? 1 : 0;
  if (std::isinf(line.objective)) {
    rep.sdp_solves = solves.load();
    rep.solve_ms = elapsed();
    return {std::move(rep), zero_allocation(cfg)};
  }

  conic::Solution sol;
  alloc::SdpProblem sdp;
  double incumbent_obj = ev(t1, t2, line.omega, &sol, &sdp);
  if (std::isinf(incumbent_obj)) {
    rep.status = SolveStatus::numerical_failure;
    rep.sdp_solves = solves.load();
    rep.solve_ms = elapsed();
    return {std::move(rep), zero_allocation(cfg)};
  }
  Allocation incumbent = alloc::extract_allocation(sdp, sol, cfg, ch);
  double omega_cur = line.omega;
  rep.trace.push_back(incumbent_obj);

  for (int l = 1; l <= l_max; ++l) {
    const TauStep step = tau_lp(incumbent, cfg, ch);
    if (!step.feasible) break;
    const double d1 = std::abs(step.tau1 - incumbent.tau1);
    const double d2 = std::abs(step.tau2 - incumbent.tau2);

    // Seeding the line search with the incumbent's delivered power keeps the
    // frozen covariances inside the new problem, so a worsening step can only
    // be numerical noise; the incumbent is kept and the loop stops.
    LineResult next =
        line_search_omega(ev, step.tau1, step.tau2, omega_hi, grid_pts, {incumbent.rho_recv});
    rep.ao_iterations = l;
    rep.omega_fallbacks += next.grid_fallback ? 1 : 0;
    if (std::isinf(next.objective) || next.objective > incumbent_obj + 1e-9) break;

    const double obj = ev(step.tau1, step.tau2, next.omega, &sol, &sdp);
    if (std::isinf(obj)) break;
    incumbent = alloc::extract_allocation(sdp, sol, cfg, ch);
    incumbent_obj = obj;
    omega_cur = next.omega;
    rep.trace.push_back(incumbent_obj);
    if (d1 <= psi && d2 <= psi) break;
  }

  SchemeResult out = finish_point(ev, cfg, cfg, ch, seed, incumbent.tau1, incumbent.tau2,
                                  omega_cur, std::move(rep));
  out.report.sdp_solves = solves.load();
  out.report.solve_ms = elapsed();
  return out;
}

SchemeResult baseline_isotropic(const SystemConfig& cfg, const ChannelSet& ch,
                                std::uint64_t seed) {
  SystemConfig raised = cfg;
  raised.p_max_ps = dbm_to_watt(40.0);
  raised.p_max_ap = dbm_to_watt(40.0);
  return grid_scheme(raised, raised, true, ch, seed, raised.run.grid_n,
                     raised.run.omega_grid_n);
}

HwiNeglectResult baseline_ignore_hwi(const SystemConfig& cfg, const ChannelSet& ch,
                                     std::uint64_t seed) {
  const SystemConfig blind = without_distortion(cfg);
  SchemeResult res =
      grid_scheme(blind, cfg, false, ch, seed, cfg.run.grid_n, cfg.run.omega_grid_n);
  HwiNeglectResult out;
  out.feasible_as_built = res.report.status == SolveStatus::optimal &&
                          res.report.audit.feasible(1e-6) &&
                          res.report.audit.eve_violations == 0;
  out.report = std::move(res.report);
  out.alloc = std::move(res.alloc);
  return out;
}

SchemeResult benchmark_perfect_hw(const SystemConfig& cfg, const ChannelSet& ch,
                                  std::uint64_t seed) {
  const SystemConfig ideal = without_distortion(cfg);
  return grid_scheme(ideal, ideal, false, ch, seed, cfg.run.grid_n, cfg.run.omega_grid_n);
}

SchemeResult run_scheme(Scheme s, const SystemConfig& cfg, const ChannelSet& ch,
                        std::uint64_t seed) {
  switch (s) {
    case Scheme::optimal: return solve_optimal(cfg, ch, seed);
    case Scheme::ao: return solve_ao(cfg, ch, seed);
    case Scheme::isotropic: return baseline_isotropic(cfg, ch, seed);
    case Scheme::ignore_hwi: {
      HwiNeglectResult r = baseline_ignore_hwi(cfg, ch, seed);
      return {std::move(r.report), std::move(r.alloc)};
    }
    case Scheme::perfect_hw: return benchmark_perfect_hw(cfg, ch, seed);
  }
  throw std::invalid_argument("unknown scheme id");
}

}  // namespace wpcn::algos
