#include <cmath>
#include <complex>

#include "doctest.h"
#include "wpcn/channels.hpp"
#include "wpcn/model.hpp"
#include "wpcn/types.hpp"

using namespace wpcn;

namespace {

SystemConfig desk_config() {
  SystemConfig cfg;
  cfg.validate();
  return cfg;
}

}  // namespace

TEST_CASE("unit conversions round-trip and hit known anchors") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3).epsilon(1e-12));
  // -77 dBm receiver noise floor
  CHECK(dbm_to_watt(-77.0) == doctest::Approx(1.9952623149688788e-11).epsilon(1e-12));
  CHECK(watt_to_dbm(dbm_to_watt(-13.7)) == doctest::Approx(-13.7).epsilon(1e-12));
  CHECK(dbi_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("transmit distortion: anchors, monotonicity, convexity") {
  HwiParams hwi;  // k1 = 2.258e5, k2 = 7.687
  // Frozen values computed with an independent high-precision evaluator.
  CHECK(model::tx_distortion(0.1, hwi) == doctest::Approx(0.004642200965732191).epsilon(1e-12));
  CHECK(model::tx_distortion(0.2, hwi) == doctest::Approx(0.9566245328502999).epsilon(1e-12));
  CHECK(model::tx_distortion(0.05, hwi) == doctest::Approx(2.252715570866214e-05).epsilon(1e-12));
  CHECK(model::tx_distortion(0.0, hwi) == 0.0);

  // eta(x) = x crossover near 0.158 W
  const double x_star = 0.1582644199318335;
  CHECK(model::tx_distortion(x_star, hwi) == doctest::Approx(x_star).epsilon(1e-10));

  HwiParams off = hwi;
  off.k1 = 0.0;
  CHECK(model::tx_distortion(0.3, off) == 0.0);

  CHECK_THROWS_AS(model::tx_distortion(-1e-9, hwi), std::domain_error);

  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(0.0, 1.0);
    const double y = rng.uniform(0.0, 1.0);
    const double lhs = model::tx_distortion(0.5 * (x + y), hwi);
    const double rhs = 0.5 * (model::tx_distortion(x, hwi) + model::tx_distortion(y, hwi));
    CHECK(lhs <= rhs + 1e-12);
    if (x < y) CHECK(model::tx_distortion(x, hwi) <= model::tx_distortion(y, hwi));
  }
}

TEST_CASE("receive distortion is the fixed quadratic-percentage rule") {
  CHECK(model::rx_distortion(2.0, 5.0) == doctest::Approx(2.0 * 0.0025).epsilon(1e-14));
  CHECK(model::rx_distortion(1.0, 15.0) == doctest::Approx(0.0225).epsilon(1e-14));
  CHECK(model::rx_distortion(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(model::rx_distortion(-1.0, 5.0), std::domain_error);
}

TEST_CASE("harvester: zero point, anchors, monotonicity, saturation") {
  EhParams eh;
  eh.refresh();
  CHECK(eh.omega_0 == doctest::Approx(0.4476920904256748).epsilon(1e-14));

  CHECK(model::harvested_power(0.0, eh) == 0.0);  // exact zero, not 1e-18
  CHECK(model::harvested_power(eh.b, eh) ==
        doctest::Approx(0.0022729890483577527).epsilon(1e-12));
  CHECK(model::harvested_power(1.0, eh) >= eh.m_sat * (1.0 - 1e-6));
  CHECK(model::harvested_power(1.0, eh) <= eh.m_sat);
  CHECK(model::harvested_power(1e6, eh) >= eh.m_sat * (1.0 - 1e-6));

  CHECK(model::harvested_power(10.0 * eh.b, eh) > model::harvested_power(eh.b, eh));
  CHECK(model::harvested_power(eh.b, eh) > 0.0);

  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double w = 0.03 * i / 200.0;
    const double x = model::harvested_power(w, eh);
    CHECK(x >= prev);
    prev = x;
  }
  CHECK_THROWS_AS(model::harvested_power(-1e-12, eh), std::domain_error);
}

TEST_CASE("harvester inverse is an identity on a log-spaced grid") {
  EhParams eh;
  eh.refresh();
  // 100 log-spaced points in (0, 20 b]
  const double hi = 20.0 * eh.b;
  const double lo = hi * 1e-4;
  for (int i = 0; i < 100; ++i) {
    const double w = lo * std::pow(hi / lo, i / 99.0);
    const double xi = model::harvested_power(w, eh);
    REQUIRE(xi > 0.0);
    const double w_back = model::inverse_harvested_power(xi, eh);
    CHECK(w_back == doctest::Approx(w).epsilon(1e-9));
  }
  CHECK(model::inverse_harvested_power(0.0, eh) == 0.0);
  CHECK_THROWS_AS(model::inverse_harvested_power(eh.m_sat, eh), std::domain_error);
  CHECK_THROWS_AS(model::inverse_harvested_power(-1.0, eh), std::domain_error);
}

TEST_CASE("distortion covariances: diagonal nonnegative, vanish when k1 = 0") {
  SystemConfig cfg = desk_config();
  Allocation a = zero_allocation(cfg);
  a.v_cov = 0.3 * MatC::Identity(cfg.n_ps, cfg.n_ps);
  a.z_cov = 0.05 * MatC::Identity(cfg.n_ps, cfg.n_ps);
  a.u_cov = 0.12 * MatC::Identity(cfg.n_ap, cfg.n_ap);
  a.w_cov[0] = 0.08 * MatC::Identity(cfg.n_ap, cfg.n_ap);

  auto dc = model::transmit_covariances(a, cfg.hwi);
  CHECK(dc.phi.size() == cfg.n_ps);
  CHECK(dc.psi.size() == cfg.n_ap);
  CHECK(dc.phi.minCoeff() >= 0.0);
  CHECK(dc.theta.minCoeff() >= 0.0);
  CHECK(dc.psi.minCoeff() >= 0.0);
  CHECK(dc.phi[0] == doctest::Approx(model::tx_distortion(0.3, cfg.hwi)).epsilon(1e-14));
  // AP diagonal adds the information and jamming contributions first
  CHECK(dc.psi[0] == doctest::Approx(model::tx_distortion(0.2, cfg.hwi)).epsilon(1e-12));

  HwiParams off;
  off.k1 = 0.0;
  auto dz = model::transmit_covariances(a, off);
  CHECK(dz.phi.cwiseAbs().maxCoeff() == 0.0);
  CHECK(dz.theta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(dz.psi.cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// Fully independent re-evaluation of the SINR from its definition, term by
// term, using covariance algebra instead of vector shortcuts.
double sinr_oracle(int k, const Allocation& a, const ChannelSet& ch,
                   const SystemConfig& cfg) {
  const VecC& h = ch.h[static_cast<std::size_t>(k)];
  const VecC& f = ch.f[static_cast<std::size_t>(k)];
  const MatC h_k = h * h.adjoint();
  const MatC f_k = f * f.adjoint();
  auto dc = model::transmit_covariances(a, cfg.hwi);
  MatC theta = MatC::Zero(f.size(), f.size());
  for (Eigen::Index m = 0; m < f.size(); ++m) theta(m, m) = dc.theta[m];
  MatC psi = MatC::Zero(h.size(), h.size());
  for (Eigen::Index n = 0; n < h.size(); ++n) psi(n, n) = dc.psi[n];

  const MatC w_kk = a.w_vec[static_cast<std::size_t>(k)] *
                    a.w_vec[static_cast<std::size_t>(k)].adjoint();
  double num = (h_k * w_kk).trace().real();
  double mui = 0.0;
  MatC w_sum = MatC::Zero(h.size(), h.size());
  for (std::size_t j = 0; j < a.w_vec.size(); ++j) {
    const MatC w_jj = a.w_vec[j] * a.w_vec[j].adjoint();
    w_sum += w_jj;
    if (static_cast<int>(j) != k) mui += (h_k * w_jj).trace().real();
  }
  const double recv = ((h_k * (a.u_cov + w_sum)).trace() + (f_k * a.z_cov).trace()).real();
  const double sigma_d = cfg.hwi.nu_coeff() * recv;
  const double den = mui + (f_k * theta).trace().real() + (psi * h_k).trace().real() +
                     sigma_d + cfg.sigma_n2;
  return num / den;
}

}  // namespace

TEST_CASE("SINR: ideal-hardware closed forms and the term-by-term oracle") {
  SystemConfig cfg = desk_config();
  cfg.n_irs = 1;
  cfg.qos.r_req = {4.0};
  cfg.validate();
  Topology topo;
  ChannelSet ch = generate_channels(cfg, topo, 11);

  SUBCASE("matched filter against the closed form") {
    SystemConfig ideal = cfg;
    ideal.hwi.k1 = 0.0;
    ideal.hwi.k3 = 0.0;
    Allocation a = zero_allocation(ideal);
    a.tau1 = 0.2;
    a.tau2 = 0.8;
    const VecC h = ch.h[0];
    a.w_vec = {std::sqrt(0.5) * h / h.norm()};
    a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint()};
    const double expect = 0.5 * h.squaredNorm() / ideal.sigma_n2;
    CHECK(model::ir_sinr(0, a, ch, ideal) == doctest::Approx(expect).epsilon(1e-10));
  }

  SUBCASE("zero-forcing removes multiuser interference") {
    SystemConfig two = desk_config();
    two.hwi.k1 = 0.0;
    two.hwi.k3 = 0.0;
    two.validate();
    ChannelSet c2 = generate_channels(two, topo, 12);
    Allocation a = zero_allocation(two);
    const VecC h1 = c2.h[0];
    // Project h2's beam away from h1: w2 orthogonal to h1.
    VecC w2 = c2.h[1] - (h1.dot(c2.h[1]) / h1.squaredNorm()) * h1;
    w2 *= std::sqrt(0.3) / w2.norm();
    VecC w1 = std::sqrt(0.3) * h1 / h1.norm();
    a.w_vec = {w1, w2};
    a.w_cov = {w1 * w1.adjoint(), w2 * w2.adjoint()};
    const double expect = 0.3 * h1.squaredNorm() / two.sigma_n2;
    CHECK(model::ir_sinr(0, a, c2, two) == doctest::Approx(expect).epsilon(1e-10));
  }

  SUBCASE("random instance matches the oracle with full hardware effects") {
    SystemConfig full = desk_config();
    full.hwi.k3 = 10.0;
    full.validate();
    ChannelSet c2 = generate_channels(full, topo, 13);
    Rng rng(99);
    Allocation a = zero_allocation(full);
    a.w_vec = {0.3 * VecC(rng.cnormal_matrix(full.n_ap, 1)),
               0.2 * VecC(rng.cnormal_matrix(full.n_ap, 1))};
    a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint(), a.w_vec[1] * a.w_vec[1].adjoint()};
    MatC zr = rng.cnormal_matrix(full.n_ps, full.n_ps);
    a.z_cov = 0.01 * (zr * zr.adjoint());
    MatC ur = rng.cnormal_matrix(full.n_ap, full.n_ap);
    a.u_cov = 0.02 * (ur * ur.adjoint());
    MatC vr = rng.cnormal_matrix(full.n_ps, full.n_ps);
    a.v_cov = 0.1 * (vr * vr.adjoint());
    for (int k = 0; k < 2; ++k) {
      const double got = model::ir_sinr(k, a, c2, full);
      const double want = sinr_oracle(k, a, c2, full);
      CHECK(got == doctest::Approx(want).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(model::ir_sinr(5, zero_allocation(cfg), ch, cfg), std::out_of_range);
}

TEST_CASE("eavesdropper capacity: trivial cases and the determinant-lemma oracle") {
  SystemConfig cfg = desk_config();
  cfg.n_ev = 3;
  cfg.validate();
  Topology topo;
  ChannelSet ch = generate_channels(cfg, topo, 21);
  const MatC dg = MatC::Zero(cfg.n_ap, cfg.n_ev);
  const MatC de = MatC::Zero(cfg.n_ps, cfg.n_ev);

  SUBCASE("zero beam gives zero capacity") {
    Allocation a = zero_allocation(cfg);
    a.w_vec = {VecC::Zero(cfg.n_ap), VecC::Zero(cfg.n_ap)};
    a.u_cov = 0.1 * MatC::Identity(cfg.n_ap, cfg.n_ap);
    auto c = model::eve_capacity(0, a, ch, dg, de, cfg);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("no jamming at all is insecure") {
    SystemConfig ideal = cfg;
    ideal.hwi.k1 = 0.0;
    Allocation a = zero_allocation(ideal);
    Rng rng(5);
    a.w_vec = {VecC(rng.cnormal_matrix(cfg.n_ap, 1)), VecC::Zero(cfg.n_ap)};
    a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint(), MatC::Zero(cfg.n_ap, cfg.n_ap)};
    auto c = model::eve_capacity(0, a, ch, dg, de, ideal);
    CHECK(!c.has_value());
  }

  SUBCASE("single eavesdropper antenna reduces to the scalar form") {
    SystemConfig one = desk_config();
    one.n_ev = 1;
    one.validate();
    ChannelSet c1 = generate_channels(one, topo, 22);
    Rng rng(6);
    Allocation a = zero_allocation(one);
    a.w_vec = {VecC(rng.cnormal_matrix(one.n_ap, 1)), VecC::Zero(one.n_ap)};
    a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint(), MatC::Zero(one.n_ap, one.n_ap)};
    MatC ur = rng.cnormal_matrix(one.n_ap, one.n_ap);
    a.u_cov = 1e-7 * (ur * ur.adjoint());
    auto dc = model::transmit_covariances(a, one.hwi);
    const MatC g = c1.g_hat;
    const double q = ((g.adjoint() * (a.u_cov + MatC(dc.psi.cast<cxd>().asDiagonal())) * g) +
                      (c1.e_hat.adjoint() *
                       (a.z_cov + MatC(dc.theta.cast<cxd>().asDiagonal())) * c1.e_hat))(0, 0)
                         .real();
    const double num = std::norm((g.adjoint() * a.w_vec[0])(0));
    auto c = model::eve_capacity(0, a, c1, MatC::Zero(one.n_ap, 1), MatC::Zero(one.n_ps, 1),
                                 one);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(std::log2(1.0 + num / q)).epsilon(1e-9));
  }

  SUBCASE("random instances match the rank-one shortcut") {
    Rng rng(77);
    for (int rep = 0; rep < 20; ++rep) {
      Allocation a = zero_allocation(cfg);
      // Physically scaled beams and full-rank jamming keep Q well conditioned,
      // so the ε-regularization path stays out of the comparison.
      VecC w0 = VecC(rng.cnormal_matrix(cfg.n_ap, 1));
      VecC w1 = VecC(rng.cnormal_matrix(cfg.n_ap, 1));
      a.w_vec = {0.3 * w0 / w0.norm(), 0.3 * w1 / w1.norm()};
      a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint(), a.w_vec[1] * a.w_vec[1].adjoint()};
      MatC ur = rng.cnormal_matrix(cfg.n_ap, cfg.n_ap);
      a.u_cov = 1e-3 * MatC::Identity(cfg.n_ap, cfg.n_ap) + 1e-4 * (ur * ur.adjoint());
      MatC zr = rng.cnormal_matrix(cfg.n_ps, cfg.n_ps);
      a.z_cov = 1e-3 * MatC::Identity(cfg.n_ps, cfg.n_ps) + 1e-4 * (zr * zr.adjoint());
      const MatC rdg = 1e-5 * rng.cnormal_matrix(cfg.n_ap, cfg.n_ev);
      const MatC rde = 1e-5 * rng.cnormal_matrix(cfg.n_ps, cfg.n_ev);

      const MatC g = ch.g_hat + rdg;
      const MatC e = ch.e_hat + rde;
      auto dc = model::transmit_covariances(a, cfg.hwi);
      MatC q = g.adjoint() * (a.u_cov + MatC(dc.psi.cast<cxd>().asDiagonal())) * g +
               e.adjoint() * (a.z_cov + MatC(dc.theta.cast<cxd>().asDiagonal())) * e;
      q = cxd(0.5, 0.0) * (q + q.adjoint().eval());
      const VecC s = g.adjoint() * a.w_vec[0];
      const double shortcut = std::log2(1.0 + (s.adjoint() * q.ldlt().solve(s))(0).real());

      auto c = model::eve_capacity(0, a, ch, rdg, rde, cfg);
      REQUIRE(c.has_value());
      CHECK(*c == doctest::Approx(shortcut).epsilon(1e-10));
    }
  }
}

TEST_CASE("secrecy rate clamps and reduces correctly") {
  SystemConfig cfg = desk_config();
  cfg.n_irs = 1;
  cfg.qos.r_req = {4.0};
  cfg.validate();
  Topology topo;
  ChannelSet ch = generate_channels(cfg, topo, 31);
  const MatC dg = MatC::Zero(cfg.n_ap, cfg.n_ev);
  const MatC de = MatC::Zero(cfg.n_ps, cfg.n_ev);

  // Heavy jamming: eavesdropper capacity ~ 0, secrecy ~ main-link rate.
  Allocation a = zero_allocation(cfg);
  a.tau1 = 0.2;
  a.tau2 = 0.8;
  const VecC h = ch.h[0];
  a.w_vec = {std::sqrt(0.05) * h / h.norm()};
  a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint()};
  a.u_cov = 0.2 * MatC::Identity(cfg.n_ap, cfg.n_ap);
  a.z_cov = 0.2 * MatC::Identity(cfg.n_ps, cfg.n_ps);

  const double gamma = model::ir_sinr(0, a, ch, cfg);
  const double rate = a.tau2 * std::log2(1.0 + gamma);
  const auto cap = model::eve_capacity(0, a, ch, dg, de, cfg);
  REQUIRE(cap.has_value());
  const double sec = model::secrecy_rate(0, a, ch, dg, de, cfg);
  CHECK(sec == doctest::Approx(std::max(0.0, rate - a.tau2 * *cap)).epsilon(1e-12));
  CHECK(sec <= rate);

  // Insecure (unjammed) case is clamped to zero secrecy.
  SystemConfig ideal = cfg;
  ideal.hwi.k1 = 0.0;
  Allocation bare = zero_allocation(ideal);
  bare.tau2 = 0.8;
  bare.w_vec = {std::sqrt(0.05) * h / h.norm()};
  bare.w_cov = {bare.w_vec[0] * bare.w_vec[0].adjoint()};
  CHECK(model::secrecy_rate(0, bare, ch, dg, de, ideal) == 0.0);
}

TEST_CASE("power accounting: circuit-only anchor, linearity in phase durations") {
  SystemConfig cfg = desk_config();

  Allocation a = zero_allocation(cfg);
  a.tau1 = 0.5;
  a.tau2 = 0.5;
  auto p = model::power_accounting(a, cfg);
  CHECK(p.objective ==
        doctest::Approx(0.5 * cfg.p_c_ps + 0.5 * (cfg.p_c_ap + cfg.p_c_ps)).epsilon(1e-12));
  CHECK(p.p_ps1 == doctest::Approx(cfg.p_c_ps).epsilon(1e-12));

  // Fixed matrices: objective linear in (tau1, tau2).
  Rng rng(3);
  Allocation b = zero_allocation(cfg);
  MatC vr = rng.cnormal_matrix(cfg.n_ps, cfg.n_ps);
  b.v_cov = 0.05 * (vr * vr.adjoint());
  MatC zr = rng.cnormal_matrix(cfg.n_ps, cfg.n_ps);
  b.z_cov = 0.02 * (zr * zr.adjoint());
  MatC ur = rng.cnormal_matrix(cfg.n_ap, cfg.n_ap);
  b.u_cov = 0.01 * (ur * ur.adjoint());
  b.w_vec = {0.1 * VecC(rng.cnormal_matrix(cfg.n_ap, 1)),
             0.1 * VecC(rng.cnormal_matrix(cfg.n_ap, 1))};
  b.w_cov = {b.w_vec[0] * b.w_vec[0].adjoint(), b.w_vec[1] * b.w_vec[1].adjoint()};
  b.rho_recv = 2e-3;

  auto slope = [&](double t1a, double t2a, double t1b, double t2b) {
    Allocation x = b;
    x.tau1 = t1a;
    x.tau2 = t2a;
    Allocation y = b;
    y.tau1 = t1b;
    y.tau2 = t2b;
    return model::power_accounting(y, cfg).objective -
           model::power_accounting(x, cfg).objective;
  };
  const double d1 = slope(0.1, 0.5, 0.2, 0.5);
  const double d1b = slope(0.5, 0.3, 0.6, 0.3);
  CHECK(d1 == doctest::Approx(d1b).epsilon(1e-12));
  const double d2 = slope(0.3, 0.1, 0.3, 0.2);
  const double d2b = slope(0.3, 0.6, 0.3, 0.7);
  CHECK(d2 == doctest::Approx(d2b).epsilon(1e-12));

  // Component formulas, re-derived.
  auto dc = model::transmit_covariances(b, cfg.hwi);
  auto pb = model::power_accounting(b, cfg);
  CHECK(pb.p_ps1 == doctest::Approx(cfg.rho_ps * (b.v_cov.trace().real() + dc.phi.sum()) +
                                    cfg.p_c_ps)
                        .epsilon(1e-12));
  double wsum = b.u_cov.trace().real();
  for (const auto& w : b.w_vec) wsum += w.squaredNorm();
  CHECK(pb.p_ap2 ==
        doctest::Approx(cfg.rho_ap * (wsum + dc.psi.sum()) + cfg.p_c_ap).epsilon(1e-12));
}

TEST_CASE("reported power counts Phase I plus reserve draw only") {
  SystemConfig cfg = desk_config();
  cfg.e_res = 2.0;
  cfg.validate();
  Allocation a = zero_allocation(cfg);
  a.tau1 = 0.3;
  a.tau2 = 0.7;
  a.v_cov = 0.1 * MatC::Identity(cfg.n_ps, cfg.n_ps);
  a.w_vec = {0.2 * VecC::Ones(cfg.n_ap), VecC::Zero(cfg.n_ap)};
  a.w_cov = {a.w_vec[0] * a.w_vec[0].adjoint(), MatC::Zero(cfg.n_ap, cfg.n_ap)};
  a.rho_recv = 2e-3;

  auto p = model::power_accounting(a, cfg);
  const double harvest = a.tau1 * model::harvested_power(a.rho_recv, cfg.eh);
  const double expect =
      a.tau1 * p.p_ps1 + std::min(std::max(0.0, a.tau2 * p.p_ap2 - harvest), cfg.e_res);
  CHECK(p.reported == doctest::Approx(expect).epsilon(1e-12));

  // With no reserve, the AP part of the report is zero by convention.
  SystemConfig nores = cfg;
  nores.e_res = 0.0;
  auto p0 = model::power_accounting(a, nores);
  CHECK(p0.reported == doctest::Approx(a.tau1 * p.p_ps1).epsilon(1e-12));
}
