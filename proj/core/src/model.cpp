#include "wpcn/model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace wpcn::model {

double tx_distortion(double x, const HwiParams& hwi) {
  if (x < 0.0) throw std::domain_error("per-antenna transmit power must be nonnegative");
  if (hwi.k1 == 0.0 || x == 0.0) return 0.0;
  return hwi.k1 * std::pow(x, hwi.k2);
}

double rx_distortion(double x, double k3) {
  if (x < 0.0) throw std::domain_error("received power must be nonnegative");
  const double c = (k3 / 100.0) * (k3 / 100.0);
  return c * x;
}

DistortionCovariances transmit_covariances(const Allocation& alloc, const HwiParams& hwi) {
  DistortionCovariances d;
  const Eigen::Index n_ps = alloc.v_cov.rows();
  const Eigen::Index n_ap = alloc.u_cov.rows();
  d.phi = VecR::Zero(n_ps);
  d.theta = VecR::Zero(n_ps);
  d.psi = VecR::Zero(n_ap);
  for (Eigen::Index m = 0; m < n_ps; ++m) {
    d.phi[m] = tx_distortion(std::max(0.0, alloc.v_cov(m, m).real()), hwi);
    d.theta[m] = tx_distortion(std::max(0.0, alloc.z_cov(m, m).real()), hwi);
  }
  const MatC s_ap = alloc.ap_transmit_covariance();
  for (Eigen::Index n = 0; n < n_ap; ++n)
    d.psi[n] = tx_distortion(std::max(0.0, s_ap(n, n).real()), hwi);
  return d;
}

double harvested_power(double omega, const EhParams& eh) {
  if (omega < 0.0) throw std::domain_error("harvester input power must be nonnegative");
  if (omega == 0.0) return 0.0;
  const double s = sigmoid(eh.a * (omega - eh.b));
  const double xi = eh.m_sat * (s - eh.omega_0) / (1.0 - eh.omega_0);
  return std::max(0.0, xi);
}

double inverse_harvested_power(double xi, const EhParams& eh) {
  if (xi < 0.0) throw std::domain_error("harvest target must be nonnegative");
  if (xi == 0.0) return 0.0;
  if (xi >= eh.m_sat) throw std::domain_error("harvest target at or above saturation");
  const double s = (xi * (1.0 - eh.omega_0) + eh.m_sat * eh.omega_0) / eh.m_sat;
  // s lies in (omega_0, 1); invert the logistic through the logit.
  return eh.b + (std::log(s) - std::log1p(-s)) / eh.a;
}

double ir_sinr(int k, const Allocation& alloc, const ChannelSet& ch,
               const SystemConfig& cfg) {
  if (k < 0 || k >= static_cast<int>(alloc.w_vec.size()))
    throw std::out_of_range("no recovered beamformer for this user");
  const VecC& h = ch.h.at(static_cast<std::size_t>(k));
  const VecC& f = ch.f.at(static_cast<std::size_t>(k));
  const VecC& w_k = alloc.w_vec[static_cast<std::size_t>(k)];

  const double sig = std::norm(h.dot(w_k));
  double mui = 0.0;
  for (std::size_t j = 0; j < alloc.w_vec.size(); ++j)
    if (static_cast<int>(j) != k) mui += std::norm(h.dot(alloc.w_vec[j]));

  const DistortionCovariances dc = transmit_covariances(alloc, cfg.hwi);
  const double tx_ps = (f.cwiseAbs2().array() * dc.theta.array()).sum();
  const double tx_ap = (h.cwiseAbs2().array() * dc.psi.array()).sum();

  // Everything arriving at the user's antenna feeds the receive-chain
  // distortion: information, multiuser interference, and both jamming signals.
  const MatC s_ap = alloc.ap_transmit_covariance();
  const double rx_in = (h.adjoint() * s_ap * h).value().real() +
                       (f.adjoint() * alloc.z_cov * f).value().real();
  const double rx = rx_distortion(std::max(0.0, rx_in), cfg.hwi.k3);

  const double denom = mui + tx_ps + tx_ap + rx + cfg.sigma_n2;
  return sig / denom;
}

std::optional<double> eve_capacity(int k, const Allocation& alloc, const ChannelSet& ch,
                                   const MatC& dg, const MatC& de,
                                   const SystemConfig& cfg) {
  if (k < 0 || k >= static_cast<int>(alloc.w_vec.size()))
    throw std::out_of_range("no recovered beamformer for this user");
  const MatC g = ch.g_hat + dg;
  const MatC e = ch.e_hat + de;
  const Eigen::Index n_ev = g.cols();

  const DistortionCovariances dc = transmit_covariances(alloc, cfg.hwi);
  MatC q = g.adjoint() * (alloc.u_cov + MatC(dc.psi.cast<cxd>().asDiagonal())) * g +
           e.adjoint() * (alloc.z_cov + MatC(dc.theta.cast<cxd>().asDiagonal())) * e;
  q = cxd(0.5, 0.0) * (q + q.adjoint().eval());

  const VecC s = g.adjoint() * alloc.w_vec[static_cast<std::size_t>(k)];
  const double signal = s.squaredNorm();
  const double trace_q = q.trace().real();
  if (trace_q <= 0.0) {
    if (signal > 0.0) return std::nullopt;  // bare signal into a noiseless receiver
    return 0.0;
  }

  // Regularize near-singular interference so the log-det stays finite.
  const double eps = 1e-12 * trace_q / static_cast<double>(n_ev);
  Eigen::SelfAdjointEigenSolver<MatC> es(q, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::nullopt;
  if (es.eigenvalues().minCoeff() < eps) q += eps * MatC::Identity(n_ev, n_ev);

  // Capacity from the determinant definition (the signal covariance is rank one).
  const MatC a = MatC::Identity(n_ev, n_ev) + q.lu().solve(MatC(s * s.adjoint()));
  const double c = std::log2(std::abs(Eigen::FullPivLU<MatC>(a).determinant()));
  if (!std::isfinite(c)) return std::nullopt;
  return std::max(0.0, c);
}

double secrecy_rate(int k, const Allocation& alloc, const ChannelSet& ch,
                    const MatC& dg, const MatC& de, const SystemConfig& cfg) {
  const double gamma = ir_sinr(k, alloc, ch, cfg);
  const double rate = alloc.tau2 * std::log2(1.0 + gamma);
  const auto cap = eve_capacity(k, alloc, ch, dg, de, cfg);
  if (!cap) return 0.0;
  return std::max(0.0, rate - alloc.tau2 * *cap);
}

PowerBreakdown power_accounting(const Allocation& alloc, const SystemConfig& cfg) {
  const DistortionCovariances dc = transmit_covariances(alloc, cfg.hwi);
  PowerBreakdown p;
  p.p_ps1 = cfg.rho_ps * (alloc.v_cov.trace().real() + dc.phi.sum()) + cfg.p_c_ps;
  p.p_ps2 = cfg.rho_ps * (alloc.z_cov.trace().real() + dc.theta.sum()) + cfg.p_c_ps;
  double ap_radiated = alloc.u_cov.trace().real();
  if (!alloc.w_vec.empty())
    for (const auto& w : alloc.w_vec) ap_radiated += w.squaredNorm();
  else
    for (const auto& w : alloc.w_cov) ap_radiated += w.trace().real();
  p.p_ap2 = cfg.rho_ap * (ap_radiated + dc.psi.sum()) + cfg.p_c_ap;
  p.objective = alloc.tau1 * p.p_ps1 + alloc.tau2 * (p.p_ap2 + p.p_ps2);
  const double harvested = alloc.tau1 * harvested_power(alloc.rho_recv, cfg.eh);
  const double reserve_draw =
      std::min(std::max(0.0, alloc.tau2 * p.p_ap2 - harvested), cfg.e_res);
  p.reported = alloc.tau1 * p.p_ps1 + reserve_draw;
  return p;
}

}  // namespace wpcn::model
