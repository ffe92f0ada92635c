#include "wpcn/types.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "json_mat.hpp"

namespace wpcn {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void SystemConfig::validate() {
  if (n_ps < 1 || n_ap < 1 || n_ev < 1 || n_irs < 1)
    throw std::invalid_argument("antenna/user counts must be positive");
  if (!(p_max_ps > 0.0) || !(p_max_ap > 0.0))
    throw std::invalid_argument("power budgets must be positive");
  if (!(sigma_n2 > 0.0) || !(sigma_ir2 > 0.0) || !(sigma_e2 > 0.0))
    throw std::invalid_argument("noise powers must be positive");
  if (!(rho_ps >= 1.0) || !(rho_ap >= 1.0))
    throw std::invalid_argument("amplifier cost factors must be >= 1");
  if (p_c_ps < 0.0 || p_c_ap < 0.0 || e_res < 0.0)
    throw std::invalid_argument("static power and energy reserve must be nonnegative");
  if (!(t_max > 0.0)) throw std::invalid_argument("block length must be positive");
  if (hwi.k1 < 0.0 || hwi.k2 < 1.0)
    throw std::invalid_argument("amplifier distortion parameters out of range");
  if (hwi.k3 < 0.0 || hwi.k3 > 100.0)
    throw std::invalid_argument("receiver distortion percentage out of range");
  if (static_cast<int>(qos.r_req.size()) != n_irs)
    throw std::invalid_argument("per-user rate requirement count mismatch");
  for (double r : qos.r_req)
    if (!(r > 0.0)) throw std::invalid_argument("rate requirements must be positive");
  if (!(qos.r_tol > 0.0)) throw std::invalid_argument("leakage tolerance must be positive");
  if (qos.sigma_eve2 < 0.0)
    throw std::invalid_argument("eavesdropper CSI error power must be nonnegative");
  if (!(eh.m_sat > 0.0) || !(eh.a > 0.0) || !(eh.b > 0.0))
    throw std::invalid_argument("harvester parameters must be positive");
  eh.refresh();
  if (!(eh.omega_0 > 0.0) || !(eh.omega_0 < 1.0))
    throw std::invalid_argument("harvester zero-input offset out of range");
}

Allocation zero_allocation(const SystemConfig& cfg) {
  Allocation a;
  a.tau1 = 0.0;
  a.tau2 = 0.0;
  a.v_cov = MatC::Zero(cfg.n_ps, cfg.n_ps);
  a.z_cov = MatC::Zero(cfg.n_ps, cfg.n_ps);
  a.u_cov = MatC::Zero(cfg.n_ap, cfg.n_ap);
  a.w_cov.assign(static_cast<std::size_t>(cfg.n_irs), MatC::Zero(cfg.n_ap, cfg.n_ap));
  a.w_vec.clear();
  a.b_ps1 = VecR::Zero(cfg.n_ps);
  a.b_ps2 = VecR::Zero(cfg.n_ps);
  a.b_ap = VecR::Zero(cfg.n_ap);
  a.r_ir = VecR::Zero(cfg.n_irs);
  a.rho_recv = 0.0;
  a.aux.a = VecR::Zero(cfg.n_ap);
  a.aux.b = VecR::Zero(cfg.n_ps);
  a.aux.c = VecR::Zero(cfg.n_ps);
  a.aux.d = VecR::Zero(cfg.n_irs);
  return a;
}

MatC Allocation::ap_transmit_covariance() const {
  MatC s = u_cov;
  if (has_beamformers())
    for (const auto& w : w_vec) s += w * w.adjoint();
  else
    for (const auto& w : w_cov) s += w;
  return s;
}

void to_json(nlohmann::json& j, const SystemConfig& c) {
  j = nlohmann::json{
      {"n_ps", c.n_ps},
      {"n_ap", c.n_ap},
      {"n_ev", c.n_ev},
      {"n_irs", c.n_irs},
      {"p_max_ps", c.p_max_ps},
      {"p_max_ap", c.p_max_ap},
      {"sigma_n2", c.sigma_n2},
      {"sigma_ir2", c.sigma_ir2},
      {"sigma_e2", c.sigma_e2},
      {"rho_ps", c.rho_ps},
      {"rho_ap", c.rho_ap},
      {"p_c_ps", c.p_c_ps},
      {"p_c_ap", c.p_c_ap},
      {"e_res", c.e_res},
      {"t_max", c.t_max},
      {"hwi", {{"k1", c.hwi.k1}, {"k2", c.hwi.k2}, {"k3", c.hwi.k3}}},
      {"eh", {{"m_sat", c.eh.m_sat}, {"a", c.eh.a}, {"b", c.eh.b}}},
      {"qos",
       {{"r_req", c.qos.r_req},
        {"r_tol", c.qos.r_tol},
        {"sigma_eve2", c.qos.sigma_eve2}}},
      {"run",
       {{"solver_tol", c.run.solver_tol},
        {"rank_tol", c.run.rank_tol},
        {"grid_n", c.run.grid_n},
        {"omega_grid_n", c.run.omega_grid_n},
        {"ao_l_max", c.run.ao_l_max},
        {"ao_psi", c.run.ao_psi},
        {"audit_security_samples", c.run.audit_security_samples},
        {"security_samples", c.run.security_samples},
        {"randomization_candidates", c.run.randomization_candidates},
        {"threads", c.run.threads}}}};
}

void from_json(const nlohmann::json& j, SystemConfig& c) {
  c = SystemConfig{};
  j.at("n_ps").get_to(c.n_ps);
  j.at("n_ap").get_to(c.n_ap);
  j.at("n_ev").get_to(c.n_ev);
  j.at("n_irs").get_to(c.n_irs);
  j.at("p_max_ps").get_to(c.p_max_ps);
  j.at("p_max_ap").get_to(c.p_max_ap);
  j.at("sigma_n2").get_to(c.sigma_n2);
  j.at("sigma_ir2").get_to(c.sigma_ir2);
  j.at("sigma_e2").get_to(c.sigma_e2);
  j.at("rho_ps").get_to(c.rho_ps);
  j.at("rho_ap").get_to(c.rho_ap);
  j.at("p_c_ps").get_to(c.p_c_ps);
  j.at("p_c_ap").get_to(c.p_c_ap);
  j.at("e_res").get_to(c.e_res);
  j.at("t_max").get_to(c.t_max);
  const auto& h = j.at("hwi");
  h.at("k1").get_to(c.hwi.k1);
  h.at("k2").get_to(c.hwi.k2);
  h.at("k3").get_to(c.hwi.k3);
  const auto& e = j.at("eh");
  e.at("m_sat").get_to(c.eh.m_sat);
  e.at("a").get_to(c.eh.a);
  e.at("b").get_to(c.eh.b);
  const auto& q = j.at("qos");
  q.at("r_req").get_to(c.qos.r_req);
  q.at("r_tol").get_to(c.qos.r_tol);
  q.at("sigma_eve2").get_to(c.qos.sigma_eve2);
  if (j.contains("run")) {
    const auto& r = j.at("run");
    r.at("solver_tol").get_to(c.run.solver_tol);
    r.at("rank_tol").get_to(c.run.rank_tol);
    r.at("grid_n").get_to(c.run.grid_n);
    r.at("omega_grid_n").get_to(c.run.omega_grid_n);
    r.at("ao_l_max").get_to(c.run.ao_l_max);
    r.at("ao_psi").get_to(c.run.ao_psi);
    r.at("audit_security_samples").get_to(c.run.audit_security_samples);
    r.at("security_samples").get_to(c.run.security_samples);
    r.at("randomization_candidates").get_to(c.run.randomization_candidates);
    r.at("threads").get_to(c.run.threads);
  }
  c.eh.refresh();
  c.validate();
}

void to_json(nlohmann::json& j, const Allocation& a) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& m : a.w_cov) w.push_back(detail::mat_to_json(m));
  nlohmann::json wv = nlohmann::json::array();
  for (const auto& v : a.w_vec) wv.push_back(detail::mat_to_json(v));
  j = nlohmann::json{
      {"tau1", a.tau1},
      {"tau2", a.tau2},
      {"v_cov", detail::mat_to_json(a.v_cov)},
      {"z_cov", detail::mat_to_json(a.z_cov)},
      {"u_cov", detail::mat_to_json(a.u_cov)},
      {"w_cov", std::move(w)},
      {"w_vec", std::move(wv)},
      {"b_ps1", detail::vec_to_json(a.b_ps1)},
      {"b_ps2", detail::vec_to_json(a.b_ps2)},
      {"b_ap", detail::vec_to_json(a.b_ap)},
      {"r_ir", detail::vec_to_json(a.r_ir)},
      {"rho_recv", a.rho_recv},
      {"aux",
       {{"a", detail::vec_to_json(a.aux.a)},
        {"b", detail::vec_to_json(a.aux.b)},
        {"c", detail::vec_to_json(a.aux.c)},
        {"d", detail::vec_to_json(a.aux.d)}}}};
}

void from_json(const nlohmann::json& j, Allocation& a) {
  j.at("tau1").get_to(a.tau1);
  j.at("tau2").get_to(a.tau2);
  a.v_cov = detail::mat_from_json(j.at("v_cov"));
  a.z_cov = detail::mat_from_json(j.at("z_cov"));
  a.u_cov = detail::mat_from_json(j.at("u_cov"));
  a.w_cov.clear();
  for (const auto& m : j.at("w_cov")) a.w_cov.push_back(detail::mat_from_json(m));
  a.w_vec.clear();
  for (const auto& v : j.at("w_vec")) a.w_vec.push_back(detail::mat_from_json(v));
  a.b_ps1 = detail::vec_from_json(j.at("b_ps1"));
  a.b_ps2 = detail::vec_from_json(j.at("b_ps2"));
  a.b_ap = detail::vec_from_json(j.at("b_ap"));
  a.r_ir = detail::vec_from_json(j.at("r_ir"));
  j.at("rho_recv").get_to(a.rho_recv);
  const auto& x = j.at("aux");
  a.aux.a = detail::vec_from_json(x.at("a"));
  a.aux.b = detail::vec_from_json(x.at("b"));
  a.aux.c = detail::vec_from_json(x.at("c"));
  a.aux.d = detail::vec_from_json(x.at("d"));
}

}  // namespace wpcn
