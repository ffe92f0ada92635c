// JSON serialization of conic programs, used to hand instances to external
// reference solvers and to round-trip programs bit-exactly in tests.
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wpcn/conic.hpp"
#include "json_mat.hpp"

namespace wpcn::conic {

using nlohmann::json;

namespace {

json expr_to_json(const LinExpr& e) {
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back({t.var, t.coef});
  return json{{"c0", e.c0}, {"terms", std::move(terms)}};
}

LinExpr expr_from_json(const json& j) {
  LinExpr e;
  e.c0 = j.at("c0").get<double>();
  for (const auto& t : j.at("terms"))
    e.terms.push_back({t.at(0).get<int>(), t.at(1).get<double>()});
  return e;
}

json bound_to_json(double v) {
  if (v == inf) return "+inf";
  if (v == -inf) return "-inf";
  return v;
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf") return inf;
    if (s == "-inf") return -inf;
    throw std::runtime_error("unrecognized bound: " + s);
  }
  return j.get<double>();
}

}  // namespace

nlohmann::json Program::dump() const {
  json j;
  j["num_scalars"] = num_scalars();
  j["nonneg"] = json::array();
  for (int i = 0; i < num_scalars(); ++i)
    if (scalar_nonneg(i)) j["nonneg"].push_back(i);
  j["names"] = names_;
  j["objective"] = expr_to_json(objective_);

  j["linear"] = json::array();
  for (const auto& lc : linear_) {
    j["linear"].push_back({{"lo", bound_to_json(lc.lo)},
                           {"hi", bound_to_json(lc.hi)},
                           {"expr", expr_to_json(lc.expr)}});
  }

  j["psd"] = json::array();
  for (const auto& pc : psd_) {
    json coef = json::array();
    for (const auto& [v, mat] : pc.expr.coef)
      coef.push_back({{"var", v}, {"mat", detail::mat_to_json(mat)}});
    j["psd"].push_back({{"dim", pc.expr.dim},
                        {"f0", detail::mat_to_json(pc.expr.f0)},
                        {"coef", std::move(coef)}});
  }

  j["power"] = json::array();
  for (const auto& pb : power_)
    j["power"].push_back({{"t", expr_to_json(pb.t)},
                          {"x", expr_to_json(pb.x)},
                          {"c", pb.c},
                          {"q", pb.q},
                          {"x_hi", pb.x_hi}});
  return j;
}

Program Program::restore(const nlohmann::json& j) {
  Program p;
  const auto n = j.at("num_scalars").get<std::size_t>();
  p.nonneg_.assign(n, false);
  for (const auto& i : j.at("nonneg"))
    p.nonneg_[i.get<std::size_t>()] = true;
  p.names_ = j.at("names").get<std::vector<std::string>>();
  if (p.names_.size() != n)
    throw std::runtime_error("names/num_scalars mismatch in conic program dump");
  p.objective_ = expr_from_json(j.at("objective"));

  for (const auto& lj : j.at("linear"))
    p.linear_.push_back({expr_from_json(lj.at("expr")),
                         bound_from_json(lj.at("lo")),
                         bound_from_json(lj.at("hi"))});

  for (const auto& pj : j.at("psd")) {
    MatExpr e = MatExpr::zero(pj.at("dim").get<int>());
    e.f0 = detail::mat_from_json(pj.at("f0"));
    for (const auto& cj : pj.at("coef"))
      e.coef[cj.at("var").get<int>()] = detail::mat_from_json(cj.at("mat"));
    p.psd_.push_back({std::move(e)});
  }

  for (const auto& bj : j.at("power"))
    p.power_.push_back({expr_from_json(bj.at("t")), expr_from_json(bj.at("x")),
                        bj.at("c").get<double>(), bj.at("q").get<double>(),
                        bj.at("x_hi").get<double>()});
  return p;
}

}  // namespace wpcn::conic
