// Internal JSON helpers for Eigen matrices (not installed).
#pragma once

#include <nlohmann/json.hpp>

#include "wpcn/util.hpp"

namespace wpcn::detail {

inline nlohmann::json mat_to_json(const MatC& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rre = nlohmann::json::array(), rim = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rre.push_back(m(i, j).real());
      rim.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rre));
    im.push_back(std::move(rim));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

inline MatC mat_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(re[0].size()) : 0;
  MatC m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      m(i, j2) = cxd(re[i][j2].get<double>(), im[i][j2].get<double>());
  return m;
}

inline nlohmann::json vec_to_json(const VecR& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline VecR vec_from_json(const nlohmann::json& j) {
  VecR v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace wpcn::detail
