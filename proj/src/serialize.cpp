#include "hilfer/serialize.hpp"

#include "hilfer/errors.hpp"

namespace hilfer {

nlohmann::json spline_to_json(const BernsteinSpline& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < s.coeffs().rows(); ++i) {
    const auto row = s.coeffs().row(i);
    coeffs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  const auto b = s.knots().breakpoints();
  return {{"breakpoints", std::vector<double>(b.begin(), b.end())},
          {"order", s.order()},
          {"coeffs", std::move(coeffs)}};
}

BernsteinSpline spline_from_json(const nlohmann::json& j) {
  try {
    KnotCollection knots(j.at("breakpoints").get<std::vector<double>>());
    const auto order = j.at("order").get<unsigned>();
    const auto& rows = j.at("coeffs");
    Matrix a(rows.size(), order + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row = rows[i].get<std::vector<double>>();
      if (row.size() != order + 1) throw DomainError("spline_from_json: ragged coefficient row");
      std::copy(row.begin(), row.end(), a.row(i).begin());
    }
    return BernsteinSpline(std::move(knots), order, std::move(a));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("spline_from_json: ") + e.what());
  }
}

nlohmann::json solution_to_json(const SolutionApprox& sol) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& comp : sol.v) coeffs.push_back(spline_to_json(comp).at("coeffs"));
  const auto b = sol.v.knots().breakpoints();
  return {{"gamma", sol.gamma.value},
          {"epsilon", sol.epsilon},
          {"order", sol.v.order()},
          {"knots", std::vector<double>(b.begin(), b.end())},
          {"v0_tilde", sol.v0_tilde},
          {"coeffs", std::move(coeffs)}};
}

SolutionApprox solution_from_json(const nlohmann::json& j) {
  try {
    std::vector<BernsteinSpline> parts;
    for (const auto& c : j.at("coeffs")) {
      parts.push_back(spline_from_json(
          {{"breakpoints", j.at("knots")}, {"order", j.at("order")}, {"coeffs", c}}));
    }
    if (parts.empty()) throw DomainError("solution_from_json: no components");
    return SolutionApprox{VectorSpline(std::move(parts)), {j.at("gamma").get<double>()},
                          j.at("v0_tilde").get<std::vector<double>>(),
                          j.at("epsilon").get<double>(), {}};
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("solution_from_json: ") + e.what());
  }
}

}  // namespace hilfer
