#pragma once

#include <json.hpp>

#include "hilfer/solver.hpp"
#include "hilfer/spline.hpp"

namespace hilfer {

/// {"breakpoints": [...], "order": q, "coeffs": [[a_00, ...], ...]}
nlohmann::json spline_to_json(const BernsteinSpline& s);

/// Inverse of spline_to_json. Throws DomainError on a malformed document.
BernsteinSpline spline_from_json(const nlohmann::json& j);

/// {"gamma", "epsilon", "order", "knots", "v0_tilde", "coeffs": [per dimension]}.
/// The iteration log is not stored.
nlohmann::json solution_to_json(const SolutionApprox& sol);
SolutionApprox solution_from_json(const nlohmann::json& j);

}  // namespace hilfer
