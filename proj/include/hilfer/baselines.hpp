#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hilfer/matrix.hpp"
#include "hilfer/solver.hpp"

namespace hilfer {

/// Values on a grid; column n of `values` is the state at times[n].
struct GridSolution {
  std::vector<double> times;
  Matrix values;  ///< d x (n+1)
  std::string method;
};

/// Exact solution of D^{α,β} y = t^k, I^{1-γ} y(0) = ỹ₀:
/// ỹ₀ t^{γ-1}/Γ(γ) + Γ(k+1)/Γ(k+1+α) t^{k+α}. Accepts α in (0, 1].
double analytic_poly_solution(double alpha, double beta, double k, double y0_tilde, double t);

/// x₀ E_α(a t^α), the solution of the Caputo problem D^α x = a x, x(0) = x₀.
double ml_solution_linear(double alpha, double a, double x0, double t, std::size_t n_terms = 500);

/// Fractional Adams predictor-corrector for the Caputo problem D^α x = f(t, x),
/// x(0) = x₀, on the grid t_n = n h with n h <= T. α in (0, 1].
GridSolution abm_solve(const PointRhs& f, double alpha, std::span<const double> x0, double T,
                       double h);

}  // namespace hilfer
