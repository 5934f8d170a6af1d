#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hilfer/spline.hpp"

namespace hilfer {

/// Pointwise right-hand side: writes f(t, y) into `out` (size d).
using PointRhs = std::function<void(double t, std::span<const double> y, std::span<double> out)>;

/// Spline-level right-hand side on a single knot interval: receives the d
/// state components as order-q splines and returns d splines of order q'.
/// Lets polynomial systems compose with exact spline products.
using SplineRhs = std::function<std::vector<BernsteinSpline>(const std::vector<BernsteinSpline>& y)>;

/// D^{α,β} y = f(t, y) on (0, T] with I^{1-γ} y(0) = ỹ₀, solved on [ε, T].
struct HilferProblem {
  std::size_t dim = 1;
  double alpha = 0.5;
  double beta = 1.0;
  std::vector<double> y0_tilde{1.0};
  double T = 1.0;
  double epsilon = 0.0;
  PointRhs rhs;
  SplineRhs spline_rhs;  ///< optional; used instead of `rhs` when set
  std::optional<double> lipschitz_bound;  ///< ‖K‖∞, for contraction diagnostics

  /// Throws DomainError if any invariant is violated.
  void validate() const;
};

/// γ = α + β − αβ.
struct GammaParam {
  double value;
};

GammaParam gamma_param(double alpha, double beta);

struct SolverConfig {
  unsigned q = 1;
  unsigned q_prime = 3;
  double eps_it = 1e-12;
  std::size_t max_iter = 200;
  /// When false, reaching max_iter stops the knot's iteration silently
  /// (fixed iteration budget) instead of raising NonConvergenceError.
  bool cap_is_error = true;
  double knot_c = 1.5;
  double h_max = 0.05;

  void validate() const;
};

struct IterationLog {
  std::vector<std::size_t> iterations;             ///< per knot
  std::vector<std::vector<double>> changes;        ///< per knot, sup-norm change per iteration
  std::size_t total_iterations() const;
  double mean_iterations() const;
};

/// v = t^{1-γ} y as order-q splines on [ε, T], plus everything needed to map back.
struct SolutionApprox {
  VectorSpline v;
  GammaParam gamma;
  std::vector<double> v0_tilde;
  double epsilon;
  IterationLog log;
};

/// Knots with h_i = min(h_max, c^{1/(1-γ)-1} t_i) (γ < 1) or h_max (γ = 1);
/// the final knot lands exactly on T.
KnotCollection geometric_knots(double epsilon, double T, GammaParam gamma, double c, double h_max);

struct ContractionReport {
  std::vector<double> factors;  ///< (1 + h_i/t_i)^{1-γ} Ψ_i ‖K‖
  bool satisfied;               ///< all factors < 1
};

/// Ψ_i = ((5/2)(h_i/√q)^α + h_i^α) / Γ(α+1).
ContractionReport contraction_check(double k_norm, const KnotCollection& knots, GammaParam gamma,
                                    double alpha, unsigned q);

/// Finite-difference estimate of ‖∂f/∂y‖∞ at (t, y).
double estimate_lipschitz(const PointRhs& rhs, double t, std::span<const double> y,
                          double rel_step = 1e-6);

/// Knot-local Picard iteration for the weighted, ε-shifted integral equation.
/// Throws NonConvergenceError (cap reached with cap_is_error) or NonFiniteError.
SolutionApprox solve(const HilferProblem& problem, const SolverConfig& config,
                     const KnotCollection& knots);

/// y(t) = t^{γ-1} v(t), t in [ε, T].
std::vector<double> eval_solution(const SolutionApprox& sol, double t);

}  // namespace hilfer
