#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hilfer/solver.hpp"

namespace hilfer {

using Evaluable = std::function<std::vector<double>(double t)>;

struct ErrorSummary {
  double mean;
  double sup;
};

/// e(t) = max_m |t^{1-γ}(y_num(t) - y_ref(t))_m|; mean and max over the points.
/// Points must be positive unless γ = 1. Per-point values go to `per_point` if given.
ErrorSummary weighted_errors(const Evaluable& y_num, const Evaluable& y_ref, GammaParam gamma,
                             std::span<const double> points,
                             std::vector<std::pair<double, double>>* per_point = nullptr);

struct RunMeta {
  std::string method = "bs";
  double h = 0.0;  ///< max knot width (or step size)
  unsigned q = 0;
  double epsilon = 0.0;
  double beta = 1.0;
  std::size_t knots = 0;
  double avg_iter_per_knot = 0.0;
  double avg_time_per_iter_s = 0.0;
};

struct ErrorReport {
  double param = 0.0;  ///< the swept quantity (h, q, eps, N or beta)
  double mean_weighted_error = 0.0;
  double sup_weighted_error = 0.0;
  double wall_time_s = 0.0;
  std::optional<double> x_at_eps;
  std::vector<std::pair<double, double>> per_point;
  RunMeta meta;
};

/// D^{α,β} y = t^k with weighted initial value ỹ₀, the convergence-study problem.
struct PolyStudy {
  double alpha = 0.5;
  double beta = 0.5;
  double k = 0.9;
  double y0_tilde = 1.0;
  double T = 4.0;
  double epsilon = 1e-10;
  std::size_t grid_points = 10000;
  double eps_it = 1e-12;
  std::size_t max_iter = 200;
  unsigned jobs = 1;
};

HilferProblem make_poly_problem(const PolyStudy& s, double epsilon);

/// Uniform knots over [ε, T] (`round((T-ε)/h)` intervals), order q, q' = q.
ErrorReport run_poly_case(const PolyStudy& s, double h, unsigned q, double epsilon);

std::vector<ErrorReport> run_convergence_h(const PolyStudy& s, std::span<const double> hs,
                                           unsigned q);
std::vector<ErrorReport> run_convergence_q(const PolyStudy& s, std::span<const unsigned> qs,
                                           double h);
/// Errors against the unshifted analytic solution; records y(ε) in x_at_eps.
std::vector<ErrorReport> run_convergence_eps(const PolyStudy& s, std::span<const double> epss,
                                             unsigned q, double h);

/// Least-squares slope of log₂ y against log₂ x.
double fit_log2_slope(std::span<const double> x, std::span<const double> y);

/// Caputo problem D^α x = a x, x(0) = x₀ on [0, T], errors at knot / grid points.
struct LinearStudy {
  double alpha = 0.5;
  double a = -1.0;
  double x0 = 1.0;
  double T = 15.0;
  unsigned q = 1;
  double eps_it = 1e-12;
  std::size_t max_iter = 200;
  std::size_t ml_terms = 500;
  unsigned jobs = 1;
};

HilferProblem make_linear_problem(const LinearStudy& s);

struct PcRow {
  ErrorReport pc;
  ErrorReport bs;
};

ErrorReport run_linear_bs(const LinearStudy& s, double h, std::optional<std::size_t> cap);
ErrorReport run_linear_pc(const LinearStudy& s, double h);
std::vector<PcRow> run_pc_comparison(const LinearStudy& s, std::span<const double> hs);
/// Spline runs with a fixed budget of N Picard iterations per knot.
std::vector<ErrorReport> run_iteration_cap_sweep(const LinearStudy& s,
                                                 std::span<const std::size_t> caps, double h);

/// Fractional Van der Pol system with α = 1/2, state (x, y, z, u):
/// f = (y, z, u, μ(1 - x²) y - x), ỹ₀ = (x̃₀, 0, 0, 0).
struct VdpStudy {
  double mu = 1.0;
  double x0 = 1.0;
  double T = 100.0;
  double epsilon = 1e-5;
  double knot_c = 1.5;
  double h_max = 0.05;
  unsigned q = 1;
  double eps_it = 1e-12;
  std::size_t max_iter = 200;
  std::size_t trajectory_points = 2001;
  unsigned jobs = 1;
};

/// Pointwise rhs plus a spline-level rhs built from exact products (q' = 3q).
HilferProblem make_vdp_problem(double beta, const VdpStudy& s);
void vdp_rhs(double mu, std::span<const double> y, std::span<double> out);

struct VdpReport {
  ErrorReport stats;  ///< param = β; errors unused
  double late_amplitude = 0.0;  ///< max |x| over [T/2, T]
  std::vector<std::vector<double>> trajectory;  ///< rows (t, x, y)
};

VdpReport run_vdp(double beta, const VdpStudy& s);
std::vector<VdpReport> run_vdp_sweep(std::span<const double> betas, const VdpStudy& s);

struct CsvColumns {
  bool x_at_eps = false;
  bool knots = false;
  bool avg_iter = false;
  bool method = false;
};

/// param, mean_weighted_error, sup_weighted_error, total_time_s[, x_at_eps][, knots]
/// [, avg_iter_per_knot][, method]; numbers with 16 significant digits.
void write_reports_csv(std::ostream& os, std::span<const ErrorReport> rows, CsvColumns cols);

/// Runs fn(0..n-1) on up to `jobs` worker threads. The first exception thrown
/// by any row is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace hilfer
