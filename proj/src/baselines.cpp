#include "hilfer/baselines.hpp"

#include <cmath>

#include "hilfer/errors.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

double analytic_poly_solution(double alpha, double beta, double k, double y0_tilde, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(k > 0.0)) throw DomainError("exponent k must be positive");
  if (!(t > 0.0)) throw DomainError("analytic solution requires t > 0");
  const double g = alpha + beta - alpha * beta;
  const double homogeneous = g == 1.0 ? y0_tilde : y0_tilde * std::pow(t, g - 1.0) / specfun::gamma_fn(g);
  const double coef =
      std::exp(specfun::log_gamma(k + 1.0) - specfun::log_gamma(k + 1.0 + alpha));
  return homogeneous + coef * std::pow(t, k + alpha);
}

double ml_solution_linear(double alpha, double a, double x0, double t, std::size_t n_terms) {
  if (!(t >= 0.0)) throw DomainError("time must be nonnegative");
  if (t == 0.0) return x0;
  return x0 * specfun::mittag_leffler(alpha, a * std::pow(t, alpha), n_terms);
}

GridSolution abm_solve(const PointRhs& f, double alpha, std::span<const double> x0, double T,
                       double h) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(h > 0.0) || !(T > 0.0)) throw DomainError("require T > 0 and h > 0");
  if (x0.empty()) throw DomainError("initial value must have at least one component");
  const std::size_t d = x0.size();
  const auto steps = static_cast<std::size_t>(std::floor(T / h * (1.0 + 1e-12)));
  if (steps == 0) throw DomainError("step larger than the horizon");

  GridSolution out;
  out.method = "abm";
  out.times.resize(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) out.times[n] = static_cast<double>(n) * h;
  out.values = Matrix(d, steps + 1);
  Matrix fh(steps + 1, d);  // history of f(t_j, y_j), one row per step

  // w[r] = r^α, v[r] = r^{α+1}: weights depend only on n - j.
  std::vector<double> pa(steps + 2), pa1(steps + 2);
  for (std::size_t r = 0; r < steps + 2; ++r) {
    pa[r] = std::pow(static_cast<double>(r), alpha);
    pa1[r] = std::pow(static_cast<double>(r), alpha + 1.0);
  }
  const double ha = std::pow(h, alpha);
  const double pred_scale = ha / alpha / specfun::gamma_fn(alpha);
  const double corr_scale = ha / specfun::gamma_fn(alpha + 2.0);

  std::vector<double> y(x0.begin(), x0.end()), fy(d), yp(d), sp(d), sc(d);
  for (std::size_t m = 0; m < d; ++m) out.values(m, 0) = x0[m];
  f(0.0, y, fh.row(0));

  for (std::size_t n = 0; n < steps; ++n) {
    std::fill(sp.begin(), sp.end(), 0.0);
    std::fill(sc.begin(), sc.end(), 0.0);
    const double nd = static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j) {
      const double b = pa[n + 1 - j] - pa[n - j];
      const double a = j == 0 ? pa1[n] - (nd - alpha) * pa[n + 1]
                              : pa1[n - j + 2] + pa1[n - j] - 2.0 * pa1[n - j + 1];
      const auto fj = fh.row(j);
      for (std::size_t m = 0; m < d; ++m) {
        sp[m] += b * fj[m];
        sc[m] += a * fj[m];
      }
    }
    for (std::size_t m = 0; m < d; ++m) yp[m] = x0[m] + pred_scale * sp[m];
    f(out.times[n + 1], yp, fy);
    for (std::size_t m = 0; m < d; ++m) y[m] = x0[m] + corr_scale * (fy[m] + sc[m]);
    f(out.times[n + 1], y, fh.row(n + 1));
    for (std::size_t m = 0; m < d; ++m) {
      if (!std::isfinite(y[m]) || !std::isfinite(fh(n + 1, m))) {
        throw NonFiniteError("predictor-corrector solution blew up at t = " +
                             std::to_string(out.times[n + 1]));
      }
      out.values(m, n + 1) = y[m];
    }
  }
  return out;
}

}  // namespace hilfer
