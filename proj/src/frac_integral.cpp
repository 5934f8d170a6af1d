#include "hilfer/frac_integral.hpp"

#include <cmath>
#include <string>

#include "hilfer/errors.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

namespace {

void check_monomial_args(double alpha, double k, double b, double t, const char* fn) {
  if (!(alpha > 0.0)) throw DomainError(std::string(fn) + ": alpha must be > 0");
  if (!(k > -1.0)) throw DomainError(std::string(fn) + ": k must be > -1");
  if (!(t > 0.0)) throw DomainError(std::string(fn) + ": t must be > 0");
  if (!(b >= 0.0 && b <= t)) throw DomainError(std::string(fn) + ": need 0 <= b <= t");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("integration_tensor: alpha must lie in (0, 1)");
}

}  // namespace

double frac_int_monomial_left(double alpha, double k, double b, double t) {
  check_monomial_args(alpha, k, b, t, "frac_int_monomial_left");
  if (b == 0.0) return 0.0;
  return std::pow(t, alpha + k) / specfun::gamma_fn(alpha) *
         specfun::inc_beta(std::min(1.0, b / t), k + 1.0, alpha);
}

double frac_int_monomial_right(double alpha, double k, double b, double t) {
  check_monomial_args(alpha, k, b, t, "frac_int_monomial_right");
  if (b == t) return 0.0;
  return std::pow(t, alpha + k) / specfun::gamma_fn(alpha) *
         specfun::inc_beta(1.0 - b / t, alpha, k + 1.0);
}

IntegrationTensor::IntegrationTensor(std::size_t intervals, std::size_t basis, std::size_t points,
                                     double alpha)
    : intervals_(intervals),
      basis_(basis),
      points_(points),
      alpha_(alpha),
      data_(intervals * basis * points, 0.0) {}

double integration_entry(double t_left, double width, unsigned l, double alpha, double point) {
  const double d = point - t_left;
  if (!(d > 0.0)) return 0.0;
  const double s = d / width;
  const double a = l + 1.0;
  const double scale = std::pow(width, alpha) / specfun::gamma_fn(alpha);
  if (s <= 1.0) {
    // Point inside (or at the end of) the interval: the beta argument clamps to 1.
    return scale * std::pow(s, alpha + l) * specfun::beta_fn(a, alpha);
  }
  const double z = 1.0 / s;
  if (z < (a + 1.0) / (a + alpha + 2.0)) {
    // s^{α+l} z^{l+1} (1-z)^α / (l+1) = (s-1)^α / s / (l+1), free of overflow in s^l.
    return scale * std::pow(s - 1.0, alpha) / s / a * specfun::inc_beta_cf(z, a, alpha);
  }
  return scale * std::pow(s, alpha + l) * specfun::inc_beta(z, a, alpha);
}

IntegrationTensor integration_tensor(const KnotCollection& knots, std::size_t first,
                                     std::size_t last, unsigned q, double alpha,
                                     std::span<const double> eval_points) {
  check_alpha(alpha);
  if (first > last || last >= knots.intervals()) {
    throw DomainError("integration_tensor: interval range out of bounds");
  }
  for (double p : eval_points) {
    if (!(p >= knots.front() && p <= knots.back())) {
      throw DomainError("integration_tensor: evaluation point " + std::to_string(p) +
                        " outside the knot span");
    }
  }
  const double scale = 1.0 / specfun::gamma_fn(alpha);
  std::vector<double> full_beta(q + 1);
  for (unsigned l = 0; l <= q; ++l) full_beta[l] = specfun::beta_fn(l + 1.0, alpha);

  IntegrationTensor j(last - first + 1, q + 1, eval_points.size(), alpha);
  for (std::size_t i = first; i <= last; ++i) {
    const double t0 = knots.left(i);
    const double h = knots.width(i);
    const double h_alpha = std::pow(h, alpha) * scale;
    for (std::size_t m = 0; m < eval_points.size(); ++m) {
      const double d = eval_points[m] - t0;
      if (!(d > 0.0)) continue;
      const double s = d / h;
      if (s <= 1.0) {
        const double base = h_alpha * std::pow(s, alpha);
        double sl = 1.0;
        for (unsigned l = 0; l <= q; ++l, sl *= s) j(i - first, l, m) = base * sl * full_beta[l];
        continue;
      }
      const double z = 1.0 / s;
      const double direct_front = h_alpha * std::pow(s - 1.0, alpha) / s;
      for (unsigned l = 0; l <= q; ++l) {
        const double a = l + 1.0;
        j(i - first, l, m) =
            z < (a + 1.0) / (a + alpha + 2.0)
                ? direct_front / a * specfun::inc_beta_cf(z, a, alpha)
                : h_alpha * std::pow(s, alpha + l) * specfun::inc_beta(z, a, alpha);
      }
    }
  }
  return j;
}

IntegrationTensor integration_tensor(const KnotCollection& knots, unsigned q, double alpha,
                                     std::span<const double> eval_points) {
  return integration_tensor(knots, 0, knots.intervals() - 1, q, alpha, eval_points);
}

std::vector<double> contract(const Matrix& monomial, std::size_t first_row,
                             const IntegrationTensor& j) {
  if (first_row + j.intervals() > monomial.rows() || monomial.cols() != j.basis()) {
    throw MismatchError("contract: coefficient matrix does not match tensor shape");
  }
  std::vector<double> out(j.points(), 0.0);
  std::vector<double> per_interval(j.intervals());
  for (std::size_t m = 0; m < j.points(); ++m) {
    for (std::size_t i = 0; i < j.intervals(); ++i) {
      const auto c = monomial.row(first_row + i);
      double acc = 0.0;
      for (std::size_t l = 0; l < j.basis(); ++l) acc += c[l] * j(i, l, m);
      per_interval[i] = acc;
    }
    out[m] = pairwise_sum(per_interval);
  }
  return out;
}

std::vector<double> contract(const Matrix& monomial, const IntegrationTensor& j) {
  if (monomial.rows() != j.intervals()) {
    throw MismatchError("contract: coefficient matrix does not match tensor shape");
  }
  return contract(monomial, 0, j);
}

std::vector<double> frac_int_spline(const BernsteinSpline& s, double alpha,
                                    std::span<const double> eval_points) {
  const auto j = integration_tensor(s.knots(), s.order(), alpha, eval_points);
  return contract(s.monomial(), j);
}

}  // namespace hilfer
