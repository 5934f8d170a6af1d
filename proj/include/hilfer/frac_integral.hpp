#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hilfer/matrix.hpp"
#include "hilfer/spline.hpp"

namespace hilfer {

/// (1/Γ(α)) ∫_0^b (t-s)^{α-1} s^k ds = t^{α+k}/Γ(α) · B_{b/t}(k+1, α).
double frac_int_monomial_left(double alpha, double k, double b, double t);

/// (1/Γ(α)) ∫_b^t (t-s)^{α-1} s^k ds = t^{α+k}/Γ(α) · B_{1-b/t}(α, k+1).
double frac_int_monomial_right(double alpha, double k, double b, double t);

/// J_{i,l,m}: Riemann-Liouville integral of order α, evaluated at point m, of
/// the local monomial s_i(t)^l supported on interval i.
class IntegrationTensor {
 public:
  IntegrationTensor(std::size_t intervals, std::size_t basis, std::size_t points, double alpha);

  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t basis() const noexcept { return basis_; }
  std::size_t points() const noexcept { return points_; }
  double alpha() const noexcept { return alpha_; }

  double& operator()(std::size_t i, std::size_t l, std::size_t m) {
    return data_[(i * basis_ + l) * points_ + m];
  }
  double operator()(std::size_t i, std::size_t l, std::size_t m) const {
    return data_[(i * basis_ + l) * points_ + m];
  }

 private:
  std::size_t intervals_, basis_, points_;
  double alpha_;
  std::vector<double> data_;
};

/// Tensor over intervals [first, last] of `knots` (all intervals by default)
/// for a basis of order q, at the given evaluation points.
IntegrationTensor integration_tensor(const KnotCollection& knots, unsigned q, double alpha,
                                     std::span<const double> eval_points);
IntegrationTensor integration_tensor(const KnotCollection& knots, std::size_t first,
                                     std::size_t last, unsigned q, double alpha,
                                     std::span<const double> eval_points);

/// One tensor entry; zero when the evaluation point has not reached the interval.
double integration_entry(double t_left, double width, unsigned l, double alpha, double point);

/// (M · J): contraction over the (interval, basis) axes, where row i of
/// `monomial` holds the monomial coefficients (A B) of interval i.
/// Summation over intervals is pairwise.
std::vector<double> contract(const Matrix& monomial, const IntegrationTensor& j);
/// As above, reading the tensor's interval i from row `first_row + i`.
std::vector<double> contract(const Matrix& monomial, std::size_t first_row,
                             const IntegrationTensor& j);

/// Exact I^α from the spline's left endpoint, evaluated at each point.
std::vector<double> frac_int_spline(const BernsteinSpline& s, double alpha,
                                    std::span<const double> eval_points);

}  // namespace hilfer
