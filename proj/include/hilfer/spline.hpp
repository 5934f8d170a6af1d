#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hilfer/matrix.hpp"

namespace hilfer {

/// Strictly increasing breakpoints t_0 < t_1 < ... < t_{k+1}. Interval i is
/// [t_i, t_{i+1}); the last interval is closed.
class KnotCollection {
 public:
  explicit KnotCollection(std::vector<double> breakpoints);

  /// `n = max(1, round((end - start) / h))` equal intervals on [start, end].
  static KnotCollection uniform(double start, double end, double h);

  std::size_t intervals() const noexcept { return breaks_.size() - 1; }
  std::span<const double> breakpoints() const noexcept { return breaks_; }

  double left(std::size_t i) const { return breaks_[i]; }
  double right(std::size_t i) const { return breaks_[i + 1]; }
  double width(std::size_t i) const { return breaks_[i + 1] - breaks_[i]; }
  double front() const noexcept { return breaks_.front(); }
  double back() const noexcept { return breaks_.back(); }
  double max_width() const;

  /// Index of the interval containing t; interior breakpoints belong to the
  /// interval on their right. Throws DomainError outside [front, back].
  std::size_t locate(double t) const;

  /// Knots [t_first, ..., t_{last+1}] covering intervals first..last.
  KnotCollection slice(std::size_t first, std::size_t last) const;

  bool operator==(const KnotCollection&) const = default;

 private:
  std::vector<double> breaks_;
};

/// B_{j,l} = C(q,l) C(l,j) (-1)^{l-j} for l >= j. Maps Bernstein coefficients
/// of one piece to monomial coefficients in the local coordinate s.
/// Throws OverflowError for q > 60.
Matrix bernstein_basis_matrix(unsigned q);

/// τ_{i,j} = t_i + j h_i / q, shape intervals x (q+1).
Matrix node_matrix(const KnotCollection& knots, unsigned q);

/// Piecewise Bernstein polynomial of order q. Row i of the coefficient matrix
/// holds the Bernstein coefficients a_{i,0..q} of interval i; for splines built
/// by `interpolate` these are the function values at the nodes τ_{i,j}.
class BernsteinSpline {
 public:
  BernsteinSpline(KnotCollection knots, unsigned order, Matrix coeffs);

  const KnotCollection& knots() const noexcept { return knots_; }
  unsigned order() const noexcept { return order_; }
  const Matrix& coeffs() const noexcept { return coeffs_; }
  /// (A B): per-interval monomial coefficients in the local coordinate.
  const Matrix& monomial() const noexcept { return monomial_; }

  double operator()(double t) const;
  /// Value of piece i at local coordinate s in [0, 1].
  double eval_local(std::size_t i, double s) const;

 private:
  KnotCollection knots_;
  unsigned order_;
  Matrix coeffs_;
  Matrix monomial_;
  Matrix monomial_right_;  ///< expansion in 1 - s, used for s > 1/2
};

/// Vector-valued spline; every component shares one knot collection and order.
class VectorSpline {
 public:
  explicit VectorSpline(std::vector<BernsteinSpline> components);

  std::size_t dim() const noexcept { return components_.size(); }
  const BernsteinSpline& operator[](std::size_t m) const { return components_[m]; }
  const KnotCollection& knots() const { return components_.front().knots(); }
  unsigned order() const { return components_.front().order(); }
  std::vector<double> operator()(double t) const;

  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }

 private:
  std::vector<BernsteinSpline> components_;
};

/// Bernstein spline operator: a_{i,j} = f(τ_{i,j}).
BernsteinSpline interpolate(const std::function<double(double)>& f, const KnotCollection& knots,
                            unsigned q);

double eval_spline(const BernsteinSpline& s, double t);

/// Exact product of two splines on the same knots, of order q1 + q2.
BernsteinSpline spline_product(const BernsteinSpline& s1, const BernsteinSpline& s2);

/// Exact order raise (degree elevation) to q_new >= order.
BernsteinSpline elevate(const BernsteinSpline& s, unsigned q_new);

/// Bernstein operator of order q_new applied to s (samples at order-q_new nodes).
BernsteinSpline resample(const BernsteinSpline& s, unsigned q_new);

/// Coefficient-wise linear combination a*s1 + b*s2; knots and order must match.
BernsteinSpline combine(double a, const BernsteinSpline& s1, double b, const BernsteinSpline& s2);
BernsteinSpline scale(double a, const BernsteinSpline& s);
/// s + c for a constant c.
BernsteinSpline shift(const BernsteinSpline& s, double c);

/// Bernstein coefficients of the product of two single-piece polynomials.
std::vector<double> bernstein_product(std::span<const double> a, std::span<const double> b);

}  // namespace hilfer
