#include "hilfer/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hilfer/errors.hpp"
#include "hilfer/log.hpp"

namespace hilfer {

namespace {

constexpr unsigned kMaxOrder = 60;
constexpr unsigned kStableOrder = 16;

long double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (unsigned i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
  return std::round(r);
}

void check_order(unsigned q, const char* fn) {
  if (q > kMaxOrder) {
    throw OverflowError(std::string(fn) + ": order " + std::to_string(q) +
                        " exceeds the binomial range of binary64 (max 60)");
  }
}

void require_same_knots(const BernsteinSpline& a, const BernsteinSpline& b, const char* fn) {
  if (!(a.knots() == b.knots())) {
    throw MismatchError(std::string(fn) + ": splines have different knot collections");
  }
}

}  // namespace

// ---------------------------------------------------------------- knots

KnotCollection::KnotCollection(std::vector<double> breakpoints) : breaks_(std::move(breakpoints)) {
  if (breaks_.size() < 2) throw DomainError("KnotCollection: need at least two breakpoints");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!std::isfinite(breaks_[i]) || !std::isfinite(breaks_[i + 1]) ||
        !(breaks_[i + 1] > breaks_[i])) {
      throw DomainError("KnotCollection: breakpoints must be finite and strictly increasing (index " +
                        std::to_string(i) + ")");
    }
  }
}

KnotCollection KnotCollection::uniform(double start, double end, double h) {
  if (!(h > 0.0)) throw DomainError("KnotCollection::uniform: h must be > 0");
  if (!(end > start)) throw DomainError("KnotCollection::uniform: end must exceed start");
  const auto n = std::max<long long>(1, std::llround((end - start) / h));
  std::vector<double> b(static_cast<std::size_t>(n) + 1);
  const double step = (end - start) / static_cast<double>(n);
  for (long long j = 0; j < n; ++j) b[static_cast<std::size_t>(j)] = start + step * static_cast<double>(j);
  b.back() = end;
  return KnotCollection(std::move(b));
}

double KnotCollection::max_width() const {
  double h = 0.0;
  for (std::size_t i = 0; i < intervals(); ++i) h = std::max(h, width(i));
  return h;
}

std::size_t KnotCollection::locate(double t) const {
  if (!(t >= front() && t <= back())) {
    throw DomainError("KnotCollection::locate: t = " + std::to_string(t) + " outside [" +
                      std::to_string(front()) + ", " + std::to_string(back()) + "]");
  }
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, intervals() - 1);
}

KnotCollection KnotCollection::slice(std::size_t first, std::size_t last) const {
  if (first > last || last >= intervals()) throw DomainError("KnotCollection::slice: bad range");
  return KnotCollection(std::vector<double>(breaks_.begin() + static_cast<std::ptrdiff_t>(first),
                                            breaks_.begin() + static_cast<std::ptrdiff_t>(last) + 2));
}

// ---------------------------------------------------------------- matrices

Matrix bernstein_basis_matrix(unsigned q) {
  check_order(q, "bernstein_basis_matrix");
  Matrix b(q + 1, q + 1);
  for (unsigned j = 0; j <= q; ++j) {
    for (unsigned l = j; l <= q; ++l) {
      const long double v = binomial(q, l) * binomial(l, j);
      b(j, l) = static_cast<double>(((l - j) % 2 == 0) ? v : -v);
    }
  }
  return b;
}

Matrix node_matrix(const KnotCollection& knots, unsigned q) {
  if (q == 0) throw DomainError("node_matrix: q must be >= 1");
  Matrix tau(knots.intervals(), q + 1);
  for (std::size_t i = 0; i < knots.intervals(); ++i) {
    const double h = knots.width(i);
    for (unsigned j = 0; j < q; ++j) tau(i, j) = knots.left(i) + j * h / q;
    tau(i, q) = knots.right(i);
  }
  return tau;
}

// ---------------------------------------------------------------- splines

BernsteinSpline::BernsteinSpline(KnotCollection knots, unsigned order, Matrix coeffs)
    : knots_(std::move(knots)), order_(order), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != knots_.intervals() || coeffs_.cols() != order_ + 1) {
    throw MismatchError("BernsteinSpline: coefficient shape " + std::to_string(coeffs_.rows()) +
                        "x" + std::to_string(coeffs_.cols()) + " does not match " +
                        std::to_string(knots_.intervals()) + " intervals of order " +
                        std::to_string(order_));
  }
  if (order_ > kStableOrder) {
    warn("spline order " + std::to_string(order_) +
         " exceeds 16; the monomial expansion loses accuracy at high order");
  }
  const Matrix basis = bernstein_basis_matrix(order_);
  monomial_ = multiply(coeffs_, basis);
  // b_j(s) = b_{q-j}(1-s): reversed coefficients expand about the right end.
  Matrix reversed(coeffs_.rows(), order_ + 1);
  for (std::size_t i = 0; i < coeffs_.rows(); ++i) {
    for (unsigned j = 0; j <= order_; ++j) reversed(i, j) = coeffs_(i, order_ - j);
  }
  monomial_right_ = multiply(reversed, basis);
}

double BernsteinSpline::eval_local(std::size_t i, double s) const {
  if (s == 0.0) return coeffs_(i, 0);
  if (s == 1.0) return coeffs_(i, order_);
  // Horner in whichever of s, 1 - s is at most 1/2, which damps the large
  // high-order monomial terms.
  const bool right = s > 0.5;
  const auto c = right ? monomial_right_.row(i) : monomial_.row(i);
  const double x = right ? 1.0 - s : s;
  double acc = c[order_];
  for (unsigned l = order_; l-- > 0;) acc = acc * x + c[l];
  return acc;
}

double BernsteinSpline::operator()(double t) const {
  const std::size_t i = knots_.locate(t);
  return eval_local(i, (t - knots_.left(i)) / knots_.width(i));
}

double eval_spline(const BernsteinSpline& s, double t) { return s(t); }

VectorSpline::VectorSpline(std::vector<BernsteinSpline> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("VectorSpline: need at least one component");
  for (const auto& c : components_) {
    if (!(c.knots() == components_.front().knots()) || c.order() != components_.front().order()) {
      throw MismatchError("VectorSpline: components must share knots and order");
    }
  }
}

std::vector<double> VectorSpline::operator()(double t) const {
  const auto& knots = components_.front().knots();
  const std::size_t i = knots.locate(t);
  const double s = (t - knots.left(i)) / knots.width(i);
  std::vector<double> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.eval_local(i, s));
  return out;
}

BernsteinSpline interpolate(const std::function<double(double)>& f, const KnotCollection& knots,
                            unsigned q) {
  const Matrix tau = node_matrix(knots, q);
  Matrix a(tau.rows(), tau.cols());
  for (std::size_t i = 0; i < tau.rows(); ++i) {
    for (std::size_t j = 0; j < tau.cols(); ++j) a(i, j) = f(tau(i, j));
  }
  return BernsteinSpline(knots, q, std::move(a));
}

std::vector<double> bernstein_product(std::span<const double> a, std::span<const double> b) {
  const auto q1 = static_cast<unsigned>(a.size() - 1);
  const auto q2 = static_cast<unsigned>(b.size() - 1);
  check_order(q1 + q2, "bernstein_product");
  std::vector<double> c(q1 + q2 + 1, 0.0);
  for (unsigned m = 0; m <= q1 + q2; ++m) {
    const long double denom = binomial(q1 + q2, m);
    long double acc = 0.0L;
    const unsigned lo = m > q2 ? m - q2 : 0;
    const unsigned hi = std::min(m, q1);
    for (unsigned i = lo; i <= hi; ++i) {
      acc += binomial(q1, i) * binomial(q2, m - i) / denom * a[i] * b[m - i];
    }
    c[m] = static_cast<double>(acc);
  }
  return c;
}

BernsteinSpline spline_product(const BernsteinSpline& s1, const BernsteinSpline& s2) {
  require_same_knots(s1, s2, "spline_product");
  const unsigned q = s1.order() + s2.order();
  Matrix c(s1.coeffs().rows(), q + 1);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const auto row = bernstein_product(s1.coeffs().row(i), s2.coeffs().row(i));
    std::copy(row.begin(), row.end(), c.row(i).begin());
  }
  return BernsteinSpline(s1.knots(), q, std::move(c));
}

BernsteinSpline elevate(const BernsteinSpline& s, unsigned q_new) {
  if (q_new < s.order()) throw DomainError("elevate: target order below current order");
  if (q_new == s.order()) return s;
  const std::vector<double> ones(q_new - s.order() + 1, 1.0);
  Matrix c(s.coeffs().rows(), q_new + 1);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const auto row = bernstein_product(s.coeffs().row(i), ones);
    std::copy(row.begin(), row.end(), c.row(i).begin());
  }
  return BernsteinSpline(s.knots(), q_new, std::move(c));
}

BernsteinSpline resample(const BernsteinSpline& s, unsigned q_new) {
  if (q_new == 0) throw DomainError("resample: q_new must be >= 1");
  Matrix c(s.coeffs().rows(), q_new + 1);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (unsigned j = 0; j <= q_new; ++j) {
      c(i, j) = s.eval_local(i, static_cast<double>(j) / q_new);
    }
  }
  return BernsteinSpline(s.knots(), q_new, std::move(c));
}

BernsteinSpline combine(double a, const BernsteinSpline& s1, double b, const BernsteinSpline& s2) {
  require_same_knots(s1, s2, "combine");
  if (s1.order() != s2.order()) throw MismatchError("combine: orders differ");
  Matrix c(s1.coeffs().rows(), s1.order() + 1);
  const auto x = s1.coeffs().data();
  const auto y = s2.coeffs().data();
  auto out = c.data();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = a * x[n] + b * y[n];
  return BernsteinSpline(s1.knots(), s1.order(), std::move(c));
}

BernsteinSpline scale(double a, const BernsteinSpline& s) {
  Matrix c = s.coeffs();
  for (double& v : c.data()) v *= a;
  return BernsteinSpline(s.knots(), s.order(), std::move(c));
}

BernsteinSpline shift(const BernsteinSpline& s, double value) {
  // Bernstein polynomials form a partition of unity.
  Matrix c = s.coeffs();
  for (double& v : c.data()) v += value;
  return BernsteinSpline(s.knots(), s.order(), std::move(c));
}

}  // namespace hilfer
