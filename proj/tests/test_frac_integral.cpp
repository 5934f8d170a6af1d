#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hilfer/errors.hpp"
#include "hilfer/frac_integral.hpp"
#include "oracle.hpp"

using namespace hilfer;

namespace {

BernsteinSpline random_spline(std::mt19937_64& rng, const KnotCollection& knots, unsigned q) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix a(knots.intervals(), q + 1);
  for (auto& x : a.data()) x = u(rng);
  return BernsteinSpline(knots, q, std::move(a));
}

std::vector<double> breaks_of(const BernsteinSpline& s) {
  const auto b = s.knots().breakpoints();
  return {b.begin(), b.end()};
}

double oracle_of(const BernsteinSpline& s, double alpha, double t) {
  const auto& k = s.knots();
  const auto piece = [&](std::size_t i, double x) {
    return s.eval_local(i, std::clamp((x - k.left(i)) / (k.right(i) - k.left(i)), 0.0, 1.0));
  };
  return oracle::rl_integral(piece, alpha, breaks_of(s), t);
}

}  // namespace

TEST_CASE("monomial integrals: closed forms") {
  CHECK(frac_int_monomial_left(1.0, 1.0, 2.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(frac_int_monomial_left(0.5, 0.9, 0.0, 1.3) == 0.0);
  CHECK(frac_int_monomial_right(0.5, 2.0, 1.3, 1.3) == 0.0);
  CHECK(frac_int_monomial_right(0.5, 0.0, 0.0, 1.0) ==
        doctest::Approx(1.1283791670955126).epsilon(1e-14));
}

TEST_CASE("monomial integrals against quadrature") {
  const auto left_ref = [](double a, double k, double b, double t) {
    return oracle::rl_piece([k](double s) { return std::pow(s, k); }, a, 0.0, b, t);
  };
  const auto right_ref = [](double a, double k, double b, double t) {
    return oracle::rl_piece([k](double s) { return std::pow(s, k); }, a, b, t, t);
  };
  CHECK(frac_int_monomial_left(0.5, 0.9, 1.0, 1.7) ==
        doctest::Approx(left_ref(0.5, 0.9, 1.0, 1.7)).epsilon(1e-10));
  CHECK(frac_int_monomial_right(0.5, 2.0, 0.4, 1.3) ==
        doctest::Approx(right_ref(0.5, 2.0, 0.4, 1.3)).epsilon(1e-10));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.1, 0.95), uk(0.0, 4.0), ut(0.1, 5.0), uf(0.0, 1.0);
  for (int n = 0; n < 60; ++n) {
    const double a = ua(rng), k = uk(rng), t = ut(rng), b = t * uf(rng);
    CHECK(frac_int_monomial_left(a, k, b, t) == doctest::Approx(left_ref(a, k, b, t)).epsilon(1e-9));
    CHECK(frac_int_monomial_right(a, k, b, t) == doctest::Approx(right_ref(a, k, b, t)).epsilon(1e-9));
    // the two pieces add up to the full integral Γ(k+1)/Γ(k+1+α) t^{k+α}
    const double full = std::tgamma(k + 1) / std::tgamma(k + 1 + a) * std::pow(t, k + a);
    CHECK(frac_int_monomial_left(a, k, b, t) + frac_int_monomial_right(a, k, b, t) ==
          doctest::Approx(full).epsilon(1e-11));
  }
}

TEST_CASE("monomial integral domain errors") {
  CHECK_THROWS_AS(frac_int_monomial_left(0.5, 1.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(frac_int_monomial_left(0.5, 1.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(frac_int_monomial_right(0.0, 1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(frac_int_monomial_right(0.5, -1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("integration tensor examples") {
  const KnotCollection one({0.0, 1.0});
  const std::vector<double> at1{1.0};
  const auto j = integration_tensor(one, 0, 0.5, at1);
  CHECK(j(0, 0, 0) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));

  const KnotCollection two({0.0, 1.0, 2.0});
  const std::vector<double> pts{0.0, 1.0, 1.5, 2.0};
  const auto jt = integration_tensor(two, 1, 0.5, pts);
  for (unsigned l = 0; l <= 1; ++l) {
    CHECK(jt(0, l, 0) == 0.0);
    CHECK(jt(1, l, 0) == 0.0);
    CHECK(jt(1, l, 1) == 0.0);  // t̃ = t_1
    // t̃ = 2 sees interval 0 at s = 2: argument 1/2
    const double expect = std::pow(2.0, 0.5 + l) * oracle::inc_beta(0.5, l + 1.0, 0.5) / std::tgamma(0.5);
    CHECK(jt(0, l, 3) == doctest::Approx(expect).epsilon(1e-12));
  }
  for (double x : std::vector<double>{jt(0, 0, 1), jt(0, 1, 2), jt(1, 1, 3)}) CHECK(x >= 0.0);
}

TEST_CASE("tensor entries against quadrature of local monomials") {
  const KnotCollection k({0.2, 0.5, 1.3, 1.4, 3.0});
  const std::vector<double> pts{0.2, 0.35, 0.5, 0.9, 1.35, 1.4, 2.2, 3.0};
  for (double alpha : {0.3, 0.5, 0.8}) {
    const unsigned q = 4;
    const auto j = integration_tensor(k, q, alpha, pts);
    for (std::size_t i = 0; i < k.intervals(); ++i) {
      for (unsigned l = 0; l <= q; ++l) {
        const double ti = k.left(i), h = k.width(i);
        const auto mono = [=](double s) { return std::pow((s - ti) / h, l); };
        for (std::size_t m = 0; m < pts.size(); ++m) {
          const double t = pts[m];
          const double ref = t > ti ? oracle::rl_piece(mono, alpha, ti, std::min(t, k.right(i)), t) : 0.0;
          CHECK(j(i, l, m) >= 0.0);
          CHECK(std::isfinite(j(i, l, m)));
          CHECK(std::abs(j(i, l, m) - ref) <= 1e-11 * std::max(1.0, ref));
          CHECK(integration_entry(ti, h, l, alpha, t) == doctest::Approx(j(i, l, m)).epsilon(1e-15));
        }
      }
    }
  }
}

TEST_CASE("tensor for far-away points stays accurate") {
  // s = (t̃ - t_i)/h large: the continued fraction branch
  const KnotCollection k({0.0, 1e-3, 100.0});
  const std::vector<double> pts{100.0};
  const auto j = integration_tensor(k, 3, 0.5, pts);
  for (unsigned l = 0; l <= 3; ++l) {
    const auto mono = [l](double s) { return std::pow(s / 1e-3, l); };
    const double ref = oracle::rl_piece(mono, 0.5, 0.0, 1e-3, 100.0);
    CHECK(j(0, l, 0) == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("tensor domain checks") {
  const KnotCollection k({0.0, 1.0});
  const std::vector<double> out{1.5};
  CHECK_THROWS_AS(integration_tensor(k, 1, 0.5, out), DomainError);
  const std::vector<double> in{0.5};
  CHECK_THROWS_AS(integration_tensor(k, 1, 1.0, in), DomainError);
  CHECK_THROWS_AS(integration_tensor(k, 1, 0.0, in), DomainError);
}

TEST_CASE("spline integral examples") {
  const KnotCollection k({0.0, 4.0});
  const std::vector<double> pts{0.0, 1.0, 4.0};
  const BernsteinSpline zero(k, 2, Matrix(1, 3, 0.0));
  for (double v : frac_int_spline(zero, 0.5, pts)) CHECK(v == 0.0);
  const BernsteinSpline one(k, 1, Matrix(1, 2, 1.0));
  const auto r = frac_int_spline(one, 0.5, pts);
  CHECK(r[0] == 0.0);
  CHECK(r[2] == doctest::Approx(2.2567583341910251).epsilon(1e-14));
}

TEST_CASE("spline integral against quadrature on random splines") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> uk(1, 4), uq(1, 4);
  std::uniform_real_distribution<double> uh(0.1, 1.5), ut0(0.0, 2.0);
  const double alphas[] = {0.3, 0.5, 0.8};
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    const int pieces = uk(rng);
    std::vector<double> b{ut0(rng)};
    for (int i = 0; i < pieces; ++i) b.push_back(b.back() + uh(rng));
    const KnotCollection k(b);
    const auto s = random_spline(rng, k, static_cast<unsigned>(uq(rng)));
    const double alpha = alphas[n % 3];
    std::vector<double> pts;
    std::uniform_real_distribution<double> up(b.front(), b.back());
    for (int m = 0; m < 6; ++m) pts.push_back(up(rng));
    pts.push_back(b.back());
    const auto got = frac_int_spline(s, alpha, pts);
    for (std::size_t m = 0; m < pts.size(); ++m) {
      worst = std::max(worst, std::abs(got[m] - oracle_of(s, alpha, pts[m])));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("order-3 spline on three knots at seven points") {
  std::mt19937_64 rng(77);
  const KnotCollection k({0.0, 0.7, 1.2, 2.0});
  const auto s = random_spline(rng, k, 3);
  const std::vector<double> pts{0.1, 0.5, 0.7, 0.9, 1.2, 1.6, 2.0};
  const auto got = frac_int_spline(s, 0.4, pts);
  for (std::size_t m = 0; m < pts.size(); ++m) {
    CHECK(std::abs(got[m] - oracle_of(s, 0.4, pts[m])) <= 1e-8);
  }
}

TEST_CASE("linearity and zero prefix") {
  std::mt19937_64 rng(31);
  const KnotCollection k({0.0, 0.5, 1.0, 2.0});
  const auto a = random_spline(rng, k, 3);
  const auto b = random_spline(rng, k, 3);
  const std::vector<double> pts{0.25, 0.5, 0.8, 1.0, 1.9, 2.0};
  const auto fa = frac_int_spline(a, 0.6, pts);
  const auto fb = frac_int_spline(b, 0.6, pts);
  const auto fc = frac_int_spline(combine(1.5, a, -2.0, b), 0.6, pts);
  for (std::size_t m = 0; m < pts.size(); ++m) {
    CHECK(std::abs(fc[m] - (1.5 * fa[m] - 2.0 * fb[m])) <= 1e-12);
  }
  // changing later intervals leaves earlier values untouched
  Matrix changed = a.coeffs();
  changed(2, 0) += 5.0;
  changed(2, 3) -= 1.0;
  const auto fchanged = frac_int_spline(BernsteinSpline(k, 3, changed), 0.6, pts);
  for (std::size_t m = 0; m < pts.size(); ++m) {
    if (pts[m] <= 1.0) CHECK(fchanged[m] == fa[m]);
  }
}

TEST_CASE("boundedness") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const auto k = KnotCollection::uniform(0.5, 3.0, 0.5);
    const auto s = random_spline(rng, k, 3);
    double sup = 0.0;
    for (double x : s.coeffs().data()) sup = std::max(sup, std::abs(x));  // convex hull bound
    std::vector<double> pts;
    for (int m = 0; m <= 40; ++m) pts.push_back(0.5 + 2.5 * m / 40.0);
    const double alpha = 0.35;
    const double bound = std::pow(2.5, alpha) / std::tgamma(alpha + 1) * sup * (1 + 1e-9);
    for (double v : frac_int_spline(s, alpha, pts)) CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("semigroup through an intermediate quadrature") {
  // I^β(I^α s) == I^{α+β} s, checked with quadrature for the outer step.
  std::mt19937_64 rng(55);
  const KnotCollection k({0.0, 0.6, 1.0});
  const auto s = random_spline(rng, k, 2);
  const double a = 0.4, b = 0.35, t = 1.0;
  const auto inner = [&](double x) {
    if (x <= 0.0) return 0.0;
    const std::vector<double> p{x};
    return frac_int_spline(s, a, p)[0];
  };
  const double lhs = oracle::rl_integral(inner, b, breaks_of(s), t);
  const double rhs = oracle_of(s, a + b, t);
  CHECK(std::abs(lhs - rhs) <= 1e-7);
}

TEST_CASE("spline integration operator error bound") {
  // Re-splining exact integral values costs at most (5/2)(h/√q)^α sup|s| / Γ(α+1).
  std::mt19937_64 rng(63);
  for (double alpha : {0.3, 0.5, 0.8}) {
    for (unsigned q : {1u, 2u, 4u}) {
      const auto k = KnotCollection::uniform(0.0, 2.0, 0.25);
      const auto s = random_spline(rng, k, 3);
      const auto nodes = node_matrix(k, q);
      Matrix vals(k.intervals(), q + 1);
      for (std::size_t i = 0; i < k.intervals(); ++i) {
        const std::vector<double> p(nodes.row(i).begin(), nodes.row(i).end());
        const auto v = frac_int_spline(s, alpha, p);
        for (unsigned j = 0; j <= q; ++j) vals(i, j) = v[j];
      }
      const BernsteinSpline resplined(k, q, vals);
      double sup = 0.0;
      for (int m = 0; m <= 400; ++m) sup = std::max(sup, std::abs(s(2.0 * m / 400.0)));
      const double bound = 2.5 * std::pow(0.25 / std::sqrt(q), alpha) * sup / std::tgamma(alpha + 1);
      for (double t : {0.1, 0.3, 0.77, 1.01, 1.5, 1.93}) {
        CHECK(std::abs(resplined(t) - oracle_of(s, alpha, t)) <= bound);
      }
    }
  }
}
