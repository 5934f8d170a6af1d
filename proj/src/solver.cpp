#include "hilfer/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "hilfer/errors.hpp"
#include "hilfer/frac_integral.hpp"
#include "hilfer/log.hpp"
#include "hilfer/specfun.hpp"

namespace hilfer {

namespace {

bool finite_all(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// t^p with the γ = 1 case kept exact (including t = 0).
double weight(double t, double p) { return p == 0.0 ? 1.0 : std::pow(t, p); }

// E(j, j') = b_{j,q}(j'/q'): Bernstein basis of order q at order-q' local nodes.
Matrix bernstein_eval_matrix(unsigned q, unsigned qp) {
  Matrix e(q + 1, qp + 1);
  for (unsigned jp = 0; jp <= qp; ++jp) {
    const double s = static_cast<double>(jp) / qp;
    for (unsigned j = 0; j <= q; ++j) {
      double binom = 1.0;
      for (unsigned k = 1; k <= j; ++k) binom = binom * (q - j + k) / k;
      e(j, jp) = binom * std::pow(s, j) * std::pow(1.0 - s, q - j);
    }
  }
  return e;
}

}  // namespace

void HilferProblem::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (dim == 0) throw DomainError("dimension must be at least 1");
  if (y0_tilde.size() != dim) throw MismatchError("y0_tilde size does not match dimension");
  if (!finite_all(y0_tilde)) throw DomainError("y0_tilde must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(T) || !(T > epsilon)) {
    throw DomainError("require 0 <= epsilon < T");
  }
  if (beta < 1.0 && epsilon == 0.0) {
    throw DomainError("epsilon > 0 is required unless beta = 1");
  }
  if (!rhs && !spline_rhs) throw DomainError("problem has no right-hand side");
  if (lipschitz_bound && !(*lipschitz_bound >= 0.0)) {
    throw DomainError("lipschitz bound must be nonnegative");
  }
}

GammaParam gamma_param(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  return {alpha + beta - alpha * beta};
}

void SolverConfig::validate() const {
  if (q < 1) throw DomainError("spline order q must be at least 1");
  if (q_prime < q) throw DomainError("computation order q' must be at least q");
  if (!(eps_it > 0.0)) throw DomainError("eps_it must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (!(knot_c > 1.0)) throw DomainError("knot growth bound c must exceed 1");
  if (!(h_max > 0.0)) throw DomainError("h_max must be positive");
}

std::size_t IterationLog::total_iterations() const {
  return std::accumulate(iterations.begin(), iterations.end(), std::size_t{0});
}

double IterationLog::mean_iterations() const {
  if (iterations.empty()) return 0.0;
  return static_cast<double>(total_iterations()) / static_cast<double>(iterations.size());
}

KnotCollection geometric_knots(double epsilon, double T, GammaParam gamma, double c,
                               double h_max) {
  if (!(c > 1.0)) throw DomainError("knot growth bound c must exceed 1");
  if (!(h_max > 0.0)) throw DomainError("h_max must be positive");
  if (!(epsilon >= 0.0) || !(T > epsilon)) throw DomainError("require 0 <= epsilon < T");
  const double g = gamma.value;
  if (g < 1.0 && epsilon == 0.0) {
    throw DomainError("degenerate knot rule: epsilon = 0 with gamma < 1 gives zero knot size");
  }
  const double ratio = g < 1.0 ? std::pow(c, 1.0 / (1.0 - g) - 1.0) : 0.0;
  std::vector<double> breaks{epsilon};
  double t = epsilon;
  for (;;) {
    const double h = g < 1.0 ? std::min(h_max, ratio * t) : h_max;
    if (T - t <= h * (1.0 + 1e-9)) {
      breaks.push_back(T);
      break;
    }
    t += h;
    breaks.push_back(t);
  }
  return KnotCollection(std::move(breaks));
}

ContractionReport contraction_check(double k_norm, const KnotCollection& knots, GammaParam gamma,
                                    double alpha, unsigned q) {
  if (!(k_norm >= 0.0)) throw DomainError("Lipschitz norm must be nonnegative");
  if (q < 1) throw DomainError("spline order q must be at least 1");
  ContractionReport report{std::vector<double>(knots.intervals(), 0.0), true};
  if (k_norm == 0.0) return report;
  const double g1 = specfun::gamma_fn(alpha + 1.0);
  const double sq = std::sqrt(static_cast<double>(q));
  for (std::size_t i = 0; i < knots.intervals(); ++i) {
    const double h = knots.width(i);
    const double psi = (2.5 * std::pow(h / sq, alpha) + std::pow(h, alpha)) / g1;
    const double pre = gamma.value == 1.0 ? 1.0 : std::pow(1.0 + h / knots.left(i), 1.0 - gamma.value);
    report.factors[i] = pre * psi * k_norm;
    if (!(report.factors[i] < 1.0)) report.satisfied = false;
  }
  return report;
}

double estimate_lipschitz(const PointRhs& rhs, double t, std::span<const double> y,
                          double rel_step) {
  const std::size_t d = y.size();
  std::vector<double> base(d), pert(d), yp(y.begin(), y.end());
  rhs(t, y, base);
  std::vector<double> row_sums(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double step = rel_step * std::max(1.0, std::abs(y[k]));
    yp[k] = y[k] + step;
    rhs(t, yp, pert);
    yp[k] = y[k];
    for (std::size_t m = 0; m < d; ++m) row_sums[m] += std::abs((pert[m] - base[m]) / step);
  }
  return d == 0 ? 0.0 : *std::max_element(row_sums.begin(), row_sums.end());
}

namespace {

class KnotStepper {
 public:
  KnotStepper(const HilferProblem& p, const SolverConfig& c, const KnotCollection& knots)
      : p_(p),
        c_(c),
        knots_(knots),
        g_(gamma_param(p.alpha, p.beta).value),
        bqp_(bernstein_basis_matrix(c.q_prime)),
        eval_(bernstein_eval_matrix(c.q, c.q_prime)) {}

  double gamma() const { return g_; }

  // Monomial coefficients (order q') of the composed integrand on knot i, one
  // row per dimension, from the v-coefficients `a` (d x (q+1)).
  Matrix integrand(std::size_t i, const Matrix& a) const {
    const unsigned q = c_.q, qp = c_.q_prime;
    const std::size_t d = p_.dim;
    Matrix ycoef(d, q + 1);
    for (unsigned j = 0; j <= q; ++j) {
      const double tau = j == q ? knots_.right(i) : knots_.left(i) + j * knots_.width(i) / q;
      const double w = weight(tau, g_ - 1.0);
      for (std::size_t m = 0; m < d; ++m) ycoef(m, j) = w * a(m, j);
    }
    Matrix samples(d, qp + 1);
    if (p_.spline_rhs) {
      const KnotCollection piece = knots_.slice(i, i);
      std::vector<BernsteinSpline> ys;
      ys.reserve(d);
      for (std::size_t m = 0; m < d; ++m) {
        Matrix row(1, q + 1);
        for (unsigned j = 0; j <= q; ++j) row(0, j) = ycoef(m, j);
        ys.emplace_back(piece, q, std::move(row));
      }
      const auto out = p_.spline_rhs(ys);
      if (out.size() != d) throw MismatchError("spline rhs returned wrong number of components");
      for (std::size_t m = 0; m < d; ++m) {
        if (out[m].order() != qp || out[m].coeffs().rows() != 1) {
          throw MismatchError("spline rhs must return single-piece splines of order q'");
        }
        // The exact product comes back as control points; sample it at the
        // order-q' nodes to return to the node-value convention.
        for (unsigned j = 0; j <= qp; ++j) samples(m, j) = out[m].eval_local(0, double(j) / qp);
      }
    } else {
      std::vector<double> y(d), f(d);
      for (unsigned jp = 0; jp <= qp; ++jp) {
        const double tau =
            jp == qp ? knots_.right(i) : knots_.left(i) + jp * knots_.width(i) / qp;
        for (std::size_t m = 0; m < d; ++m) {
          double acc = 0.0;
          for (unsigned j = 0; j <= q; ++j) acc += ycoef(m, j) * eval_(j, jp);
          y[m] = acc;
        }
        p_.rhs(tau, y, f);
        for (std::size_t m = 0; m < d; ++m) samples(m, jp) = f[m];
      }
    }
    if (!finite_all(std::as_const(samples).data())) {
      std::ostringstream os;
      os << "non-finite right-hand side on knot " << i;
      throw NonFiniteError(os.str());
    }
    return multiply(samples, bqp_);
  }

 private:
  const HilferProblem& p_;
  const SolverConfig& c_;
  const KnotCollection& knots_;
  double g_;
  Matrix bqp_;
  Matrix eval_;
};

double knot_contraction_factor(const HilferProblem& p, const SolverConfig& c,
                               const KnotCollection& knots, std::size_t i, const Matrix& a,
                               double g) {
  double k = std::numeric_limits<double>::quiet_NaN();
  if (p.lipschitz_bound) {
    k = *p.lipschitz_bound;
  } else if (p.rhs) {
    std::vector<double> y(p.dim);
    const double w = weight(knots.left(i), g - 1.0);
    for (std::size_t m = 0; m < p.dim; ++m) y[m] = w * a(m, 0);
    k = estimate_lipschitz(p.rhs, knots.left(i), y);
  }
  if (!std::isfinite(k)) return k;
  return contraction_check(k, knots.slice(i, i), {g}, p.alpha, c.q).factors.front();
}

}  // namespace

SolutionApprox solve(const HilferProblem& problem, const SolverConfig& config,
                     const KnotCollection& knots) {
  problem.validate();
  config.validate();
  const double tol = 1e-12 * std::max(1.0, std::abs(problem.T));
  if (std::abs(knots.front() - problem.epsilon) > tol || std::abs(knots.back() - problem.T) > tol) {
    throw DomainError("knots must span [epsilon, T]");
  }

  const std::size_t d = problem.dim;
  const std::size_t k = knots.intervals();
  const unsigned q = config.q, qp = config.q_prime;
  KnotStepper stepper(problem, config, knots);
  const double g = stepper.gamma();

  if (problem.lipschitz_bound) {
    const auto report = contraction_check(*problem.lipschitz_bound, knots, {g}, problem.alpha, q);
    if (!report.satisfied) {
      const double worst = *std::max_element(report.factors.begin(), report.factors.end());
      std::ostringstream os;
      os << "contraction condition not met (largest factor " << worst << ")";
      warn(os.str());
    }
  }

  std::vector<double> v0(d);
  const double gg = specfun::gamma_fn(g);
  for (std::size_t m = 0; m < d; ++m) v0[m] = problem.y0_tilde[m] / gg;

  std::vector<Matrix> coeffs(d, Matrix(k, q + 1));
  std::vector<Matrix> history(d, Matrix(k, qp + 1));
  IterationLog log;
  log.iterations.reserve(k);
  log.changes.reserve(k);

  Matrix a(d, q + 1), next(d, q + 1);
  std::vector<double> tau(q + 1), wout(q + 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (unsigned j = 0; j <= q; ++j) {
      tau[j] = j == q ? knots.right(i) : knots.left(i) + j * knots.width(i) / q;
      wout[j] = weight(tau[j], 1.0 - g);
    }
    for (std::size_t m = 0; m < d; ++m) {
      const double seed = i == 0 ? v0[m] : coeffs[m](i - 1, q);
      for (unsigned j = 0; j <= q; ++j) a(m, j) = seed;
    }

    std::vector<std::vector<double>> past(d, std::vector<double>(q + 1, 0.0));
    if (i > 0) {
      const auto jb = integration_tensor(knots, 0, i - 1, qp, problem.alpha, tau);
      for (std::size_t m = 0; m < d; ++m) past[m] = contract(history[m], 0, jb);
    }
    const auto jc = integration_tensor(knots, i, i, qp, problem.alpha, tau);

    std::vector<double> changes;
    for (;;) {
      const Matrix integ = stepper.integrand(i, a);
      double change = 0.0;
      for (std::size_t m = 0; m < d; ++m) {
        Matrix row(1, qp + 1);
        for (unsigned l = 0; l <= qp; ++l) row(0, l) = integ(m, l);
        const auto cur = contract(row, jc);
        next(m, 0) = a(m, 0);  // pinned: continuity with the previous knot
        for (unsigned j = 1; j <= q; ++j) {
          next(m, j) = v0[m] + wout[j] * (past[m][j] + cur[j]);
          change = std::max(change, std::abs(next(m, j) - a(m, j)));
        }
      }
      if (!finite_all(std::as_const(next).data())) {
        std::ostringstream os;
        os << "non-finite coefficient on knot " << i;
        throw NonFiniteError(os.str());
      }
      std::swap(a, next);
      changes.push_back(change);
      if (change < config.eps_it) break;
      if (changes.size() >= config.max_iter) {
        if (!config.cap_is_error) break;
        const double factor = knot_contraction_factor(problem, config, knots, i, a, g);
        std::ostringstream os;
        os << "Picard iteration did not converge on knot " << i << " after " << config.max_iter
           << " iterations (last change " << change << ", contraction factor " << factor << ")";
        throw NonConvergenceError(os.str(), i, factor);
      }
    }

    const Matrix integ = stepper.integrand(i, a);
    for (std::size_t m = 0; m < d; ++m) {
      for (unsigned j = 0; j <= q; ++j) coeffs[m](i, j) = a(m, j);
      for (unsigned l = 0; l <= qp; ++l) history[m](i, l) = integ(m, l);
    }
    log.iterations.push_back(changes.size());
    log.changes.push_back(std::move(changes));
  }

  std::vector<BernsteinSpline> parts;
  parts.reserve(d);
  for (std::size_t m = 0; m < d; ++m) parts.emplace_back(knots, q, std::move(coeffs[m]));
  return SolutionApprox{VectorSpline(std::move(parts)), {g}, std::move(v0), problem.epsilon,
                        std::move(log)};
}

std::vector<double> eval_solution(const SolutionApprox& sol, double t) {
  const auto& knots = sol.v.knots();
  if (!(t >= knots.front() && t <= knots.back())) {
    throw DomainError("evaluation time outside [epsilon, T]");
  }
  auto v = sol.v(t);
  const double w = weight(t, sol.gamma.value - 1.0);
  for (auto& x : v) x *= w;
  return v;
}

}  // namespace hilfer
