#include "hilfer/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "hilfer/baselines.hpp"
#include "hilfer/errors.hpp"

namespace hilfer {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> uniform_points(double a, double b, std::size_t n) {
  std::vector<double> pts(n);
  for (std::size_t j = 1; j <= n; ++j) {
    pts[j - 1] = j == n ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(n);
  }
  return pts;
}

void fill_solver_meta(RunMeta& meta, const SolutionApprox& sol, double seconds) {
  meta.knots = sol.v.knots().intervals();
  meta.h = sol.v.knots().max_width();
  meta.avg_iter_per_knot = sol.log.mean_iterations();
  const auto total = sol.log.total_iterations();
  meta.avg_time_per_iter_s = total ? seconds / static_cast<double>(total) : 0.0;
}

}  // namespace

ErrorSummary weighted_errors(const Evaluable& y_num, const Evaluable& y_ref, GammaParam gamma,
                             std::span<const double> points,
                             std::vector<std::pair<double, double>>* per_point) {
  if (points.empty()) throw DomainError("no evaluation points");
  const double p = 1.0 - gamma.value;
  std::vector<double> errs(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    const double t = points[n];
    if (p != 0.0 && !(t > 0.0)) throw DomainError("weighted error needs t > 0");
    const auto a = y_num(t);
    const auto b = y_ref(t);
    if (a.size() != b.size()) throw MismatchError("solutions differ in dimension");
    const double w = p == 0.0 ? 1.0 : std::pow(t, p);
    double e = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) e = std::max(e, std::abs(w * (a[m] - b[m])));
    errs[n] = e;
  }
  if (per_point) {
    per_point->clear();
    per_point->reserve(points.size());
    for (std::size_t n = 0; n < points.size(); ++n) per_point->emplace_back(points[n], errs[n]);
  }
  return {pairwise_sum(errs) / static_cast<double>(errs.size()),
          *std::max_element(errs.begin(), errs.end())};
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---- polynomial problem ----

HilferProblem make_poly_problem(const PolyStudy& s, double epsilon) {
  HilferProblem p;
  p.dim = 1;
  p.alpha = s.alpha;
  p.beta = s.beta;
  p.y0_tilde = {s.y0_tilde};
  p.T = s.T;
  p.epsilon = epsilon;
  const double k = s.k;
  p.rhs = [k](double t, std::span<const double>, std::span<double> out) { out[0] = std::pow(t, k); };
  p.lipschitz_bound = 0.0;
  return p;
}

ErrorReport run_poly_case(const PolyStudy& s, double h, unsigned q, double epsilon) {
  const auto problem = make_poly_problem(s, epsilon);
  SolverConfig cfg;
  cfg.q = q;
  cfg.q_prime = q;
  cfg.eps_it = s.eps_it;
  cfg.max_iter = s.max_iter;
  const auto knots = KnotCollection::uniform(epsilon, s.T, h);

  const auto start = Clock::now();
  const auto sol = solve(problem, cfg, knots);
  const double elapsed = seconds_since(start);

  const GammaParam g = sol.gamma;
  const auto points = uniform_points(epsilon, s.T, s.grid_points);
  ErrorReport r;
  const auto err = weighted_errors(
      [&](double t) { return eval_solution(sol, t); },
      [&](double t) {
        return std::vector<double>{analytic_poly_solution(s.alpha, s.beta, s.k, s.y0_tilde, t)};
      },
      g, points);
  r.mean_weighted_error = err.mean;
  r.sup_weighted_error = err.sup;
  r.wall_time_s = elapsed;
  r.meta.method = "bs";
  r.meta.q = q;
  r.meta.epsilon = epsilon;
  r.meta.beta = s.beta;
  fill_solver_meta(r.meta, sol, elapsed);
  r.x_at_eps = eval_solution(sol, epsilon)[0];
  return r;
}

std::vector<ErrorReport> run_convergence_h(const PolyStudy& s, std::span<const double> hs,
                                           unsigned q) {
  std::vector<ErrorReport> out(hs.size());
  parallel_for(hs.size(), s.jobs, [&](std::size_t i) {
    out[i] = run_poly_case(s, hs[i], q, s.epsilon);
    out[i].param = hs[i];
  });
  return out;
}

std::vector<ErrorReport> run_convergence_q(const PolyStudy& s, std::span<const unsigned> qs,
                                           double h) {
  std::vector<ErrorReport> out(qs.size());
  parallel_for(qs.size(), s.jobs, [&](std::size_t i) {
    out[i] = run_poly_case(s, h, qs[i], s.epsilon);
    out[i].param = qs[i];
  });
  return out;
}

std::vector<ErrorReport> run_convergence_eps(const PolyStudy& s, std::span<const double> epss,
                                             unsigned q, double h) {
  std::vector<ErrorReport> out(epss.size());
  parallel_for(epss.size(), s.jobs, [&](std::size_t i) {
    out[i] = run_poly_case(s, h, q, epss[i]);
    out[i].param = epss[i];
  });
  return out;
}

double fit_log2_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("need at least two points to fit");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log fit needs positive data");
    const double lx = std::log2(x[i]), ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("degenerate abscissae in log fit");
  return (n * sxy - sx * sy) / den;
}

// ---- linear Caputo problem ----

HilferProblem make_linear_problem(const LinearStudy& s) {
  HilferProblem p;
  p.dim = 1;
  p.alpha = s.alpha;
  p.beta = 1.0;
  p.y0_tilde = {s.x0};
  p.T = s.T;
  p.epsilon = 0.0;
  const double a = s.a;
  p.rhs = [a](double, std::span<const double> y, std::span<double> out) { out[0] = a * y[0]; };
  return p;
}

ErrorReport run_linear_bs(const LinearStudy& s, double h, std::optional<std::size_t> cap) {
  const auto problem = make_linear_problem(s);
  SolverConfig cfg;
  cfg.q = s.q;
  cfg.q_prime = s.q;
  cfg.eps_it = s.eps_it;
  cfg.max_iter = cap.value_or(s.max_iter);
  cfg.cap_is_error = !cap.has_value();
  const auto knots = KnotCollection::uniform(0.0, s.T, h);

  const auto start = Clock::now();
  const auto sol = solve(problem, cfg, knots);
  const double elapsed = seconds_since(start);

  ErrorReport r;
  const auto bp = knots.breakpoints();
  const auto err = weighted_errors(
      [&](double t) { return eval_solution(sol, t); },
      [&](double t) { return std::vector<double>{ml_solution_linear(s.alpha, s.a, s.x0, t, s.ml_terms)}; },
      sol.gamma, bp);
  r.param = h;
  r.mean_weighted_error = err.mean;
  r.sup_weighted_error = err.sup;
  r.wall_time_s = elapsed;
  r.meta.method = "bs";
  r.meta.q = s.q;
  fill_solver_meta(r.meta, sol, elapsed);
  return r;
}

ErrorReport run_linear_pc(const LinearStudy& s, double h) {
  const double a = s.a;
  const PointRhs f = [a](double, std::span<const double> y, std::span<double> out) {
    out[0] = a * y[0];
  };
  const std::vector<double> x0{s.x0};
  const auto start = Clock::now();
  const auto grid = abm_solve(f, s.alpha, x0, s.T, h);
  const double elapsed = seconds_since(start);

  std::vector<double> errs(grid.times.size());
  for (std::size_t n = 0; n < grid.times.size(); ++n) {
    errs[n] = std::abs(grid.values(0, n) -
                       ml_solution_linear(s.alpha, s.a, s.x0, grid.times[n], s.ml_terms));
  }
  ErrorReport r;
  r.param = h;
  r.mean_weighted_error = pairwise_sum(errs) / static_cast<double>(errs.size());
  r.sup_weighted_error = *std::max_element(errs.begin(), errs.end());
  r.wall_time_s = elapsed;
  r.meta.method = "pc";
  r.meta.h = h;
  r.meta.knots = grid.times.size() - 1;
  return r;
}

std::vector<PcRow> run_pc_comparison(const LinearStudy& s, std::span<const double> hs) {
  std::vector<PcRow> out(hs.size());
  parallel_for(hs.size(), s.jobs, [&](std::size_t i) {
    out[i].pc = run_linear_pc(s, hs[i]);
    out[i].bs = run_linear_bs(s, hs[i], std::nullopt);
  });
  return out;
}

std::vector<ErrorReport> run_iteration_cap_sweep(const LinearStudy& s,
                                                 std::span<const std::size_t> caps, double h) {
  std::vector<ErrorReport> out(caps.size());
  parallel_for(caps.size(), s.jobs, [&](std::size_t i) {
    out[i] = run_linear_bs(s, h, caps[i]);
    out[i].param = static_cast<double>(caps[i]);
  });
  return out;
}

// ---- Van der Pol ----

void vdp_rhs(double mu, std::span<const double> y, std::span<double> out) {
  out[0] = y[1];
  out[1] = y[2];
  out[2] = y[3];
  out[3] = mu * (1.0 - y[0] * y[0]) * y[1] - y[0];
}

HilferProblem make_vdp_problem(double beta, const VdpStudy& s) {
  if (!(s.mu > 0.0)) throw DomainError("mu must be positive");
  HilferProblem p;
  p.dim = 4;
  p.alpha = 0.5;
  p.beta = beta;
  p.y0_tilde = {s.x0, 0.0, 0.0, 0.0};
  p.T = s.T;
  p.epsilon = s.epsilon;
  const double mu = s.mu;
  p.rhs = [mu](double, std::span<const double> y, std::span<double> out) { vdp_rhs(mu, y, out); };
  p.spline_rhs = [mu](const std::vector<BernsteinSpline>& y) {
    const unsigned q3 = 3 * y[0].order();
    const auto x2y = spline_product(spline_product(y[0], y[0]), y[1]);
    const auto yy = elevate(y[1], q3);
    std::vector<BernsteinSpline> out;
    out.reserve(4);
    out.push_back(yy);
    out.push_back(elevate(y[2], q3));
    out.push_back(elevate(y[3], q3));
    out.push_back(combine(1.0, scale(mu, combine(1.0, yy, -1.0, x2y)), -1.0, elevate(y[0], q3)));
    return out;
  };
  return p;
}

VdpReport run_vdp(double beta, const VdpStudy& s) {
  const auto problem = make_vdp_problem(beta, s);
  SolverConfig cfg;
  cfg.q = s.q;
  cfg.q_prime = 3 * s.q;
  cfg.eps_it = s.eps_it;
  cfg.max_iter = s.max_iter;
  cfg.knot_c = s.knot_c;
  cfg.h_max = s.h_max;
  const GammaParam g = gamma_param(problem.alpha, beta);
  const auto knots = geometric_knots(problem.epsilon, s.T, g, s.knot_c, s.h_max);

  const auto start = Clock::now();
  const auto sol = solve(problem, cfg, knots);
  const double elapsed = seconds_since(start);

  VdpReport r;
  r.stats.param = beta;
  r.stats.wall_time_s = elapsed;
  r.stats.x_at_eps = eval_solution(sol, problem.epsilon)[0];
  r.stats.meta.method = "bs";
  r.stats.meta.q = s.q;
  r.stats.meta.epsilon = problem.epsilon;
  r.stats.meta.beta = beta;
  fill_solver_meta(r.stats.meta, sol, elapsed);

  for (double t : uniform_points(s.T / 2.0, s.T, 5000)) {
    r.late_amplitude = std::max(r.late_amplitude, std::abs(eval_solution(sol, t)[0]));
  }
  const std::size_t n = std::max<std::size_t>(2, s.trajectory_points);
  r.trajectory.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = j + 1 == n ? s.T
                                : problem.epsilon + (s.T - problem.epsilon) * static_cast<double>(j) /
                                                        static_cast<double>(n - 1);
    const auto y = eval_solution(sol, t);
    r.trajectory.push_back({t, y[0], y[1]});
  }
  return r;
}

std::vector<VdpReport> run_vdp_sweep(std::span<const double> betas, const VdpStudy& s) {
  std::vector<VdpReport> out(betas.size());
  parallel_for(betas.size(), s.jobs, [&](std::size_t i) { out[i] = run_vdp(betas[i], s); });
  return out;
}

void write_reports_csv(std::ostream& os, std::span<const ErrorReport> rows, CsvColumns cols) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(16) << std::defaultfloat;
  os << "param,mean_weighted_error,sup_weighted_error,total_time_s";
  if (cols.x_at_eps) os << ",x_at_eps";
  if (cols.knots) os << ",knots";
  if (cols.avg_iter) os << ",avg_iter_per_knot";
  if (cols.method) os << ",method";
  os << '\n';
  for (const auto& r : rows) {
    os << r.param << ',' << r.mean_weighted_error << ',' << r.sup_weighted_error << ','
       << r.wall_time_s;
    if (cols.x_at_eps) {
      os << ',';
      if (r.x_at_eps) os << *r.x_at_eps;
    }
    if (cols.knots) os << ',' << r.meta.knots;
    if (cols.avg_iter) os << ',' << r.meta.avg_iter_per_knot;
    if (cols.method) os << ',' << r.meta.method;
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace hilfer
