// Command-line driver: single solves, convergence sweeps and the
// predictor-corrector comparison.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hilfer/errors.hpp"
#include "hilfer/experiments.hpp"
#include "hilfer/serialize.hpp"
#include "hilfer/solver.hpp"

namespace {

using namespace hilfer;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string problem = "poly";
  double alpha = 0.5;
  std::optional<double> beta, y0, T, eps, h;
  std::string knot_rule;
  std::optional<unsigned> q;
  std::optional<unsigned> q_prime;
  double tol = 1e-12;
  std::size_t max_iter = 200;
  std::string sweep = "h";
  std::string values;
  std::string cap_iterations;
  unsigned jobs = 1;
  std::string out;
  std::string format = "csv";
  double k = 0.9;
  double a = -1.0;
  double mu = 1.0;
  std::size_t samples = 1001;
};

void add_common(CLI::App* sub, Options& o) {
  sub->set_help_flag("--help", "print this help message and exit");  // -h is taken by --h
  // Config-file keys are spliced in ahead of the command line, so the last
  // occurrence (the explicit flag) wins.
  sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sub->add_option("--config", "flat key=value file; command-line flags take precedence");
  sub->add_option("--alpha", o.alpha, "derivative order in (0, 1)");
  sub->add_option("--y0", o.y0, "weighted initial value (x0 for Caputo problems)");
  sub->add_option("--T", o.T, "time horizon");
  sub->add_option("--q", o.q, "spline order");
  sub->add_option("--q-prime", o.q_prime, "computation order for the composed integrand");
  sub->add_option("--tol", o.tol, "Picard coefficient tolerance");
  sub->add_option("--max-iter", o.max_iter, "Picard iteration cap per knot");
  sub->add_option("--jobs", o.jobs, "worker threads for independent sweep rows");
  sub->add_option("--out", o.out, "output path (prefix for solve)");
  sub->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw DomainError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw DomainError("empty value list");
  return out;
}

// "a..b" (inclusive integer range) or a comma list.
std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const auto lo = parse_doubles(s.substr(0, dots)).front();
    const auto hi = parse_doubles(s.substr(dots + 2)).front();
    if (!(lo >= 1 && hi >= lo) || lo != std::floor(lo) || hi != std::floor(hi)) {
      throw DomainError("iteration range must be a..b with integers 1 <= a <= b");
    }
    for (auto n = static_cast<std::size_t>(lo); n <= static_cast<std::size_t>(hi); ++n) {
      out.push_back(n);
    }
    return out;
  }
  for (double v : parse_doubles(s)) {
    if (!(v >= 1) || v != std::floor(v)) throw DomainError("iteration counts must be integers >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> powers_of_two(int from, int to) {
  std::vector<double> out;
  for (int e = from; e >= to; --e) out.push_back(std::ldexp(1.0, e));
  return out;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw DomainError("cannot open output file '" + path + "'");
  return file;
}

nlohmann::json reports_json(std::span<const ErrorReport> rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"param", r.param},
                     {"mean_weighted_error", r.mean_weighted_error},
                     {"sup_weighted_error", r.sup_weighted_error},
                     {"total_time_s", r.wall_time_s},
                     {"method", r.meta.method},
                     {"h", r.meta.h},
                     {"q", r.meta.q},
                     {"epsilon", r.meta.epsilon},
                     {"beta", r.meta.beta},
                     {"knots", r.meta.knots},
                     {"avg_iter_per_knot", r.meta.avg_iter_per_knot},
                     {"avg_time_per_iter_s", r.meta.avg_time_per_iter_s}};
    if (r.x_at_eps) j["x_at_eps"] = *r.x_at_eps;
    arr.push_back(std::move(j));
  }
  return arr;
}

void emit_table(const Options& o, std::span<const ErrorReport> rows, CsvColumns cols) {
  std::ofstream file;
  auto& os = open_out(o.out, file);
  if (o.format == "json") {
    os << reports_json(rows).dump(2) << '\n';
  } else {
    write_reports_csv(os, rows, cols);
  }
}

std::ostream& summary_stream(const Options& o) {
  return o.out.empty() || o.out == "-" ? std::cerr : std::cout;
}

// ---- solve ----

struct SolveSetup {
  HilferProblem problem;
  SolverConfig config;
  KnotCollection knots;
};

SolveSetup build_solve(const Options& o) {
  SolverConfig cfg;
  const unsigned q = o.q.value_or(1);
  cfg.q = q;
  cfg.eps_it = o.tol;
  cfg.max_iter = o.max_iter;
  HilferProblem p;
  double default_h = 0.5;
  bool geometric = false;

  if (o.problem == "poly") {
    PolyStudy s;
    s.alpha = o.alpha;
    s.beta = o.beta.value_or(0.5);
    s.k = o.k;
    s.y0_tilde = o.y0.value_or(1.0);
    s.T = o.T.value_or(4.0);
    p = make_poly_problem(s, o.eps.value_or(s.beta == 1.0 ? 0.0 : 1e-10));
    cfg.q_prime = o.q_prime.value_or(q);
  } else if (o.problem == "linear") {
    if (o.beta && *o.beta != 1.0) throw DomainError("the linear problem is Caputo: beta must be 1");
    if (o.eps && *o.eps != 0.0) throw DomainError("the linear problem is solved with eps = 0");
    LinearStudy s;
    s.alpha = o.alpha;
    s.a = o.a;
    s.x0 = o.y0.value_or(1.0);
    s.T = o.T.value_or(15.0);
    p = make_linear_problem(s);
    cfg.q_prime = o.q_prime.value_or(q);
    default_h = 0.0625;
  } else if (o.problem == "vdp") {
    if (o.alpha != 0.5) throw DomainError("the Van der Pol system is fixed at alpha = 0.5");
    VdpStudy s;
    s.mu = o.mu;
    s.x0 = o.y0.value_or(1.0);
    s.T = o.T.value_or(100.0);
    s.epsilon = o.eps.value_or(1e-5);
    p = make_vdp_problem(o.beta.value_or(1.0), s);
    cfg.q_prime = o.q_prime.value_or(3 * q);
    geometric = !o.h;
  } else {
    throw DomainError("unknown problem '" + o.problem + "' (expected poly, linear or vdp)");
  }
  p.validate();

  if (!o.knot_rule.empty()) {
    const auto v = parse_doubles(o.knot_rule);
    if (v.size() != 2) throw DomainError("--knot-rule expects c,h_max");
    if (o.h) throw DomainError("--h and --knot-rule are mutually exclusive");
    cfg.knot_c = v[0];
    cfg.h_max = v[1];
    geometric = true;
  }
  cfg.validate();
  const GammaParam g = gamma_param(p.alpha, p.beta);
  if (geometric) {
    return {p, cfg, geometric_knots(p.epsilon, p.T, g, cfg.knot_c, cfg.h_max)};
  }
  const double h = o.h.value_or(default_h);
  if (!(h > 0.0)) throw DomainError("--h must be positive");
  return {p, cfg, KnotCollection::uniform(p.epsilon, p.T, h)};
}

int cmd_solve(const Options& o) {
  const auto setup = build_solve(o);
  const auto start = std::chrono::steady_clock::now();
  const auto sol = solve(setup.problem, setup.config, setup.knots);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string prefix = o.out.empty() ? "solution" : o.out;
  {
    std::ofstream js(prefix + ".json");
    if (!js) throw DomainError("cannot open '" + prefix + ".json'");
    js << std::setprecision(17) << solution_to_json(sol).dump(2) << '\n';
  }
  {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw DomainError("cannot open '" + prefix + ".csv'");
    csv << std::setprecision(16) << "t";
    for (std::size_t m = 0; m < setup.problem.dim; ++m) csv << ",y_" << (m + 1);
    csv << '\n';
    const std::size_t n = std::max<std::size_t>(2, o.samples);
    const double a = setup.knots.front(), b = setup.knots.back();
    for (std::size_t j = 0; j < n; ++j) {
      const double t = j + 1 == n ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
      csv << t;
      for (double y : eval_solution(sol, t)) csv << ',' << y;
      csv << '\n';
    }
  }
  std::cout << std::setprecision(6) << "problem=" << o.problem << " beta=" << setup.problem.beta
            << " gamma=" << sol.gamma.value << " knots=" << setup.knots.intervals()
            << " x_at_eps=" << eval_solution(sol, setup.problem.epsilon)[0]
            << " avg_iter_per_knot=" << sol.log.mean_iterations() << " time_s=" << elapsed
            << '\n';
  return 0;
}

// ---- converge ----

int cmd_converge(const Options& o) {
  PolyStudy s;
  s.alpha = o.alpha;
  s.beta = o.beta.value_or(0.5);
  s.k = o.k;
  s.y0_tilde = o.y0.value_or(1.0);
  s.T = o.T.value_or(4.0);
  s.epsilon = o.eps.value_or(1e-10);
  s.eps_it = o.tol;
  s.max_iter = o.max_iter;
  s.jobs = o.jobs;
  make_poly_problem(s, s.epsilon).validate();

  std::vector<ErrorReport> rows;
  CsvColumns cols;
  std::ostringstream summary;
  summary << std::setprecision(6);
  if (o.sweep == "h") {
    const auto hs = o.values.empty() ? powers_of_two(0, -8) : parse_doubles(o.values);
    rows = run_convergence_h(s, hs, o.q.value_or(1));
    cols.knots = true;
    std::vector<double> errs;
    for (const auto& r : rows) errs.push_back(r.mean_weighted_error);
    summary << "slope_log2_mean_error_vs_h=" << fit_log2_slope(hs, errs);
  } else if (o.sweep == "q") {
    std::vector<unsigned> qs;
    if (o.values.empty()) {
      qs = {1, 2, 4, 8, 16};
    } else {
      for (double v : parse_doubles(o.values)) {
        if (!(v >= 1) || v != std::floor(v)) throw DomainError("spline orders must be integers >= 1");
        qs.push_back(static_cast<unsigned>(v));
      }
    }
    rows = run_convergence_q(s, qs, o.h.value_or(0.5));
    std::vector<double> xs, errs;
    for (const auto& r : rows) {
      xs.push_back(r.param);
      errs.push_back(r.mean_weighted_error);
    }
    summary << "slope_log2_mean_error_vs_q=" << fit_log2_slope(xs, errs);
  } else if (o.sweep == "eps") {
    const auto es = o.values.empty() ? powers_of_two(-1, -9) : parse_doubles(o.values);
    rows = run_convergence_eps(s, es, o.q.value_or(2), o.h.value_or(0.5));
    cols.x_at_eps = true;
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double prev = rows[i - 1].mean_weighted_error;
      worst = std::max(worst, std::abs(rows[i].mean_weighted_error - prev) / prev);
    }
    summary << "max_consecutive_relative_change=" << worst;
  } else {
    throw DomainError("--sweep must be h, q or eps");
  }
  emit_table(o, rows, cols);
  summary_stream(o) << summary.str() << '\n';
  return 0;
}

// ---- compare-pc ----

int cmd_compare_pc(const Options& o) {
  LinearStudy s;
  s.alpha = o.alpha;
  s.a = o.a;
  s.x0 = o.y0.value_or(1.0);
  s.T = o.T.value_or(15.0);
  s.q = o.q.value_or(1);
  s.eps_it = o.tol;
  s.max_iter = o.max_iter;
  s.jobs = o.jobs;
  make_linear_problem(s).validate();

  std::vector<ErrorReport> rows;
  CsvColumns cols;
  cols.knots = true;
  cols.avg_iter = true;
  cols.method = true;
  if (!o.cap_iterations.empty()) {
    const double h = o.h.value_or(0.05);
    rows = run_iteration_cap_sweep(s, parse_counts(o.cap_iterations), h);
    rows.push_back(run_linear_pc(s, h));
  } else {
    const auto hs = o.values.empty() ? (o.h ? std::vector<double>{*o.h} : powers_of_two(0, -8))
                                     : parse_doubles(o.values);
    for (const auto& r : run_pc_comparison(s, hs)) {
      rows.push_back(r.pc);
      rows.push_back(r.bs);
    }
  }
  emit_table(o, rows, cols);
  return 0;
}

// Expands `--config FILE` into `--key value` pairs placed right after the
// subcommand name. Unknown keys then fail like unknown flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> extra;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DomainError("config line without '=': " + line);
      auto trim = [](std::string x) {
        const auto a = x.find_first_not_of(" \t\r");
        const auto b = x.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : x.substr(a, b - a + 1);
      };
      const auto key = trim(line.substr(0, eq));
      if (key.empty() || key == "config") throw DomainError("bad config key in: " + line);
      extra.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
    --i;
  }
  if (!extra.empty() && !args.empty()) {
    args.insert(args.begin() + 1, extra.begin(), extra.end());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bernstein-spline solver for Hilfer fractional initial value problems", "hilfer"};
  app.set_help_flag("-h,--help", "print this help message and exit");
  app.require_subcommand(1);
  Options o;

  auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write solution JSON + trajectory CSV");
  add_common(solve_cmd, o);
  solve_cmd->add_option("--problem", o.problem, "poly | linear | vdp")
      ->check(CLI::IsMember({"poly", "linear", "vdp"}));
  solve_cmd->add_option("--beta", o.beta, "derivative type in [0, 1]");
  solve_cmd->add_option("--eps", o.eps, "time shift epsilon");
  auto* h_opt = solve_cmd->add_option("--h", o.h, "uniform knot width");
  solve_cmd->add_option("--knot-rule", o.knot_rule, "geometric knots: c,h_max")->excludes(h_opt);
  solve_cmd->add_option("--k", o.k, "exponent of the poly problem's rhs t^k");
  solve_cmd->add_option("--a", o.a, "coefficient of the linear problem's rhs a*x");
  solve_cmd->add_option("--mu", o.mu, "Van der Pol damping");
  solve_cmd->add_option("--samples", o.samples, "trajectory rows");

  auto* conv_cmd = app.add_subcommand("converge", "convergence sweep on the poly problem");
  add_common(conv_cmd, o);
  conv_cmd->add_option("--sweep", o.sweep, "h | q | eps")->check(CLI::IsMember({"h", "q", "eps"}));
  conv_cmd->add_option("--values", o.values, "comma-separated sweep values");
  conv_cmd->add_option("--beta", o.beta, "derivative type in [0, 1]");
  conv_cmd->add_option("--eps", o.eps, "time shift epsilon (h and q sweeps)");
  conv_cmd->add_option("--h", o.h, "knot width for q and eps sweeps");
  conv_cmd->add_option("--k", o.k, "exponent of the rhs t^k");

  auto* pc_cmd = app.add_subcommand("compare-pc", "spline solver vs predictor-corrector on D^a x = a x");
  add_common(pc_cmd, o);
  pc_cmd->add_option("--values", o.values, "comma-separated step sizes");
  pc_cmd->add_option("--h", o.h, "single step size (with --cap-iterations: default 0.05)");
  pc_cmd->add_option("--cap-iterations", o.cap_iterations, "N-sweep: a..b or comma list");
  pc_cmd->add_option("--a", o.a, "rate coefficient");

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*solve_cmd) return cmd_solve(o);
    if (*conv_cmd) return cmd_converge(o);
    return cmd_compare_pc(o);
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NonFiniteError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const OverflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::logic_error& e) {  // DomainError, MismatchError
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
