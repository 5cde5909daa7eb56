#include "patchr0/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "patchr0/models.hpp"

namespace patchr0 {

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

void print_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::string row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row += fmt::format("{:>18.12g}", m(i, j));
    }
    fmt::print(os, "{}\n", row);
  }
}

std::string patch_list(const std::vector<std::size_t>& patches) {
  std::string s = "{";
  for (std::size_t k = 0; k < patches.size(); ++k) {
    s += fmt::format("{}{}", k ? "," : "", patches[k] + 1);
  }
  return s + "}";
}

struct Effective {
  std::optional<double> d;
  std::vector<double> grid;
  SweepOptions sweep;
  std::string hash;
};

Effective effective_settings(const CliOptions& cli, const ParsedConfig* parsed) {
  RunConfig run = parsed ? parsed->run : RunConfig{};
  if (cli.d) run.d = cli.d;
  if (cli.grid) run.grid = cli.grid;
  if (cli.steps_per_period) run.solver.steps_per_period = *cli.steps_per_period;
  if (cli.integrator) run.solver.integrator = *cli.integrator;
  if (cli.r0_tolerance) run.r0_tolerance = *cli.r0_tolerance;
  if (cli.threads) run.threads = *cli.threads;
  if (run.solver.steps_per_period < kMinStepsPerPeriod) {
    throw PreconditionError(fmt::format("steps per period must be at least {}", kMinStepsPerPeriod));
  }

  Effective e;
  e.d = run.d;
  e.grid = run.grid ? run.grid->resolve() : default_grid();
  e.sweep.r0.tolerance = run.r0_tolerance;
  e.sweep.r0.solver = run.solver;
  e.sweep.threads = run.threads;

  // Thread count is left out: results do not depend on it.
  std::string settings = parsed ? parsed->content_hash : std::string("builtin-baseline");
  settings += fmt::format(";steps={};integrator={};tol={:.17g};grid=", run.solver.steps_per_period,
                          to_string(run.solver.integrator), run.r0_tolerance);
  for (double d : e.grid) settings += fmt::format("{:.17g},", d);
  e.hash = fnv1a_hex(settings);
  return e;
}

double require_d(const Effective& e, Command c) {
  if (!e.d) {
    throw PreconditionError(fmt::format("'{}' needs a dispersal rate (--d or run.d)", to_string(c)));
  }
  if (!(*e.d >= 0.0)) throw PreconditionError("dispersal rate must be nonnegative");
  return *e.d;
}

void run_reduce(const PeriodicVFProblem& problem, std::ostream& out) {
  const auto basis = build_basis(problem.connectivity());
  std::vector<std::string> zero, leaky;
  for (auto b : basis.lambda0) zero.push_back(patch_list(basis.structure.blocks[b]));
  for (auto b : basis.lambda0c) leaky.push_back(patch_list(basis.structure.blocks[b]));
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + v[k];
    return s.empty() ? std::string("(none)") : s;
  };
  fmt::print(out, "patches: {}\n", basis.size());
  fmt::print(out, "blocks: {}\n", basis.structure.blocks.size());
  fmt::print(out, "lambda0: {}\n", join(zero));
  fmt::print(out, "lambda0c: {}\n", join(leaky));
  fmt::print(out, "alpha0: {}\n", basis.alpha0);
  fmt::print(out, "P:\n");
  print_matrix(out, basis.P);
  fmt::print(out, "Q:\n");
  print_matrix(out, basis.Q);
  fmt::print(out, "residual: {}\n", num(basis_residuals(basis).max()));
}

void run_r0(const PeriodicVFProblem& problem, const R0Options& options, std::ostream& out) {
  const auto r = r0_periodic(problem, options);
  fmt::print(out, "d: {}\n", num(problem.dispersal()));
  fmt::print(out, "r0: {}\n", num(r.value));
  fmt::print(out, "case: {}\n", to_string(r.kind));
  fmt::print(out, "bracket: [{}, {}]\n", num(r.bracket_lo), num(r.bracket_hi));
  fmt::print(out, "iterations: {}\n", r.iterations);
  fmt::print(out, "residual: {}\n", num(r.residual));
}

void emit_csv(const std::string& path, const SweepResult& result, const std::string& hash,
              std::ostream& out) {
  if (path.empty()) {
    write_sweep_csv(out, result, hash);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw PreconditionError("cannot open output file " + path);
  write_sweep_csv(file, result, hash);
  if (!file) throw PreconditionError("failed writing " + path);
}

struct Headline {
  const char* name;
  double computed;
  double reference;
};

int run_figure1(const CliOptions& cli, const Effective& e, std::ostream& out) {
  const auto params = baseline_ross_macdonald();
  const auto problem = build_ross_macdonald(params, 0.0);
  const auto patches = patch_reproduction_ratios(params, e.sweep.r0);
  const auto basis = build_basis(problem.connectivity());
  const double tilde = r0_reduced(problem, basis, e.sweep.r0).value;
  const double bar = r0_time_averaged(problem);

  constexpr double kTol = 2e-3;
  const Headline rows[] = {{"R0 patch 1", patches[0], 1.5340},
                           {"R0 patch 2", patches[1], 1.4478},
                           {"R0 reduced", tilde, 1.5028},
                           {"R0 time-averaged", bar, 1.3555}};
  bool ok = true;
  for (const auto& h : rows) {
    const bool pass = std::abs(h.computed - h.reference) <= kTol;
    ok = ok && pass;
    fmt::print(out, "{:<18} {:.4f} (expected {:.4f} +/- {}) {}\n", h.name, h.computed, h.reference,
               kTol, pass ? "PASS" : "FAIL");
  }

  const auto result = sweep(problem, e.grid, e.sweep);
  const auto shape = decrease_increase_decrease(result.points);
  const auto& first = result.points.front();
  const auto& last = result.points.back();
  const bool small_ok = std::abs(first.r0 - rows[0].reference) <= 0.01;
  const bool large_ok = std::abs(last.r0 - tilde) <= 0.005;
  if (shape.ok) {
    fmt::print(out, "shape: local min R0={:.4f} at d={}, local max R0={:.4f} at d={} PASS\n",
               result.points[shape.local_min].r0, num(result.points[shape.local_min].d),
               result.points[shape.local_max].r0, num(result.points[shape.local_max].d));
  } else {
    fmt::print(out, "shape: no local min followed by a local max FAIL\n");
  }
  fmt::print(out, "R0(d={}) = {:.4f} {}\n", num(first.d), first.r0, small_ok ? "PASS" : "FAIL");
  fmt::print(out, "R0(d={}) = {:.4f} {}\n", num(last.d), last.r0, large_ok ? "PASS" : "FAIL");
  ok = ok && shape.ok && small_ok && large_ok;

  if (!cli.output_path.empty()) {
    std::ostringstream sink;
    emit_csv(cli.output_path, result, e.hash, sink);
    fmt::print(out, "wrote {}\n", cli.output_path);
  }
  fmt::print(out, "{}\n", ok ? "all checks passed" : "some checks failed");
  return ok ? kExitOk : kExitNumerical;
}

int dispatch(const CliOptions& cli, std::ostream& out) {
  std::optional<ParsedConfig> parsed;
  if (!cli.config_path.empty()) {
    parsed = parse_config(cli.config_path);
  } else if (cli.command != Command::kReproduceFigure1) {
    throw PreconditionError(fmt::format("'{}' needs a model file", to_string(cli.command)));
  }
  const auto e = effective_settings(cli, parsed ? &*parsed : nullptr);
  if (cli.command == Command::kReproduceFigure1) return run_figure1(cli, e, out);

  const auto& base = *parsed->model.problem;
  switch (cli.command) {
    case Command::kReduce:
      run_reduce(base, out);
      break;
    case Command::kEig: {
      const double d = require_d(e, cli.command);
      const auto problem = base.with_dispersal(d);
      fmt::print(out, "d: {}\n", num(d));
      fmt::print(out, "lambda: {}\n",
                 num(principal_eigenvalue(problem.connectivity(), problem.net_growth(), d,
                                          e.sweep.r0.solver)));
      break;
    }
    case Command::kR0:
      run_r0(base.with_dispersal(require_d(e, cli.command)), e.sweep.r0, out);
      break;
    case Command::kSweep:
      emit_csv(cli.output_path, sweep(base, e.grid, e.sweep), e.hash, out);
      break;
    case Command::kReproduceFigure1:
      break;
  }
  return kExitOk;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result, const std::string& hash) {
  fmt::print(os, "# config_hash={}\n", hash);
  fmt::print(os, "d,lambda,r0,h3_ok,agg_residual\n");
  for (const auto& p : result.points) {
    fmt::print(os, "{},{},{},{},{}\n", num(p.d), num(p.lambda), num(p.r0),
               p.h3_ok ? "true" : "false", num(p.aggregation_residual));
  }
  fmt::print(os, "# lambda_0={}\n", num(result.limits.lambda_at_0));
  fmt::print(os, "# lambda_tilde={}\n", num(result.limits.lambda_tilde));
  fmt::print(os, "# r0_0={}\n", num(result.limits.r0_at_0));
  fmt::print(os, "# r0_tilde={}\n", num(result.limits.r0_tilde));
}

ShapeCheck decrease_increase_decrease(const std::vector<SweepPoint>& points) {
  ShapeCheck out;
  bool have_min = false;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double a = points[i - 1].r0, b = points[i].r0, c = points[i + 1].r0;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) break;
    if (!have_min && b < a && b < c) {
      out.local_min = i;
      have_min = true;
    } else if (have_min && b > a && b > c) {
      out.local_max = i;
      out.ok = true;
      break;
    }
  }
  return out;
}

int run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(options, out);
  } catch (const PreconditionError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const Error& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace patchr0
