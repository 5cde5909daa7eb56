#include "patchr0/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "patchr0/errors.hpp"

namespace patchr0 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ReducedEigenvalue lambda_tilde(const ConnectivityMatrix& l, const PeriodicMatrixFn& m,
                               const SolverOptions& options) {
  const auto basis = build_basis(l);
  if (!m.cooperative_on_grid()) {
    throw PreconditionError("lambda_tilde: M(t) is not cooperative on the period grid");
  }
  const auto reduced =
      m.map_coefficients([&basis](const Matrix& c) -> Matrix { return aggregate_linear(basis, c); });
  const auto none = ConnectivityMatrix::zero(basis.alpha0);

  ReducedEigenvalue out;
  out.value = principal_eigenvalue(none, reduced, 0.0, options);
  out.blocks = block_structure(reduced.support_pattern());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& blk : out.blocks.blocks) {
    const auto part =
        reduced.map_coefficients([&blk](const Matrix& c) -> Matrix { return submatrix(c, blk, blk); });
    const double v = principal_eigenvalue(ConnectivityMatrix::zero(blk.size()), part, 0.0, options);
    out.block_values.push_back(v);
    best = std::max(best, v);
  }
  if (std::abs(best - out.value) > 1e-8 * std::max(1.0, std::abs(out.value))) {
    throw InconsistencyError("reduced principal eigenvalue " + std::to_string(out.value) +
                             " differs from the block maximum " + std::to_string(best) +
                             "; the aggregation basis is inconsistent");
  }
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw PreconditionError("geometric grid needs 0 < lo < hi and at least two points");
  }
  std::vector<double> grid(points);
  const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_grid() {
  std::vector<double> grid{1e-5, 1e-4};
  const auto mid = geometric_grid(1e-3, 1e3, 61);
  grid.insert(grid.end(), mid.begin(), mid.end());
  grid.push_back(1e4);
  grid.push_back(1e5);
  return grid;
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PATCHR0_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

SweepPoint evaluate_point(const PeriodicVFProblem& base, const ZeroEigenBasis& basis, double d,
                          const SweepOptions& options) {
  SweepPoint pt;
  pt.d = d;
  pt.lambda = pt.r0 = pt.aggregation_residual = kNaN;
  try {
    const auto problem = base.with_dispersal(d);
    const auto h3 = check_h3(problem, options.r0.solver);
    pt.h3_ok = h3.ok;
    pt.omega_removal = h3.omega;
    const auto eig = principal_eigenfunction(problem.connectivity(), problem.net_growth(), d,
                                             options.r0.solver);
    pt.lambda = eig.eigenvalue;
    pt.aggregation_residual = aggregation_residual(basis, eig.eigenfunction);
    if (h3.ok) {
      const auto r0 = r0_periodic(problem, options.r0);
      pt.r0 = r0.value;
      pt.r0_case = r0.kind;
    } else {
      pt.error = "H3 fails: omega=" + std::to_string(h3.omega);
    }
  } catch (const Error& e) {
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

SweepResult sweep(const PeriodicVFProblem& problem, const std::vector<double>& grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw PreconditionError("sweep: empty dispersal grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw PreconditionError("sweep: grid must be positive and strictly increasing");
    }
  }
  const auto basis = build_basis(problem.connectivity());

  SweepResult out;
  out.points.resize(grid.size());
  const unsigned threads =
      std::min<unsigned>(resolve_thread_count(options.threads), static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      out.points[i] = evaluate_point(problem, basis, grid[i], options);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  auto& lim = out.limits;
  const auto at0 = problem.with_dispersal(0.0);
  lim.lambda_at_0 =
      principal_eigenvalue(at0.connectivity(), at0.net_growth(), 0.0, options.r0.solver);
  lim.lambda_tilde = lambda_tilde(problem.connectivity(), problem.net_growth(), options.r0.solver).value;
  lim.r0_at_0 = r0_periodic(at0, options.r0).value;
  lim.r0_tilde = r0_reduced(problem, basis, options.r0).value;
  return out;
}

LimitReport verify_limits(const SweepResult& result, double tol_small, double tol_large) {
  if (result.points.empty()) throw PreconditionError("verify_limits: empty sweep");
  const auto& first = result.points.front();
  const auto& last = result.points.back();
  if (first.d > 1e-3 || last.d < 1e4) {
    throw PreconditionError("verify_limits: grid must reach d <= 1e-3 and d >= 1e4");
  }
  LimitReport r;
  r.smallest_d = first.d;
  r.largest_d = last.d;
  r.lambda_small_gap = std::abs(first.lambda - result.limits.lambda_at_0);
  r.lambda_large_gap = std::abs(last.lambda - result.limits.lambda_tilde);
  r.r0_small_gap = std::abs(first.r0 - result.limits.r0_at_0);
  r.r0_large_gap = std::abs(last.r0 - result.limits.r0_tilde);
  // NaN gaps (failed points) compare false and fail the check.
  r.small_ok = r.lambda_small_gap < tol_small && r.r0_small_gap < tol_small;
  r.large_ok = r.lambda_large_gap < tol_large && r.r0_large_gap < tol_large;
  return r;
}

}  // namespace patchr0
