// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "patchr0/asymptotics.hpp"
#include "patchr0/cli.hpp"
#include "patchr0/models.hpp"

using namespace patchr0;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

// Scalar diagonal V, nonpositive off-diagonal, strictly diagonally dominant
// by columns so that -V generates a decaying flow for every d.
PeriodicMatrixFn random_removal(oracle::Rng& rng, int n, double period) {
  std::vector<std::vector<FourierSeries>> e(static_cast<std::size_t>(n),
                                            std::vector<FourierSeries>(static_cast<std::size_t>(n)));
  std::vector<double> colsum(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !rng.chance(0.3)) continue;
      const double c = rng.uniform(0.05, 0.4);
      e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = FourierSeries{-c, {0.5 * c}, {}};
      colsum[static_cast<std::size_t>(j)] += 1.5 * c;
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    e[k][k] = rng.series(colsum[k] + rng.uniform(0.3, 2.0) + 0.6, 0.15, 2);
  }
  return PeriodicMatrixFn::from_entries(period, e);
}

PeriodicMatrixFn random_infection(oracle::Rng& rng, int n, double period) {
  std::vector<std::vector<FourierSeries>> e(static_cast<std::size_t>(n),
                                            std::vector<FourierSeries>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && !rng.chance(0.5)) continue;
      const double c = rng.uniform(0.1, 2.0);
      e[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.series(c, c / 4.0, 2);
    }
  }
  return PeriodicMatrixFn::from_entries(period, e);
}

Outcome criterion1() {
  Outcome o;
  const auto start = Clock::now();
  const auto params = baseline_ross_macdonald();
  const auto patches = patch_reproduction_ratios(params);
  const auto problem = build_ross_macdonald(params, 0.0);
  const double tilde = r0_reduced(problem, build_basis(problem.connectivity())).value;
  const double bar = r0_time_averaged(problem);
  const double elapsed = seconds_since(start);
  o.require(std::abs(patches[0] - 1.5340) <= 2e-3, fmt::format("R0(1)={:.5f}", patches[0]));
  o.require(std::abs(patches[1] - 1.4478) <= 2e-3, fmt::format("R0(2)={:.5f}", patches[1]));
  o.require(std::abs(tilde - 1.5028) <= 2e-3, fmt::format("R0~={:.5f}", tilde));
  o.require(std::abs(bar - 1.3555) <= 2e-3, fmt::format("R0bar={:.5f}", bar));
  o.require(elapsed < 60.0, fmt::format("runtime {:.1f}s", elapsed));
  if (o.pass) {
    o.detail = fmt::format("R0(1)={:.4f} R0(2)={:.4f} R0~={:.4f} R0bar={:.4f} in {:.2f}s", patches[0],
                           patches[1], tilde, bar, elapsed);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto problem = build_ross_macdonald(baseline_ross_macdonald(), 0.0);
  const auto grid = default_grid();
  const auto result = sweep(problem, grid, {});
  const auto& pts = result.points;
  for (const auto& p : pts) o.require(p.error.empty(), fmt::format("d={} failed: {}", p.d, p.error));

  // Independent scan: first interior local minimum, then a later local max.
  std::size_t imin = 0, imax = 0;
  for (std::size_t i = 1; i + 1 < pts.size() && imax == 0; ++i) {
    const bool is_min = pts[i].r0 < pts[i - 1].r0 && pts[i].r0 < pts[i + 1].r0;
    const bool is_max = pts[i].r0 > pts[i - 1].r0 && pts[i].r0 > pts[i + 1].r0;
    if (imin == 0 && is_min) imin = i;
    if (imin != 0 && is_max) imax = i;
  }
  o.require(imin != 0 && imax != 0, "no local min followed by local max");
  const bool starts_down = imin != 0 && pts.front().r0 > pts[imin].r0;
  const bool ends_down = imax != 0 && pts.back().r0 < pts[imax].r0;
  o.require(starts_down && ends_down, "not decrease-increase-decrease");
  o.require(std::abs(pts.front().r0 - 1.5340) <= 0.01,
            fmt::format("R0(d={})={:.5f}", pts.front().d, pts.front().r0));
  o.require(pts.back().d == 1e5, "largest grid point is not 1e5");
  o.require(std::abs(pts.back().r0 - result.limits.r0_tilde) <= 0.005,
            fmt::format("R0(1e5)={:.5f} vs R0~={:.5f}", pts.back().r0, result.limits.r0_tilde));
  if (o.pass) {
    o.detail = fmt::format("min {:.4f}@d={:.3g}, max {:.4f}@d={:.3g}, R0({:g})={:.4f}, R0(1e5)={:.4f}",
                           pts[imin].r0, pts[imin].d, pts[imax].r0, pts[imax].d, pts.front().d,
                           pts.front().r0, pts.back().r0);
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto start = Clock::now();
  const ConnectivityMatrix l(Matrix{{-1.0, 2.0}, {1.0, -2.0}});
  const auto base = build_sis_autonomous({3.0, 1.0}, {1.0, 1.0}, l, 0.0);
  const double small = r0_periodic(base.with_dispersal(1e-6)).value;
  const auto big = base.with_dispersal(1e6);
  const double large = r0_periodic(big).value;
  const double s = principal_eigenvalue(big.connectivity(), big.net_growth(), 1e6);
  const double elapsed = seconds_since(start);
  o.require(std::abs(small - 3.0) <= 1e-3, fmt::format("R0(1e-6)={:.6f}", small));
  o.require(std::abs(large - 7.0 / 3.0) <= 1e-3, fmt::format("R0(1e6)={:.6f}", large));
  o.require(std::abs(s - 4.0 / 3.0) <= 1e-3, fmt::format("s(1e6)={:.6f}", s));
  o.require(elapsed < 5.0, fmt::format("runtime {:.2f}s", elapsed));
  if (o.pass) {
    o.detail = fmt::format("R0(1e-6)={:.6f} R0(1e6)={:.6f} s={:.6f} in {:.2f}s", small, large, s, elapsed);
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  oracle::Rng rng(4004);
  int reducible = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = rng.integer(1, 8);
    const Matrix l = rng.h1(n, k % 3 == 0);
    const auto basis = build_basis(ConnectivityMatrix(l));
    if (basis.structure.block_count() > 1) ++reducible;
    const auto res = basis_residuals(basis);
    o.require(res.max() <= 1e-10, fmt::format("instance {}: basis residual {:.2e}", k, res.max()));

    std::size_t zeros = 0;
    for (auto z : oracle::spectrum(l)) zeros += std::abs(z) < 1e-7 ? 1 : 0;
    o.require(zeros == basis.alpha0, fmt::format("instance {}: alpha0={} vs {} zero eigenvalues", k,
                                                 basis.alpha0, zeros));

    const Matrix m = rng.cooperative(n);
    const Matrix agg = aggregate_linear(basis, m);
    bool coop = true;
    for (Eigen::Index i = 0; i < agg.rows(); ++i) {
      for (Eigen::Index j = 0; j < agg.cols(); ++j) {
        if (i != j && agg(i, j) < 0.0 && std::abs(agg(i, j)) >= 1e-13) coop = false;
      }
    }
    o.require(coop, fmt::format("instance {}: PMQ not cooperative", k));

    Vector c(static_cast<Eigen::Index>(basis.alpha0));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.uniform(0.05, 20.0);
    const Matrix rescaled = c.cwiseInverse().asDiagonal() * basis.P * m * basis.Q * c.asDiagonal();
    const double gap = oracle::spectrum_distance(agg, rescaled);
    o.require(gap <= 1e-8, fmt::format("instance {}: rescaled spectra differ by {:.2e}", k, gap));
  }
  o.require(reducible > 50 && reducible < 200, fmt::format("only {} reducible instances", reducible));
  if (o.pass) o.detail = fmt::format("200 instances ({} reducible)", reducible);
  return o;
}

Outcome criterion5() {
  Outcome o;
  oracle::Rng rng(5005);
  double worst_r0 = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double period = rng.uniform(0.5, 400.0);
    const auto v = rng.series(rng.uniform(0.5, 3.0), 0.1, static_cast<std::size_t>(rng.integer(1, 3)));
    const auto f = rng.series(rng.uniform(0.1, 4.0), 0.08, static_cast<std::size_t>(rng.integer(0, 3)));
    const PeriodicVFProblem p(ConnectivityMatrix::zero(1), PeriodicMatrixFn::from_entries(period, {{v}}),
                              PeriodicMatrixFn::from_entries(period, {{f}}), 0.0);
    const double gap = std::abs(r0_periodic(p).value - f.c0 / v.c0);
    worst_r0 = std::max(worst_r0, gap);
  }
  o.require(worst_r0 <= 1e-8, fmt::format("scalar R0 gap {:.2e}", worst_r0));

  double worst_exp = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int n = rng.integer(1, 6);
    const Matrix a = rng.cooperative(n);
    const double period = rng.uniform(0.5, 3.0);
    const auto mono = monodromy(PeriodicMatrixFn(period, a));
    const Matrix expected = oracle::expm_taylor(a * period);
    const Matrix phi = std::exp(mono.log_scale) * mono.map;
    worst_exp = std::max(worst_exp, (phi - expected).cwiseAbs().maxCoeff() /
                                        std::max(1.0, expected.cwiseAbs().maxCoeff()));
  }
  o.require(worst_exp <= 1e-8, fmt::format("monodromy vs exp {:.2e}", worst_exp));

  double lo_ratio = INFINITY, hi_ratio = 0.0;
  for (int k = 0; k < 5; ++k) {
    const int n = rng.integer(2, 4);
    // Shift by I so the growth bound sits near 1: at a growth bound near 0
    // the leading h^4 term of the RK4 error vanishes and halving shows h^5.
    const auto m = rng.cooperative_periodic(n, 1.0, 2).plus_constant(Matrix::Identity(n, n));
    const double ref = growth_bound(m, {1 << 14, Integrator::kMagnus4});
    double prev = std::abs(growth_bound(m, {32, Integrator::kRk4}) - ref);
    for (int steps = 64; steps <= 256; steps *= 2) {
      const double err = std::abs(growth_bound(m, {steps, Integrator::kRk4}) - ref);
      lo_ratio = std::min(lo_ratio, prev / err);
      hi_ratio = std::max(hi_ratio, prev / err);
      prev = err;
    }
  }
  o.require(lo_ratio >= 8.0 && hi_ratio <= 32.0,
            fmt::format("RK4 halving ratios in [{:.2f}, {:.2f}]", lo_ratio, hi_ratio));
  if (o.pass) {
    o.detail = fmt::format("scalar R0 gap {:.1e}, exp gap {:.1e}, halving ratios [{:.1f}, {:.1f}]", worst_r0,
                           worst_exp, lo_ratio, hi_ratio);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  oracle::Rng rng(6006);
  int above = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = rng.integer(1, 6);
    const double period = rng.uniform(0.5, 5.0);
    const ConnectivityMatrix l(rng.h1(n, rng.chance(0.4)));
    const double d = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const PeriodicVFProblem p(l, random_removal(rng, n, period), random_infection(rng, n, period), d);
    const auto h3 = check_h3(p);
    o.require(h3.ok, fmt::format("instance {}: generated problem violates H3", k));
    if (!h3.ok) continue;
    const auto r = r0_periodic(p);
    o.require(r.kind == R0Case::kRoot, fmt::format("instance {}: degenerate R0", k));
    const double w_lo = threshold_growth_bound(p, 0.9 * r.value);
    const double w_hi = threshold_growth_bound(p, 1.1 * r.value);
    o.require(w_lo > 0.0, fmt::format("instance {}: omega(0.9 R0)={:.3e}", k, w_lo));
    o.require(w_hi < 0.0, fmt::format("instance {}: omega(1.1 R0)={:.3e}", k, w_hi));
    const double lambda = principal_eigenvalue(l, p.net_growth(), d);
    const int s_r0 = (r.value > 1.0) - (r.value < 1.0);
    const int s_lambda = (lambda > 0.0) - (lambda < 0.0);
    o.require(s_r0 == s_lambda, fmt::format("instance {}: R0={:.6f} lambda={:.3e}", k, r.value, lambda));
    above += r.value > 1.0 ? 1 : 0;
  }
  o.require(above > 5 && above < 45, fmt::format("unbalanced sample: {} of 50 above threshold", above));
  if (o.pass) o.detail = fmt::format("50 instances, {} with R0 > 1", above);
  return o;
}

Outcome criterion7() {
  Outcome o;
  oracle::Rng rng(7007);
  double worst_gap = 0.0, worst_ratio = INFINITY;
  for (int k = 0; k < 20; ++k) {
    const int n = rng.integer(2, 6);
    const ConnectivityMatrix l(rng.h1(n, rng.chance(0.3)));
    const double period = rng.uniform(0.5, 5.0);
    const auto m = rng.cooperative_periodic(n, period, 2);
    const auto basis = build_basis(l);
    const auto mid = principal_eigenfunction(l, m, 1e3);
    const auto far = principal_eigenfunction(l, m, 1e5);
    const double tilde = lambda_tilde(l, m).value;
    const double gap = std::abs(far.eigenvalue - tilde);
    const double r_mid = aggregation_residual(basis, mid.eigenfunction);
    const double r_far = aggregation_residual(basis, far.eigenfunction);
    worst_gap = std::max(worst_gap, gap);
    worst_ratio = std::min(worst_ratio, r_mid / r_far);
    o.require(gap < 1e-3, fmt::format("instance {}: |lambda - lambda~| = {:.2e}", k, gap));
    o.require(r_mid >= 5.0 * r_far,
              fmt::format("instance {}: residual {:.2e} -> {:.2e}", k, r_mid, r_far));
  }
  if (o.pass) {
    o.detail = fmt::format("20 instances, max eigenvalue gap {:.1e}, min residual ratio {:.1f}", worst_gap,
                           worst_ratio);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"baseline reproduction numbers", criterion1},
      {"R0(d) shape and limits on the default grid", criterion2},
      {"two-patch SIS closed forms", criterion3},
      {"zero-eigenspace basis properties", criterion4},
      {"periodic-system oracles", criterion5},
      {"sign-relation consistency", criterion6},
      {"large-dispersal convergence", criterion7},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failures += out.pass ? 0 : 1;
    fmt::print("criterion {}: {} - {} ({}) [{:.1f}s]\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first,
               out.detail, seconds_since(start));
    std::fflush(stdout);
  }
  return failures;
}
