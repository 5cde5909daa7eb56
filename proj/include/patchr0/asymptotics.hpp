#pragma once

#include <string>
#include <vector>

#include "patchr0/reproduction_ratio.hpp"

namespace patchr0 {

struct ReducedEigenvalue {
  double value = 0.0;
  // Principal eigenvalue of each irreducible diagonal block of P M(t) Q, in
  // the block order of `blocks`.
  std::vector<double> block_values;
  BlockStructure blocks;
};

// Principal eigenvalue of the aggregated system dv/dt = P M(t) Q v, the
// large-dispersal limit of the principal eigenvalue of d L + M(t). Also
// checks that it equals the maximum over the irreducible blocks of the
// aggregated pattern; a mismatch throws InconsistencyError.
ReducedEigenvalue lambda_tilde(const ConnectivityMatrix& l, const PeriodicMatrixFn& m,
                               const SolverOptions& options = {});

struct SweepPoint {
  double d = 0.0;
  double lambda = 0.0;  // principal eigenvalue of d L - V + F
  double r0 = 0.0;
  R0Case r0_case = R0Case::kRoot;
  bool h3_ok = false;
  double omega_removal = 0.0;
  double aggregation_residual = 0.0;
  std::string error;  // empty on success
};

struct SweepLimits {
  double lambda_at_0 = 0.0;
  double lambda_tilde = 0.0;
  double r0_at_0 = 0.0;
  double r0_tilde = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // in grid order
  SweepLimits limits;
};

struct SweepOptions {
  R0Options r0;
  // 0: PATCHR0_THREADS if set, else the hardware concurrency.
  unsigned threads = 0;
};

// Geometric grid from 1e-3 to 1e3 (61 points) with anchors {1e-5, 1e-4}
// below and {1e4, 1e5} above.
std::vector<double> default_grid();

std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

// Evaluates lambda_d and R0(d) on every grid point and the limiting
// quantities. Per-point failures are recorded in SweepPoint::error.
SweepResult sweep(const PeriodicVFProblem& problem, const std::vector<double>& grid,
                  const SweepOptions& options = {});

struct LimitReport {
  double smallest_d = 0.0;
  double largest_d = 0.0;
  double lambda_small_gap = 0.0;
  double lambda_large_gap = 0.0;
  double r0_small_gap = 0.0;
  double r0_large_gap = 0.0;
  bool small_ok = false;
  bool large_ok = false;
  bool ok() const { return small_ok && large_ok; }
};

// Needs a grid point at or below 1e-3 and one at or above 1e4.
LimitReport verify_limits(const SweepResult& result, double tol_small, double tol_large);

unsigned resolve_thread_count(unsigned requested);

}  // namespace patchr0
