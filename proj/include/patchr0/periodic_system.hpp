#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "patchr0/linalg.hpp"
#include "patchr0/periodic_fn.hpp"
#include "patchr0/zero_structure.hpp"

namespace patchr0 {

inline constexpr int kDefaultStepsPerPeriod = 4096;
inline constexpr int kMinStepsPerPeriod = 16;

// Fixed-step schemes for dPhi/dt = A(t) Phi. Both are fourth order and use
// the nodes t_k, t_k + h/2, t_k + h of each step.
//
// kRk4 is classical Runge-Kutta. kMagnus4 is the fourth-order Magnus
// exponential integrator, exact for constant generators and stable for the
// stiff dispersal term d L at large d. kAuto picks kRk4 when
// h * max_t ||A(t)||_inf <= kAutoRk4StepNorm and kMagnus4 otherwise.
enum class Integrator { kRk4, kMagnus4, kAuto };

inline constexpr double kAutoRk4StepNorm = 0.05;

const char* to_string(Integrator integrator);

struct SolverOptions {
  int steps_per_period = kDefaultStepsPerPeriod;
  Integrator integrator = Integrator::kAuto;
};

// Generator samples on the half-step grid j * h / 2, j = 0..2N, optionally
// as base + coefficient * extra (the form dL - V + F / mu takes).
class SampledGenerator {
 public:
  SampledGenerator(const PeriodicMatrixFn& fn, int steps_per_period);
  SampledGenerator(const PeriodicMatrixFn& base, const PeriodicMatrixFn& extra,
                   int steps_per_period);

  // Same samples, different coefficient on the extra part. Shares storage.
  SampledGenerator with_coefficient(double coefficient) const;

  std::size_t size() const { return n_; }
  double period() const { return period_; }
  int steps_per_period() const { return steps_; }
  double step() const { return period_ / steps_; }
  // Writes A at half-step node j into `out`.
  void node(std::size_t j, Matrix& out) const;
  // max over nodes of ||A||_inf
  double max_row_norm() const;
  Integrator resolve(Integrator requested) const;

 private:
  std::size_t n_ = 0;
  double period_ = 0.0;
  int steps_ = 0;
  double coefficient_ = 0.0;
  std::shared_ptr<const std::vector<Matrix>> base_;
  std::shared_ptr<const std::vector<Matrix>> extra_;
};

struct MonodromyResult {
  // Phi(T, 0) = exp(log_scale) * map. log_scale stays 0 unless the
  // integration had to renormalize to avoid overflow or underflow.
  Matrix map;
  double log_scale = 0.0;
  int steps_per_period = 0;
  Integrator integrator = Integrator::kRk4;
  // ln r(Phi(T,0)) / T
  double growth_bound = 0.0;
};

MonodromyResult monodromy(const SampledGenerator& generator, Integrator integrator);
MonodromyResult monodromy(const PeriodicMatrixFn& generator, const SolverOptions& options = {});

// Exponential growth bound ln r(Phi(T,0)) / T of the generator's evolution
// family.
double growth_bound(const PeriodicMatrixFn& generator, const SolverOptions& options = {});

// Principal eigenvalue of du/dt = d L u + M(t) u - lambda u with periodic
// nonnegative u. M must be cooperative on the 1024-point grid.
double principal_eigenvalue(const ConnectivityMatrix& l, const PeriodicMatrixFn& m, double d,
                            const SolverOptions& options = {});

struct PeriodicTrajectory {
  std::vector<double> times;
  std::vector<Vector> values;
};

struct PrincipalEigenpair {
  double eigenvalue = 0.0;
  // u(t) = exp(-lambda t) Phi(t, 0) phi on t_k = k T / N, k = 0..N, scaled to
  // a maximum of 1 over grid and components.
  PeriodicTrajectory eigenfunction;
};

PrincipalEigenpair principal_eigenfunction(const ConnectivityMatrix& l, const PeriodicMatrixFn& m,
                                           double d, const SolverOptions& options = {});

// Nonnegative eigenvector for the spectral radius of a nonnegative matrix,
// scaled to max entry 1. Power iteration when the matrix is entrywise
// positive, dense eigensolve with zero-clamp repair otherwise.
Vector nonnegative_dominant_eigenvector(const Matrix& map);

// max over the grid of ||u(t) - Q P u(t)||_inf
double aggregation_residual(const ZeroEigenBasis& basis, const PeriodicTrajectory& u);

}  // namespace patchr0
