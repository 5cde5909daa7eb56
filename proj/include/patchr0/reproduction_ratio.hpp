#pragma once

#include <optional>

#include "patchr0/periodic_system.hpp"
#include "patchr0/zero_structure.hpp"

namespace patchr0 {

// Constant coefficients a model declares as its time-averaged counterpart.
// When absent, the period averages of V and F are used.
struct AveragedCoefficients {
  Matrix V;
  Matrix F;
};

// The linear system dv/dt = d L v - V(t) v + F(t) v. Construction checks H2
// on the 1024-point grid: F(t) >= 0 and -V(t) cooperative, within 1e-12.
class PeriodicVFProblem {
 public:
  PeriodicVFProblem(ConnectivityMatrix l, PeriodicMatrixFn v, PeriodicMatrixFn f, double d,
                    std::optional<AveragedCoefficients> averaged = std::nullopt);

  const ConnectivityMatrix& connectivity() const { return l_; }
  const PeriodicMatrixFn& removal() const { return v_; }
  const PeriodicMatrixFn& infection() const { return f_; }
  double dispersal() const { return d_; }
  double period() const { return v_.period(); }
  std::size_t size() const { return l_.size(); }
  const std::optional<AveragedCoefficients>& averaged() const { return averaged_; }

  PeriodicVFProblem with_dispersal(double d) const;

  // d L - V(t)
  PeriodicMatrixFn removal_generator() const;
  // F(t) - V(t), the reaction part whose principal eigenvalue decides
  // invasion.
  PeriodicMatrixFn net_growth() const;

 private:
  ConnectivityMatrix l_;
  PeriodicMatrixFn v_;
  PeriodicMatrixFn f_;
  double d_;
  std::optional<AveragedCoefficients> averaged_;
};

struct H3Check {
  double omega = 0.0;  // growth bound of d L - V(t)
  bool ok = false;
};

H3Check check_h3(const PeriodicVFProblem& problem, const SolverOptions& options = {});

enum class R0Case {
  kRoot,        // the growth bound crosses zero at mu = R0
  kDegenerate,  // negative for every mu down to the floor; R0 := 0
};

const char* to_string(R0Case c);

struct R0Options {
  double tolerance = 1e-9;  // relative bracket width
  SolverOptions solver;
};

inline constexpr double kMuFloor = 1e-8;
inline constexpr double kMuCeiling = 1e8;
// |omega| * T at the returned root
inline constexpr double kRootResidualBound = 1e-8;

struct R0Result {
  double value = 0.0;
  R0Case kind = R0Case::kRoot;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  // |omega(mu)| * T at mu = value (kRoot) or omega(floor) * T (kDegenerate)
  double residual = 0.0;
};

// Growth bound of d L - V(t) + F(t) / mu.
double threshold_growth_bound(const PeriodicVFProblem& problem, double mu,
                              const SolverOptions& options = {});

// The periodic basic reproduction ratio: the unique mu > 0 at which the
// growth bound of d L - V + F / mu vanishes, found by bracketing and
// bisection.
R0Result r0_periodic(const PeriodicVFProblem& problem, const R0Options& options = {});

// The same root on the aggregated system dv/dt = -P V Q v + P F Q v.
R0Result r0_reduced(const PeriodicVFProblem& problem, const ZeroEigenBasis& basis,
                    const R0Options& options = {});

// The aggregated problem itself (alpha0 patches, no dispersal).
PeriodicVFProblem reduced_problem(const PeriodicVFProblem& problem, const ZeroEigenBasis& basis);

// r((V - d L)^{-1} F) for constant coefficients.
double r0_autonomous(const Matrix& l, const Matrix& v, const Matrix& f, double d);

// r0_autonomous on the time-averaged coefficients.
double r0_time_averaged(const PeriodicVFProblem& problem);

}  // namespace patchr0
