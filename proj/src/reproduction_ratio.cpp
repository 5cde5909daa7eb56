#include "patchr0/reproduction_ratio.hpp"

#include <cmath>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

PeriodicVFProblem::PeriodicVFProblem(ConnectivityMatrix l, PeriodicMatrixFn v, PeriodicMatrixFn f,
                                     double d, std::optional<AveragedCoefficients> averaged)
    : l_(std::move(l)), v_(std::move(v)), f_(std::move(f)), d_(d), averaged_(std::move(averaged)) {
  if (v_.size() != l_.size() || f_.size() != l_.size()) {
    throw PreconditionError("L, V and F must share a dimension");
  }
  if (v_.period() != f_.period()) throw PreconditionError("V and F must share a period");
  if (!(d_ >= 0.0) || !std::isfinite(d_)) {
    throw PreconditionError("dispersal rate must be finite and nonnegative");
  }
  if (!f_.nonnegative_on_grid()) {
    throw HypothesisError("H2", "F(t) has a negative entry on the period grid");
  }
  if (!(v_ * -1.0).cooperative_on_grid()) {
    throw HypothesisError("H2", "V(t) has a positive off-diagonal entry on the period grid");
  }
  if (averaged_) {
    const auto n = static_cast<Eigen::Index>(l_.size());
    if (averaged_->V.rows() != n || averaged_->V.cols() != n || averaged_->F.rows() != n ||
        averaged_->F.cols() != n) {
      throw PreconditionError("averaged coefficients have the wrong dimension");
    }
  }
}

PeriodicVFProblem PeriodicVFProblem::with_dispersal(double d) const {
  return PeriodicVFProblem(l_, v_, f_, d, averaged_);
}

PeriodicMatrixFn PeriodicVFProblem::removal_generator() const {
  return (v_ * -1.0).plus_constant(d_ * l_.matrix());
}

PeriodicMatrixFn PeriodicVFProblem::net_growth() const { return f_ - v_; }

H3Check check_h3(const PeriodicVFProblem& problem, const SolverOptions& options) {
  H3Check out;
  out.omega = growth_bound(problem.removal_generator(), options);
  out.ok = out.omega < 0.0;
  return out;
}

const char* to_string(R0Case c) { return c == R0Case::kRoot ? "P1-root" : "P2-degenerate"; }

double threshold_growth_bound(const PeriodicVFProblem& problem, double mu,
                              const SolverOptions& options) {
  if (!(mu > 0.0)) throw PreconditionError("threshold_growth_bound: mu must be positive");
  const SampledGenerator gen(problem.removal_generator(), problem.infection(),
                             options.steps_per_period);
  return monodromy(gen.with_coefficient(1.0 / mu), options.integrator).growth_bound;
}

R0Result r0_periodic(const PeriodicVFProblem& problem, const R0Options& options) {
  if (!(options.tolerance > 0.0)) throw PreconditionError("R0 tolerance must be positive");
  const auto h3 = check_h3(problem, options.solver);
  if (!h3.ok) {
    throw HypothesisError("H3", "growth bound of dL - V(t) is " + std::to_string(h3.omega) +
                                    ", not negative");
  }
  const double period = problem.period();
  const SampledGenerator gen(problem.removal_generator(), problem.infection(),
                             options.solver.steps_per_period);
  R0Result out;
  auto omega = [&](double mu) {
    ++out.iterations;
    return monodromy(gen.with_coefficient(1.0 / mu), options.solver.integrator).growth_bound;
  };

  // omega is nonincreasing in mu; keep omega(lo) >= 0 >= omega(hi).
  double lo = 0.5, hi = 2.0;
  double w_lo = omega(lo), w_hi = omega(hi);
  while (w_hi > 0.0) {
    if (hi >= kMuCeiling) {
      throw NumericalError("R0 exceeds " + std::to_string(kMuCeiling) +
                           "; check H2/H3 or the model scaling");
    }
    lo = hi;
    w_lo = w_hi;
    hi = std::min(hi * 4.0, kMuCeiling);
    w_hi = omega(hi);
  }
  while (w_lo < 0.0) {
    if (lo <= kMuFloor) {
      out.kind = R0Case::kDegenerate;
      out.value = 0.0;
      out.bracket_lo = 0.0;
      out.bracket_hi = lo;
      out.residual = std::abs(w_lo) * period;
      return out;
    }
    hi = lo;
    w_hi = w_lo;
    lo = std::max(lo / 4.0, kMuFloor);
    w_lo = omega(lo);
  }

  while (hi - lo > options.tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    const double w = omega(mid);
    if (w == 0.0) {
      lo = hi = mid;
      w_lo = w_hi = 0.0;
      break;
    }
    (w > 0.0 ? lo : hi) = mid;
    (w > 0.0 ? w_lo : w_hi) = w;
  }

  // Finish with linear interpolation inside the bracket; tighten further if
  // the residual is still above the bound.
  double mu = lo;
  double w = w_lo;
  for (int extra = 0; extra < 64; ++extra) {
    mu = (w_lo == w_hi) ? 0.5 * (lo + hi) : lo + (hi - lo) * w_lo / (w_lo - w_hi);
    w = omega(mu);
    if (std::abs(w) * period < kRootResidualBound || hi - lo <= 4.0 * 2.2e-16 * hi) break;
    if (w > 0.0) {
      lo = mu;
      w_lo = w;
    } else {
      hi = mu;
      w_hi = w;
    }
    const double mid = 0.5 * (lo + hi);
    const double wm = omega(mid);
    (wm > 0.0 ? lo : hi) = mid;
    (wm > 0.0 ? w_lo : w_hi) = wm;
  }
  out.kind = R0Case::kRoot;
  out.value = mu;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.residual = std::abs(w) * period;
  if (out.residual >= kRootResidualBound) {
    throw NumericalError("R0 root residual " + std::to_string(out.residual) +
                         " did not reach the bound");
  }
  return out;
}

PeriodicVFProblem reduced_problem(const PeriodicVFProblem& problem, const ZeroEigenBasis& basis) {
  if (basis.size() != problem.size()) {
    throw PreconditionError("basis dimension does not match the problem");
  }
  auto project = [&basis](const Matrix& m) -> Matrix { return aggregate_linear(basis, m); };
  std::optional<AveragedCoefficients> averaged;
  if (problem.averaged()) {
    averaged = AveragedCoefficients{project(problem.averaged()->V),
                                    project(problem.averaged()->F)};
  }
  return PeriodicVFProblem(ConnectivityMatrix::zero(basis.alpha0),
                           problem.removal().map_coefficients(project),
                           problem.infection().map_coefficients(project), 0.0,
                           std::move(averaged));
}

R0Result r0_reduced(const PeriodicVFProblem& problem, const ZeroEigenBasis& basis,
                    const R0Options& options) {
  return r0_periodic(reduced_problem(problem, basis), options);
}

double r0_autonomous(const Matrix& l, const Matrix& v, const Matrix& f, double d) {
  require_square(l, "L");
  require_square(v, "V");
  require_square(f, "F");
  if (l.rows() != v.rows() || l.rows() != f.rows()) {
    throw PreconditionError("r0_autonomous: L, V and F must share a dimension");
  }
  const Matrix a = v - d * l;
  if (!(spectral_bound(-a) < 0.0)) {
    throw HypothesisError("H3", "s(dL - V) is not negative");
  }
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw PreconditionError("r0_autonomous: V - dL is singular");
  return spectral_radius(lu.solve(f));
}

double r0_time_averaged(const PeriodicVFProblem& problem) {
  const auto& avg = problem.averaged();
  const Matrix& v = avg ? avg->V : problem.removal().mean();
  const Matrix& f = avg ? avg->F : problem.infection().mean();
  return r0_autonomous(problem.connectivity().matrix(), v, f, problem.dispersal());
}

}  // namespace patchr0
