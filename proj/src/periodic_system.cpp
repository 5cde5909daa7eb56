#include "patchr0/periodic_system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

const char* to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::kRk4:
      return "rk4";
    case Integrator::kMagnus4:
      return "magnus4";
    case Integrator::kAuto:
      return "auto";
  }
  return "?";
}

namespace {

std::shared_ptr<const std::vector<Matrix>> sample_nodes(const PeriodicMatrixFn& fn, int steps) {
  auto nodes = std::make_shared<std::vector<Matrix>>();
  const auto count = static_cast<std::size_t>(2 * steps + 1);
  nodes->reserve(count);
  const double half = fn.period() / (2.0 * steps);
  for (std::size_t j = 0; j < count; ++j) nodes->push_back(fn.evaluate(half * static_cast<double>(j)));
  return nodes;
}

void check_steps(int steps) {
  if (steps < kMinStepsPerPeriod) {
    throw PreconditionError("steps per period must be at least " +
                            std::to_string(kMinStepsPerPeriod) + ", got " + std::to_string(steps));
  }
}

// One step of either scheme; `State` is a Matrix (fundamental matrix) or a
// Vector (single solution).
template <typename State>
void advance(State& x, const Matrix& a0, const Matrix& am, const Matrix& a1, double h,
             Integrator scheme) {
  if (scheme == Integrator::kRk4) {
    const State k1 = a0 * x;
    const State k2 = am * (x + 0.5 * h * k1);
    const State k3 = am * (x + 0.5 * h * k2);
    const State k4 = a1 * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  } else {
    const Matrix alpha1 = (h / 6.0) * (a0 + 4.0 * am + a1);
    const Matrix alpha2 = h * (a1 - a0);
    const Matrix omega = alpha1 - (alpha1 * alpha2 - alpha2 * alpha1) / 12.0;
    const Matrix step = omega.exp();
    x = step * x;
  }
}

}  // namespace

SampledGenerator::SampledGenerator(const PeriodicMatrixFn& fn, int steps_per_period)
    : n_(fn.size()), period_(fn.period()), steps_(steps_per_period) {
  check_steps(steps_per_period);
  base_ = sample_nodes(fn, steps_);
}

SampledGenerator::SampledGenerator(const PeriodicMatrixFn& base, const PeriodicMatrixFn& extra,
                                   int steps_per_period)
    : n_(base.size()), period_(base.period()), steps_(steps_per_period), coefficient_(1.0) {
  check_steps(steps_per_period);
  if (extra.size() != base.size() || extra.period() != base.period()) {
    throw PreconditionError("sampled generator: parts differ in size or period");
  }
  base_ = sample_nodes(base, steps_);
  extra_ = sample_nodes(extra, steps_);
}

SampledGenerator SampledGenerator::with_coefficient(double coefficient) const {
  SampledGenerator out = *this;
  out.coefficient_ = coefficient;
  return out;
}

void SampledGenerator::node(std::size_t j, Matrix& out) const {
  out = (*base_)[j];
  if (extra_ && coefficient_ != 0.0) out.noalias() += coefficient_ * (*extra_)[j];
}

double SampledGenerator::max_row_norm() const {
  double norm = 0.0;
  Matrix a;
  for (std::size_t j = 0; j < base_->size(); ++j) {
    node(j, a);
    norm = std::max(norm, a.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return norm;
}

Integrator SampledGenerator::resolve(Integrator requested) const {
  if (requested != Integrator::kAuto) return requested;
  return step() * max_row_norm() <= kAutoRk4StepNorm ? Integrator::kRk4 : Integrator::kMagnus4;
}

MonodromyResult monodromy(const SampledGenerator& generator, Integrator integrator) {
  MonodromyResult result;
  result.integrator = generator.resolve(integrator);
  result.steps_per_period = generator.steps_per_period();
  const auto n = static_cast<Eigen::Index>(generator.size());
  const double h = generator.step();

  Matrix phi = Matrix::Identity(n, n);
  Matrix a0, am, a1;
  generator.node(0, a0);
  for (int k = 0; k < result.steps_per_period; ++k) {
    const auto j = static_cast<std::size_t>(2 * k);
    generator.node(j + 1, am);
    generator.node(j + 2, a1);
    advance(phi, a0, am, a1, h, result.integrator);
    std::swap(a0, a1);

    const double size = phi.cwiseAbs().maxCoeff();
    if (!std::isfinite(size)) {
      throw NumericalError("monodromy integration produced a non-finite value at step " +
                           std::to_string(k));
    }
    if (size > 1e100 || (size > 0.0 && size < 1e-100)) {
      phi /= size;
      result.log_scale += std::log(size);
    }
  }
  result.map = std::move(phi);

  const double r = spectral_radius(result.map);
  if (!(r > 0.0)) {
    throw InconsistencyError("monodromy map has zero spectral radius");
  }
  result.growth_bound = (std::log(r) + result.log_scale) / generator.period();
  return result;
}

MonodromyResult monodromy(const PeriodicMatrixFn& generator, const SolverOptions& options) {
  return monodromy(SampledGenerator(generator, options.steps_per_period), options.integrator);
}

double growth_bound(const PeriodicMatrixFn& generator, const SolverOptions& options) {
  return monodromy(generator, options).growth_bound;
}

namespace {

PeriodicMatrixFn dispersal_generator(const ConnectivityMatrix& l, const PeriodicMatrixFn& m,
                                     double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    throw PreconditionError("dispersal rate must be finite and nonnegative");
  }
  if (l.size() != m.size()) {
    throw PreconditionError("connectivity and reaction matrices differ in size");
  }
  if (!m.cooperative_on_grid()) {
    throw PreconditionError("reaction matrix M(t) is not cooperative on the period grid");
  }
  return m.plus_constant(d * l.matrix());
}

}  // namespace

double principal_eigenvalue(const ConnectivityMatrix& l, const PeriodicMatrixFn& m, double d,
                            const SolverOptions& options) {
  return monodromy(dispersal_generator(l, m, d), options).growth_bound;
}

Vector nonnegative_dominant_eigenvector(const Matrix& map) {
  require_square(map, "dominant eigenvector");
  const auto n = map.rows();
  auto finish = [](Vector v) {
    v /= v.maxCoeff();
    return v;
  };
  if (map.minCoeff() > 0.0) {
    Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
    Vector next(n);
    const Matrix scaled = map / map.maxCoeff();
    for (int it = 0; it < kPowerIterationCap; ++it) {
      next.noalias() = scaled * x;
      next /= next.sum();
      const double change = (next - x).lpNorm<Eigen::Infinity>();
      x.swap(next);
      if (change < 1e-14) return finish(x);
    }
    throw NumericalError("power iteration on the monodromy map did not converge");
  }

  Eigen::EigenSolver<Matrix> solver(map);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensolve of the monodromy map failed");
  }
  const auto& values = solver.eigenvalues();
  double r = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) r = std::max(r, std::abs(values(i)));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(values(i)) < r * (1.0 - 1e-9) || std::abs(values(i).imag()) > 1e-12 * r) continue;
    Vector v = solver.eigenvectors().col(i).real();
    if (v.sum() < 0.0 || (v.sum() == 0.0 && v.minCoeff() < 0.0)) v = -v;
    const double top = v.cwiseAbs().maxCoeff();
    if (!(top > 0.0)) continue;
    v /= top;
    if (v.minCoeff() < -1e-10) continue;
    v = v.cwiseMax(0.0);
    return finish(v);
  }

  // Several eigenvalues share the spectral radius and the solver mixed their
  // eigenvectors. (map / r + I) has a strictly dominant eigenvalue 2 on the
  // nonnegative cone, so power iteration converges there.
  const Matrix shifted = map / r + Matrix::Identity(n, n);
  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  for (int it = 0; it < kPowerIterationCap; ++it) {
    next.noalias() = shifted * x;
    next /= next.sum();
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x.swap(next);
    if (change < 1e-14) return finish(x);
  }
  throw NumericalError("could not extract a nonnegative eigenvector of the monodromy map");
}

PrincipalEigenpair principal_eigenfunction(const ConnectivityMatrix& l, const PeriodicMatrixFn& m,
                                           double d, const SolverOptions& options) {
  const auto generator = dispersal_generator(l, m, d);
  const SampledGenerator sampled(generator, options.steps_per_period);
  const auto mono = monodromy(sampled, options.integrator);

  PrincipalEigenpair out;
  out.eigenvalue = mono.growth_bound;
  Vector u = nonnegative_dominant_eigenvector(mono.map);

  const auto n = static_cast<Eigen::Index>(generator.size());
  const Matrix shift = out.eigenvalue * Matrix::Identity(n, n);
  const double h = sampled.step();
  auto& traj = out.eigenfunction;
  traj.times.push_back(0.0);
  traj.values.push_back(u);
  Matrix a0, am, a1;
  sampled.node(0, a0);
  a0 -= shift;
  for (int k = 0; k < sampled.steps_per_period(); ++k) {
    const auto j = static_cast<std::size_t>(2 * k);
    sampled.node(j + 1, am);
    sampled.node(j + 2, a1);
    am -= shift;
    a1 -= shift;
    advance(u, a0, am, a1, h, mono.integrator);
    if (!u.allFinite()) {
      throw NumericalError("eigenfunction integration produced a non-finite value at step " +
                           std::to_string(k));
    }
    std::swap(a0, a1);
    traj.times.push_back(h * (k + 1));
    traj.values.push_back(u);
  }

  double top = 0.0;
  for (const auto& v : traj.values) top = std::max(top, v.maxCoeff());
  if (!(top > 0.0)) throw NumericalError("principal eigenfunction vanished");
  for (auto& v : traj.values) {
    v /= top;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) < 0.0 && v(i) > -1e-10) v(i) = 0.0;
    }
  }
  return out;
}

double aggregation_residual(const ZeroEigenBasis& basis, const PeriodicTrajectory& u) {
  const Matrix projector = basis.Q * basis.P;
  double out = 0.0;
  for (const auto& v : u.values) {
    if (v.size() != static_cast<Eigen::Index>(basis.size())) {
      throw PreconditionError("aggregation_residual: trajectory dimension does not match basis");
    }
    out = std::max(out, (v - projector * v).lpNorm<Eigen::Infinity>());
  }
  return out;
}

}  // namespace patchr0
