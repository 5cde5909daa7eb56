#include "patchr0/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Integral of f over [0, t].
double integral(const FourierSeries& f, double t, double period) {
  const double w = 2.0 * std::numbers::pi / period;
  double v = f.c0 * t;
  for (std::size_t k = 0; k < f.harmonics(); ++k) {
    const double kw = w * static_cast<double>(k + 1);
    const double a = k < f.cos.size() ? f.cos[k] : 0.0;
    const double b = k < f.sin.size() ? f.sin[k] : 0.0;
    v += (a * std::sin(kw * t) - b * (std::cos(kw * t) - 1.0)) / kw;
  }
  return v;
}

// Periodic solution of V' = eps(t) - mu(t) V sampled at t_k = k T / N,
// k = 0..N. Variation of constants with a Simpson rule on each step.
std::vector<double> periodic_vector_population(const FourierSeries& eps, const FourierSeries& mu,
                                               double period, int steps) {
  if (!(mu.mean() > 0.0)) {
    throw PreconditionError("mosquito mortality has nonpositive mean; no periodic solution");
  }
  const double h = period / steps;
  std::vector<double> cum(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) cum[static_cast<std::size_t>(k)] = integral(mu, h * k, period);

  std::vector<double> v(cum.size(), 0.0);
  for (int k = 0; k < steps; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double t0 = h * k, tm = t0 + 0.5 * h, t1 = t0 + h;
    const double c1 = cum[kk + 1];
    const double cm = integral(mu, tm, period);
    const double step_integral =
        h / 6.0 *
        (std::exp(-(c1 - cum[kk])) * eps.evaluate(t0, period) +
         4.0 * std::exp(-(c1 - cm)) * eps.evaluate(tm, period) + eps.evaluate(t1, period));
    v[kk + 1] = v[kk] * std::exp(-(c1 - cum[kk])) + step_integral;
  }
  const double total = cum.back();
  const double v0 = v.back() / (1.0 - std::exp(-total));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += v0 * std::exp(-cum[k]);
  return v;
}

FourierSeries truncate(const FourierSeries& f, std::size_t harmonics) {
  FourierSeries out = f;
  out.cos.resize(std::min(out.cos.size(), harmonics));
  out.sin.resize(std::min(out.sin.size(), harmonics));
  return out;
}

Vector human_distribution(const RossMacdonaldParams& params) {
  const auto bs = block_structure(params.migration);
  if (!bs.irreducible()) {
    throw PreconditionError("human migration matrix must be irreducible");
  }
  return params.total_humans * perron_pair(params.migration).right;
}

PeriodicVFProblem assemble(const RossMacdonaldParams& params, double d, bool with_average) {
  validate(params);
  const auto dfs = disease_free_solution(params);
  const std::size_t m = params.patches, n = 2 * m;

  std::vector<std::vector<FourierSeries>> v(n, std::vector<FourierSeries>(n));
  std::vector<std::vector<FourierSeries>> f(n, std::vector<FourierSeries>(n));
  for (std::size_t i = 0; i < m; ++i) {
    v[i][i] = FourierSeries::constant(params.gamma[i]);
    v[m + i][m + i] = params.mortality[i];
    f[i][m + i] = params.biting[i] * params.sigma1[i];
    f[m + i][i] = (params.biting[i] * dfs.vstar[i]) * (params.sigma2[i] / dfs.hstar(idx(i)));
  }
  Matrix l = Matrix::Zero(idx(n), idx(n));
  l.topLeftCorner(idx(m), idx(m)) = params.migration;

  std::optional<AveragedCoefficients> averaged;
  if (with_average) {
    const auto avg = assemble(time_averaged_params(params), d, false);
    averaged = AveragedCoefficients{avg.removal().mean(), avg.infection().mean()};
  }
  return PeriodicVFProblem(ConnectivityMatrix(std::move(l)),
                           PeriodicMatrixFn::from_entries(params.period, v),
                           PeriodicMatrixFn::from_entries(params.period, f), d, std::move(averaged));
}

}  // namespace

RossMacdonaldParams baseline_ross_macdonald() {
  RossMacdonaldParams p;
  p.patches = 2;
  p.period = 365.0;
  p.total_humans = 500.0;
  p.migration = Matrix{{-1.0, 1.0}, {1.0, -1.0}};
  p.sigma1 = {0.2, 0.2};
  p.sigma2 = {0.3, 0.3};
  p.gamma = {0.02, 0.02};
  p.mortality = {FourierSeries::constant(0.1), FourierSeries::constant(0.1)};
  p.recruitment = {FourierSeries{12.5, {-5.0, -5.0}, {}}, FourierSeries{12.5, {-5.0}, {}}};
  for (const auto& eps : p.recruitment) p.biting.push_back(eps * 0.028);
  return p;
}

void validate(const RossMacdonaldParams& params) {
  const auto m = params.patches;
  if (m == 0) throw PreconditionError("Ross-Macdonald model needs at least one patch");
  if (!(params.period > 0.0)) throw PreconditionError("period must be positive");
  if (!(params.total_humans > 0.0)) throw PreconditionError("total human population must be positive");
  if (params.migration.rows() != idx(m) || params.migration.cols() != idx(m)) {
    throw PreconditionError("migration matrix must be " + std::to_string(m) + "x" +
                            std::to_string(m));
  }
  ConnectivityMatrix check(params.migration);
  auto sized = [m](std::size_t s, const char* what) {
    if (s != m) {
      throw PreconditionError(std::string(what) + " must have one entry per patch");
    }
  };
  sized(params.sigma1.size(), "sigma1");
  sized(params.sigma2.size(), "sigma2");
  sized(params.gamma.size(), "gamma");
  sized(params.mortality.size(), "mortality");
  sized(params.recruitment.size(), "recruitment");
  sized(params.biting.size(), "biting");
  for (std::size_t i = 0; i < m; ++i) {
    const auto patch = " in patch " + std::to_string(i + 1);
    if (!(params.sigma1[i] > 0.0) || !(params.sigma2[i] > 0.0)) {
      throw PreconditionError("transmission probabilities must be positive" + patch);
    }
    if (!(params.gamma[i] > 0.0)) throw PreconditionError("recovery rate must be positive" + patch);
    if (!(params.mortality[i].min_on_grid(params.period) > 0.0)) {
      throw PreconditionError("mosquito mortality must stay positive" + patch);
    }
    if (!(params.recruitment[i].min_on_grid(params.period) > 0.0)) {
      throw PreconditionError("mosquito recruitment must stay positive" + patch);
    }
    if (!(params.biting[i].min_on_grid(params.period) > 0.0)) {
      throw PreconditionError("biting rate must stay positive" + patch);
    }
  }
}

DiseaseFreeSolution disease_free_solution(const RossMacdonaldParams& params) {
  validate(params);
  DiseaseFreeSolution out;
  out.hstar = human_distribution(params);

  const int steps = kDiseaseFreeGridSteps;
  const double period = params.period;
  for (std::size_t i = 0; i < params.patches; ++i) {
    const auto& eps = params.recruitment[i];
    const auto& mu = params.mortality[i];
    const auto samples = periodic_vector_population(eps, mu, period, steps);
    const std::vector<double> one_period(samples.begin(), samples.end() - 1);
    const double scale = *std::max_element(one_period.begin(), one_period.end());

    const auto full = FourierSeries::fit(one_period, kMaxVstarHarmonics);
    bool fitted = false;
    for (std::size_t k = 0; k <= kMaxVstarHarmonics && !fitted; ++k) {
      auto candidate = truncate(full, k);
      double worst = 0.0;
      for (int s = 0; s < steps; ++s) {
        const auto ss = static_cast<std::size_t>(s);
        worst = std::max(worst, std::abs(candidate.evaluate(period * s / steps, period) -
                                         one_period[ss]));
      }
      if (worst < 1e-8 * scale) {
        out.vstar.push_back(std::move(candidate));
        fitted = true;
      }
    }
    if (!fitted) {
      throw NumericalError("periodic mosquito population in patch " + std::to_string(i + 1) +
                           " needs more than " + std::to_string(kMaxVstarHarmonics) +
                           " harmonics");
    }

    const auto& vs = out.vstar.back();
    double eps_max = 0.0, residual = 0.0;
    for (int s = 0; s < steps; ++s) {
      const double t = period * s / steps;
      const double e = eps.evaluate(t, period);
      eps_max = std::max(eps_max, std::abs(e));
      residual = std::max(residual,
                          std::abs(vs.derivative(t, period) - e + mu.evaluate(t, period) *
                                                                      vs.evaluate(t, period)));
    }
    if (residual >= 1e-6 * eps_max) {
      throw NumericalError("periodic mosquito population in patch " + std::to_string(i + 1) +
                           " fails its ODE residual check");
    }
    out.ode_residual = std::max(out.ode_residual, residual);
  }
  return out;
}

PeriodicVFProblem build_ross_macdonald(const RossMacdonaldParams& params, double d) {
  return assemble(params, d, true);
}

RossMacdonaldParams time_averaged_params(const RossMacdonaldParams& params) {
  RossMacdonaldParams out = params;
  auto flatten = [](std::vector<FourierSeries>& series) {
    for (auto& s : series) s = FourierSeries::constant(s.mean());
  };
  flatten(out.mortality);
  flatten(out.recruitment);
  flatten(out.biting);
  return out;
}

RossMacdonaldParams patch_submodel(const RossMacdonaldParams& params, std::size_t patch) {
  validate(params);
  if (patch >= params.patches) throw PreconditionError("patch index out of range");
  const Vector hstar = human_distribution(params);
  RossMacdonaldParams out;
  out.patches = 1;
  out.period = params.period;
  out.total_humans = hstar(idx(patch));
  out.migration = Matrix::Zero(1, 1);
  out.sigma1 = {params.sigma1[patch]};
  out.sigma2 = {params.sigma2[patch]};
  out.gamma = {params.gamma[patch]};
  out.mortality = {params.mortality[patch]};
  out.recruitment = {params.recruitment[patch]};
  out.biting = {params.biting[patch]};
  return out;
}

std::vector<double> patch_reproduction_ratios(const RossMacdonaldParams& params,
                                              const R0Options& options) {
  std::vector<double> out;
  for (std::size_t i = 0; i < params.patches; ++i) {
    out.push_back(r0_periodic(build_ross_macdonald(patch_submodel(params, i), 0.0), options).value);
  }
  return out;
}

PeriodicVFProblem build_sis_autonomous(const std::vector<double>& beta,
                                       const std::vector<double>& gamma,
                                       const ConnectivityMatrix& l, double d, double period) {
  if (beta.size() != l.size() || gamma.size() != l.size()) {
    throw PreconditionError("beta and gamma need one entry per patch");
  }
  const auto n = idx(l.size());
  Matrix v = Matrix::Zero(n, n), f = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(gamma[k] > 0.0)) throw PreconditionError("recovery rates must be positive");
    if (!(beta[k] >= 0.0)) throw PreconditionError("transmission rates must be nonnegative");
    v(i, i) = gamma[k];
    f(i, i) = beta[k];
  }
  return PeriodicVFProblem(l, PeriodicMatrixFn(period, v), PeriodicMatrixFn(period, f), d);
}

}  // namespace patchr0
