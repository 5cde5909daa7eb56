#pragma once

#include <cstddef>
#include <vector>

#include "patchr0/periodic_fn.hpp"
#include "patchr0/reproduction_ratio.hpp"

namespace patchr0 {

// Periodic Ross-Macdonald malaria model on m patches with human migration.
// Per-patch quantities are vectors of length m.
struct RossMacdonaldParams {
  std::size_t patches = 0;
  double period = 0.0;        // days
  double total_humans = 0.0;  // N^H
  Matrix migration;           // m x m, cooperative with zero column sums
  std::vector<double> sigma1;  // mosquito -> human transmission probability
  std::vector<double> sigma2;  // human -> mosquito transmission probability
  std::vector<double> gamma;   // human recovery rate, 1/day
  std::vector<FourierSeries> mortality;    // mosquito mortality mu_i(t), 1/day
  std::vector<FourierSeries> recruitment;  // mosquito recruitment eps_i(t), per day
  std::vector<FourierSeries> biting;       // biting rate beta_i(t), 1/day
};

// m = 2, T = 365, N^H = 500, sigma1 = 0.2, sigma2 = 0.3, gamma = 0.02,
// mu = 0.1, eps_1 = 12.5 - 5 cos(wt) - 5 cos(2wt), eps_2 = 12.5 - 5 cos(wt),
// beta_i = 0.028 eps_i, l_12 = l_21 = 1.
RossMacdonaldParams baseline_ross_macdonald();

// Shape checks, positivity of every rate on the 1024-point grid, H1 for the
// migration matrix. Throws PreconditionError / HypothesisError.
void validate(const RossMacdonaldParams& params);

struct DiseaseFreeSolution {
  Vector hstar;                     // humans per patch
  std::vector<FourierSeries> vstar;  // periodic mosquito populations
  double ode_residual = 0.0;        // max |V' - eps + mu V| over patches and grid
};

inline constexpr int kDiseaseFreeGridSteps = 4096;
inline constexpr std::size_t kMaxVstarHarmonics = 32;

DiseaseFreeSolution disease_free_solution(const RossMacdonaldParams& params);

// The linearization at the disease-free state: n = 2m with human infectives
// first. The problem carries the autonomous model built from period-averaged
// parameters as its time-averaged coefficients.
PeriodicVFProblem build_ross_macdonald(const RossMacdonaldParams& params, double d);

// Parameters with every periodic rate replaced by its period mean.
RossMacdonaldParams time_averaged_params(const RossMacdonaldParams& params);

// Patch i in isolation, carrying the disease-free human population it has in
// the connected model.
RossMacdonaldParams patch_submodel(const RossMacdonaldParams& params, std::size_t patch);

// R0 of each isolated patch.
std::vector<double> patch_reproduction_ratios(const RossMacdonaldParams& params,
                                              const R0Options& options = {});

// Linearized SIS patch model: V = diag(gamma), F = diag(beta), constant in t.
PeriodicVFProblem build_sis_autonomous(const std::vector<double>& beta,
                                       const std::vector<double>& gamma,
                                       const ConnectivityMatrix& l, double d, double period = 1.0);

}  // namespace patchr0
