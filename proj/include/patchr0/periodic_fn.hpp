#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "patchr0/linalg.hpp"

namespace patchr0 {

// c0 + sum_k cos[k-1] cos(2 pi k t / T) + sin[k-1] sin(2 pi k t / T)
struct FourierSeries {
  double c0 = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;

  static FourierSeries constant(double value) { return FourierSeries{value, {}, {}}; }

  std::size_t harmonics() const { return std::max(cos.size(), sin.size()); }
  double mean() const { return c0; }
  double evaluate(double t, double period) const;
  // Time derivative.
  double derivative(double t, double period) const;
  // Smallest value on an equispaced grid of `points` samples over a period.
  double min_on_grid(double period, std::size_t points = 1024) const;

  FourierSeries operator*(double s) const;
  FourierSeries operator+(const FourierSeries& other) const;
  // Exact product; the result has harmonics() of both summed.
  FourierSeries operator*(const FourierSeries& other) const;

  // Least-squares fit of `harmonics` harmonics to equispaced samples
  // f(k T / N), k = 0..N-1 (a truncated discrete Fourier transform).
  static FourierSeries fit(const std::vector<double>& samples, std::size_t harmonics);
};

// A T-periodic n x n matrix function, stored as coefficient matrices
// C0 + sum_k A_k cos(2 pi k t / T) + B_k sin(2 pi k t / T).
class PeriodicMatrixFn {
 public:
  PeriodicMatrixFn(double period, Matrix constant);
  PeriodicMatrixFn(double period, Matrix constant, std::vector<Matrix> cos_terms,
                   std::vector<Matrix> sin_terms);

  // Builds from per-entry series, entries[i][j].
  static PeriodicMatrixFn from_entries(double period,
                                       const std::vector<std::vector<FourierSeries>>& entries);

  std::size_t size() const { return static_cast<std::size_t>(constant_.rows()); }
  double period() const { return period_; }
  std::size_t harmonics() const { return cos_.size(); }

  Matrix evaluate(double t) const;
  // Period average (the constant coefficient).
  const Matrix& mean() const { return constant_; }
  const std::vector<Matrix>& cos_terms() const { return cos_; }
  const std::vector<Matrix>& sin_terms() const { return sin_; }
  FourierSeries entry(std::size_t i, std::size_t j) const;

  // Applies a linear map to every coefficient matrix. Exact for maps such as
  // M -> P M Q because evaluation is linear in the coefficients.
  PeriodicMatrixFn map_coefficients(const std::function<Matrix(const Matrix&)>& f) const;

  PeriodicMatrixFn operator+(const PeriodicMatrixFn& other) const;
  PeriodicMatrixFn operator-(const PeriodicMatrixFn& other) const;
  PeriodicMatrixFn operator*(double s) const;
  PeriodicMatrixFn plus_constant(const Matrix& m) const;

  // Sign checks on an equispaced grid of `points` samples.
  bool cooperative_on_grid(double tol = 1e-12, std::size_t points = 1024) const;
  bool nonnegative_on_grid(double tol = 1e-12, std::size_t points = 1024) const;
  // Max over the grid of max |entry|.
  double max_abs_on_grid(std::size_t points = 1024) const;
  // Union of nonzero patterns of all coefficient matrices (1.0 where any
  // coefficient is nonzero).
  Matrix support_pattern() const;

 private:
  double period_;
  Matrix constant_;
  std::vector<Matrix> cos_;
  std::vector<Matrix> sin_;
};

}  // namespace patchr0
