#include "patchr0/periodic_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

namespace {

double phase_angle(double t, double period) {
  return 2.0 * std::numbers::pi * std::fmod(t, period) / period;
}

double coeff(const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; }

void trim(std::vector<double>& v) {
  while (!v.empty() && v.back() == 0.0) v.pop_back();
}

}  // namespace

double FourierSeries::evaluate(double t, double period) const {
  const double w = phase_angle(t, period);
  double v = c0;
  for (std::size_t k = 0; k < harmonics(); ++k) {
    const double a = w * static_cast<double>(k + 1);
    v += coeff(cos, k) * std::cos(a) + coeff(sin, k) * std::sin(a);
  }
  return v;
}

double FourierSeries::derivative(double t, double period) const {
  const double w = phase_angle(t, period);
  const double base = 2.0 * std::numbers::pi / period;
  double v = 0.0;
  for (std::size_t k = 0; k < harmonics(); ++k) {
    const double kk = static_cast<double>(k + 1);
    const double a = w * kk;
    v += base * kk * (-coeff(cos, k) * std::sin(a) + coeff(sin, k) * std::cos(a));
  }
  return v;
}

double FourierSeries::min_on_grid(double period, std::size_t points) const {
  double lo = evaluate(0.0, period);
  for (std::size_t i = 1; i < points; ++i) {
    lo = std::min(lo, evaluate(period * static_cast<double>(i) / static_cast<double>(points),
                               period));
  }
  return lo;
}

FourierSeries FourierSeries::operator*(double s) const {
  FourierSeries out = *this;
  out.c0 *= s;
  for (auto& x : out.cos) x *= s;
  for (auto& x : out.sin) x *= s;
  return out;
}

FourierSeries FourierSeries::operator+(const FourierSeries& other) const {
  FourierSeries out;
  out.c0 = c0 + other.c0;
  const auto h = std::max(harmonics(), other.harmonics());
  out.cos.resize(h);
  out.sin.resize(h);
  for (std::size_t k = 0; k < h; ++k) {
    out.cos[k] = coeff(cos, k) + coeff(other.cos, k);
    out.sin[k] = coeff(sin, k) + coeff(other.sin, k);
  }
  trim(out.cos);
  trim(out.sin);
  return out;
}

FourierSeries FourierSeries::operator*(const FourierSeries& other) const {
  // Work in complex exponential form: f = sum_{k=-K}^{K} z_k e^{ikwt}.
  const auto ka = harmonics(), kb = other.harmonics(), kc = ka + kb;
  using C = std::complex<double>;
  auto to_complex = [](const FourierSeries& f, std::size_t k_max) {
    std::vector<C> z(2 * k_max + 1);
    z[k_max] = f.c0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      const double a = coeff(f.cos, k - 1), b = coeff(f.sin, k - 1);
      z[k_max + k] = C(a, -b) / 2.0;
      z[k_max - k] = C(a, b) / 2.0;
    }
    return z;
  };
  const auto za = to_complex(*this, ka), zb = to_complex(other, kb);
  std::vector<C> zc(2 * kc + 1);
  for (std::size_t i = 0; i < za.size(); ++i) {
    for (std::size_t j = 0; j < zb.size(); ++j) zc[i + j] += za[i] * zb[j];
  }
  FourierSeries out;
  out.c0 = zc[kc].real();
  out.cos.resize(kc);
  out.sin.resize(kc);
  for (std::size_t k = 1; k <= kc; ++k) {
    const C s = zc[kc + k] + zc[kc - k];
    const C d = zc[kc - k] - zc[kc + k];
    out.cos[k - 1] = s.real();
    out.sin[k - 1] = (d / C(0.0, 1.0)).real();
  }
  trim(out.cos);
  trim(out.sin);
  return out;
}

FourierSeries FourierSeries::fit(const std::vector<double>& samples, std::size_t harmonics) {
  const auto n = samples.size();
  if (n == 0 || 2 * harmonics >= n) {
    throw PreconditionError("FourierSeries::fit: need more than 2*harmonics samples");
  }
  const double nn = static_cast<double>(n);
  FourierSeries out;
  double sum = 0.0;
  for (double s : samples) sum += s;
  out.c0 = sum / nn;
  out.cos.resize(harmonics);
  out.sin.resize(harmonics);
  for (std::size_t k = 1; k <= harmonics; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k * i % n) / nn;
      a += samples[i] * std::cos(ang);
      b += samples[i] * std::sin(ang);
    }
    out.cos[k - 1] = 2.0 * a / nn;
    out.sin[k - 1] = 2.0 * b / nn;
  }
  return out;
}

PeriodicMatrixFn::PeriodicMatrixFn(double period, Matrix constant)
    : PeriodicMatrixFn(period, std::move(constant), {}, {}) {}

PeriodicMatrixFn::PeriodicMatrixFn(double period, Matrix constant, std::vector<Matrix> cos_terms,
                                   std::vector<Matrix> sin_terms)
    : period_(period),
      constant_(std::move(constant)),
      cos_(std::move(cos_terms)),
      sin_(std::move(sin_terms)) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw PreconditionError("periodic matrix function: period must be positive");
  }
  require_square(constant_, "periodic matrix function");
  const auto h = std::max(cos_.size(), sin_.size());
  const Matrix zero = Matrix::Zero(constant_.rows(), constant_.cols());
  cos_.resize(h, zero);
  sin_.resize(h, zero);
  for (std::size_t k = 0; k < h; ++k) {
    if (cos_[k].rows() != constant_.rows() || cos_[k].cols() != constant_.cols() ||
        sin_[k].rows() != constant_.rows() || sin_[k].cols() != constant_.cols()) {
      throw PreconditionError("periodic matrix function: harmonic " + std::to_string(k + 1) +
                              " has the wrong shape");
    }
    if (!cos_[k].allFinite() || !sin_[k].allFinite()) {
      throw PreconditionError("periodic matrix function: non-finite coefficient");
    }
  }
}

PeriodicMatrixFn PeriodicMatrixFn::from_entries(
    double period, const std::vector<std::vector<FourierSeries>>& entries) {
  const auto n = entries.size();
  std::size_t h = 0;
  for (const auto& row : entries) {
    if (row.size() != n) throw PreconditionError("from_entries: entry table is not square");
    for (const auto& e : row) h = std::max(h, e.harmonics());
  }
  const auto ni = static_cast<Eigen::Index>(n);
  Matrix c0 = Matrix::Zero(ni, ni);
  std::vector<Matrix> cs(h, Matrix::Zero(ni, ni)), ss(h, Matrix::Zero(ni, ni));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = entries[i][j];
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      c0(ii, jj) = e.c0;
      for (std::size_t k = 0; k < h; ++k) {
        cs[k](ii, jj) = coeff(e.cos, k);
        ss[k](ii, jj) = coeff(e.sin, k);
      }
    }
  }
  return PeriodicMatrixFn(period, std::move(c0), std::move(cs), std::move(ss));
}

Matrix PeriodicMatrixFn::evaluate(double t) const {
  Matrix out = constant_;
  const double w = phase_angle(t, period_);
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double a = w * static_cast<double>(k + 1);
    out.noalias() += std::cos(a) * cos_[k];
    out.noalias() += std::sin(a) * sin_[k];
  }
  return out;
}

FourierSeries PeriodicMatrixFn::entry(std::size_t i, std::size_t j) const {
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  FourierSeries f;
  f.c0 = constant_(ii, jj);
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    f.cos.push_back(cos_[k](ii, jj));
    f.sin.push_back(sin_[k](ii, jj));
  }
  trim(f.cos);
  trim(f.sin);
  return f;
}

PeriodicMatrixFn PeriodicMatrixFn::map_coefficients(
    const std::function<Matrix(const Matrix&)>& f) const {
  std::vector<Matrix> cs, ss;
  cs.reserve(cos_.size());
  ss.reserve(sin_.size());
  for (const auto& m : cos_) cs.push_back(f(m));
  for (const auto& m : sin_) ss.push_back(f(m));
  return PeriodicMatrixFn(period_, f(constant_), std::move(cs), std::move(ss));
}

PeriodicMatrixFn PeriodicMatrixFn::operator+(const PeriodicMatrixFn& other) const {
  if (other.size() != size() || other.period_ != period_) {
    throw PreconditionError("periodic matrix functions differ in size or period");
  }
  const auto h = std::max(harmonics(), other.harmonics());
  const Matrix zero = Matrix::Zero(constant_.rows(), constant_.cols());
  std::vector<Matrix> cs(h, zero), ss(h, zero);
  for (std::size_t k = 0; k < h; ++k) {
    if (k < cos_.size()) {
      cs[k] += cos_[k];
      ss[k] += sin_[k];
    }
    if (k < other.cos_.size()) {
      cs[k] += other.cos_[k];
      ss[k] += other.sin_[k];
    }
  }
  return PeriodicMatrixFn(period_, constant_ + other.constant_, std::move(cs), std::move(ss));
}

PeriodicMatrixFn PeriodicMatrixFn::operator-(const PeriodicMatrixFn& other) const {
  return *this + other * -1.0;
}

PeriodicMatrixFn PeriodicMatrixFn::operator*(double s) const {
  return map_coefficients([s](const Matrix& m) -> Matrix { return s * m; });
}

PeriodicMatrixFn PeriodicMatrixFn::plus_constant(const Matrix& m) const {
  PeriodicMatrixFn out = *this;
  if (m.rows() != constant_.rows() || m.cols() != constant_.cols()) {
    throw PreconditionError("plus_constant: dimension mismatch");
  }
  out.constant_ += m;
  return out;
}

bool PeriodicMatrixFn::cooperative_on_grid(double tol, std::size_t points) const {
  for (std::size_t s = 0; s < points; ++s) {
    const Matrix m = evaluate(period_ * static_cast<double>(s) / static_cast<double>(points));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i != j && m(i, j) < -tol) return false;
      }
    }
  }
  return true;
}

bool PeriodicMatrixFn::nonnegative_on_grid(double tol, std::size_t points) const {
  for (std::size_t s = 0; s < points; ++s) {
    const Matrix m = evaluate(period_ * static_cast<double>(s) / static_cast<double>(points));
    if (m.minCoeff() < -tol) return false;
  }
  return true;
}

double PeriodicMatrixFn::max_abs_on_grid(std::size_t points) const {
  double out = 0.0;
  for (std::size_t s = 0; s < points; ++s) {
    const Matrix m = evaluate(period_ * static_cast<double>(s) / static_cast<double>(points));
    out = std::max(out, m.cwiseAbs().maxCoeff());
  }
  return out;
}

Matrix PeriodicMatrixFn::support_pattern() const {
  Matrix pattern = (constant_.array() != 0.0).cast<double>().matrix();
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    pattern += (cos_[k].array() != 0.0).cast<double>().matrix();
    pattern += (sin_[k].array() != 0.0).cast<double>().matrix();
  }
  return (pattern.array() != 0.0).cast<double>().matrix();
}

}  // namespace patchr0
