#pragma once

// Discrete calculus on the unit torus: uniform grid, real FFTs, spectral
// derivatives, Fourier multipliers and mean-free primitives.

#include <fftw3.h>

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "eas/errors.hpp"
#include "eas/symbol.hpp"

namespace eas {

using cplx = std::complex<double>;

/// N uniform nodes x_j = -1/2 + j/N on the torus of period 1.
class Grid {
 public:
  explicit Grid(std::size_t n = 16) : n_(n) {
    if (n < 16 || (n & (n - 1)) != 0) {
      std::ostringstream msg;
      msg << "grid size must be a power of two >= 16, got " << n;
      throw PreconditionError(msg.str());
    }
  }
  std::size_t size() const { return n_; }
  double dx() const { return 1.0 / static_cast<double>(n_); }
  double node(std::size_t j) const { return -0.5 + static_cast<double>(j) * dx(); }
  /// Largest retained wavenumber under the 2/3 rule.
  std::size_t dealias_cutoff() const { return n_ / 3; }
  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_;
};

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(Grid g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw PreconditionError("field size does not match its grid");
  }
  template <class F>
  static Field sample(Grid g, F&& f) {
    Field out(g);
    for (std::size_t j = 0; j < g.size(); ++j) out.values[j] = f(g.node(j));
    return out;
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }

  /// Trapezoid integral over the torus, i.e. the grid mean.
  double mean() const {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }
  double sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) values[j] += o.values[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) values[j] -= o.values[j];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
  }
  Field& operator+=(double s) {
    for (double& v : values) v += s;
    return *this;
  }

  void check_same(const Field& o) const {
    if (!(grid == o.grid)) throw PreconditionError("fields live on different grids");
  }
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(Field a, double s) { return a *= s; }
inline Field operator*(double s, Field a) { return a *= s; }

/// Pointwise product.
inline Field times(const Field& a, const Field& b) {
  a.check_same(b);
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out.values[j] = a.values[j] * b.values[j];
  return out;
}

/// Pointwise quotient.
inline Field divide(const Field& a, const Field& b) {
  a.check_same(b);
  Field out(a.grid);
  for (std::size_t j = 0; j < a.size(); ++j) out.values[j] = a.values[j] / b.values[j];
  return out;
}

/// Coefficients c_k, k = 0..N/2, of the trigonometric interpolant
/// f(x) = sum_k c_k exp(2 pi i k (x - x_0)) (negative k by conjugation).
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;

  Spectrum() = default;
  explicit Spectrum(Grid g) : grid(g), coeffs(g.size() / 2 + 1) {}
};

namespace detail {

struct FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
inline const FftPlans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<cplx> spec(n / 2 + 1);
  auto* cs = reinterpret_cast<fftw_complex*>(spec.data());
  const int ni = static_cast<int>(n);
  FftPlans p;
  p.r2c = fftw_plan_dft_r2c_1d(ni, real.data(), cs, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.c2r = fftw_plan_dft_c2r_1d(ni, cs, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p.r2c == nullptr || p.c2r == nullptr) throw NumericError("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace detail

inline Spectrum forward(const Field& f) {
  Spectrum s(f.grid);
  const auto& plans = detail::plans_for(f.size());
  std::vector<double> in = f.values;
  fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(s.coeffs.data()));
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : s.coeffs) c *= scale;
  return s;
}

inline Field inverse(const Spectrum& s) {
  Field f(s.grid);
  const auto& plans = detail::plans_for(s.grid.size());
  std::vector<cplx> in = s.coeffs;  // c2r overwrites its input
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(in.data()), f.values.data());
  return f;
}

inline void differentiate_in_place(Spectrum& s) {
  const std::size_t half = s.grid.size() / 2;
  for (std::size_t k = 0; k < half; ++k) s.coeffs[k] *= cplx(0.0, 2.0 * std::numbers::pi * static_cast<double>(k));
  s.coeffs[half] = 0.0;
}

inline void multiply_in_place(Spectrum& s, const SymbolTable& A) {
  if (A.N != s.grid.size()) {
    std::ostringstream msg;
    msg << "symbol tabulated for N = " << A.N << " applied on a grid with N = " << s.grid.size();
    throw PreconditionError(msg.str());
  }
  const std::size_t half = s.grid.size() / 2;
  for (std::size_t k = 0; k <= half; ++k) s.coeffs[k] *= A.at_mode(static_cast<long>(k));
}

/// Primitive of a mean-free spectrum; zero and Nyquist modes set to 0.
inline void integrate_in_place(Spectrum& s) {
  const std::size_t half = s.grid.size() / 2;
  s.coeffs[0] = 0.0;
  for (std::size_t k = 1; k < half; ++k) s.coeffs[k] /= cplx(0.0, 2.0 * std::numbers::pi * static_cast<double>(k));
  s.coeffs[half] = 0.0;
}

/// 2/3 rule: modes with |k| > N/3 are zeroed.
inline void dealias_in_place(Spectrum& s) {
  const std::size_t cut = s.grid.dealias_cutoff();
  for (std::size_t k = cut + 1; k < s.coeffs.size(); ++k) s.coeffs[k] = 0.0;
}

inline Field spectral_derivative(const Field& f) {
  auto s = forward(f);
  differentiate_in_place(s);
  return inverse(s);
}

inline Field apply_multiplier(const Field& f, const SymbolTable& A) {
  auto s = forward(f);
  multiply_in_place(s, A);
  return inverse(s);
}

inline Field mean_free_primitive(const Field& theta) {
  const double m = theta.mean();
  if (std::abs(m) >= 1e-10) {
    std::ostringstream msg;
    msg << "mean_free_primitive: input mean " << m << " is not zero";
    throw PreconditionError(msg.str());
  }
  auto s = forward(theta);
  integrate_in_place(s);
  return inverse(s);
}

inline Field dealias(const Field& f) {
  auto s = forward(f);
  dealias_in_place(s);
  return inverse(s);
}

/// Spectral interpolation onto a finer grid of size m >= N.
inline Field refine(const Field& f, std::size_t m) {
  Grid fine(m);
  if (m < f.size()) throw PreconditionError("refine: target grid is coarser");
  const auto s = forward(f);
  Spectrum t(fine);
  const std::size_t half = f.size() / 2;
  for (std::size_t k = 0; k < half; ++k) t.coeffs[k] = s.coeffs[k];
  // Split the Nyquist mode symmetrically between +N/2 and -N/2.
  t.coeffs[half] = m > f.size() ? 0.5 * s.coeffs[half] : s.coeffs[half];
  return inverse(t);
}

/// Discrete L2 norm (sqrt of the grid mean of f^2).
inline double l2_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s / static_cast<double>(f.size()));
}

/// Same norm from the coefficients (Parseval).
inline double l2_norm(const Spectrum& s) {
  const std::size_t half = s.grid.size() / 2;
  double sum = std::norm(s.coeffs[0]) + std::norm(s.coeffs[half]);
  for (std::size_t k = 1; k < half; ++k) sum += 2.0 * std::norm(s.coeffs[k]);
  return std::sqrt(sum);
}

/// Evaluates the trigonometric interpolant of a field anywhere on the torus.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f) : spec_(forward(f)), x0_(f.grid.node(0)) {}

  double operator()(double x) const {
    const std::size_t half = spec_.grid.size() / 2;
    const double phase = 2.0 * std::numbers::pi * (x - x0_);
    const cplx step = std::polar(1.0, phase);
    cplx rot = step;
    double sum = spec_.coeffs[0].real();
    for (std::size_t k = 1; k < half; ++k) {
      sum += 2.0 * (spec_.coeffs[k] * rot).real();
      rot *= step;
    }
    sum += spec_.coeffs[half].real() * std::cos(phase * static_cast<double>(half));
    return sum;
  }

 private:
  Spectrum spec_;
  double x0_;
};

namespace detail {

// max over x of sign * f(x), from the best grid candidates refined by Brent.
inline double refined_extremum(const Field& f, double sign) {
  const std::size_t n = f.size();
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = sign * f[j];
    if (v >= sign * f[(j + n - 1) % n] && v >= sign * f[(j + 1) % n]) idx.push_back(j);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sign * f[a] > sign * f[b]; });
  if (idx.size() > 3) idx.resize(3);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) best = std::max(best, sign * f[j]);
  if (idx.empty()) return best;
  TrigInterpolant p(f);
  const double dx = f.grid.dx();
  for (std::size_t j : idx) {
    const double x = f.grid.node(j);
    auto neg = [&](double t) { return -sign * p(t); };
    const auto r = boost::math::tools::brent_find_minima(neg, x - dx, x + dx, 40);
    best = std::max(best, -r.second);
  }
  return best;
}

}  // namespace detail

/// Maximum of the trigonometric interpolant (grid maximum refined locally).
inline double refined_max(const Field& f) { return detail::refined_extremum(f, 1.0); }
inline double refined_min(const Field& f) { return -detail::refined_extremum(f, -1.0); }
inline double refined_sup_abs(const Field& f) { return std::max(refined_max(f), -refined_min(f)); }

}  // namespace eas
