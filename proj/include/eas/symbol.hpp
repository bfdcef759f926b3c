#pragma once

// Fourier symbol A(zeta) of the Levy operator with kernel phi,
//   A(zeta) = integral over R\{0} of (1 - cos(zeta x)) phi(x) dx,
// tabulated on the discrete wavenumbers zeta_k = 2 pi k of a period-1 grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "eas/errors.hpp"
#include "eas/kernel.hpp"
#include "eas/quadrature.hpp"

namespace eas {

enum class SymbolSource { closed_form, quadrature, derived };

/// A(zeta_k) for k = -N/2, ..., N/2 - 1, stored in that order.
struct SymbolTable {
  std::size_t N = 0;
  std::vector<double> wavenumbers;
  std::vector<double> values;
  SymbolSource source = SymbolSource::closed_form;

  /// A(2 pi k) for |k| <= N/2 (k = N/2 read from -N/2 by evenness).
  double at_mode(long k) const {
    const long half = static_cast<long>(N / 2);
    if (k == half) k = -half;
    return values[static_cast<std::size_t>(k + half)];
  }

  double max_positive() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

inline double symbol_closed_form(double alpha, double beta, double mu, double zeta) {
  const double z = std::abs(zeta);
  if (z == 0.0) return 0.0;
  return std::pow(z, alpha) - mu * std::pow(z, beta);
}

template <class SymbolFn>
SymbolTable tabulate_symbol(std::size_t N, SymbolFn&& symbol, SymbolSource source) {
  SymbolTable t;
  t.N = N;
  t.source = source;
  t.wavenumbers.resize(N);
  t.values.resize(N);
  const long half = static_cast<long>(N / 2);
  for (std::size_t i = 0; i < N; ++i) {
    const long k = static_cast<long>(i) - half;
    t.wavenumbers[i] = 2.0 * std::numbers::pi * static_cast<double>(k);
  }
  // Evaluate on k >= 0 only and mirror, so evenness is exact.
  for (long k = 0; k <= half; ++k) {
    const double v = k == 0 ? 0.0 : symbol(2.0 * std::numbers::pi * static_cast<double>(k));
    if (k < half) t.values[static_cast<std::size_t>(k + half)] = v;
    t.values[static_cast<std::size_t>(-k + half)] = v;
  }
  return t;
}

inline SymbolTable closed_form_table(const PowerLawPairKernel& k, std::size_t N) {
  return tabulate_symbol(
      N, [&](double z) { return symbol_closed_form(k.alpha(), k.beta(), k.mu(), z); },
      SymbolSource::closed_form);
}

/// Levy-Khintchine quadrature of A(zeta) with absolute tolerance `abs_tol`.
///
/// The even integrand is integrated on (0, a0] in half-period panels; the
/// first panel uses x = x1 s^{2/(2-a)}, which turns the |x|^{1-a} behaviour
/// at the origin into a C^1 integrand. On [a0, inf) the non-oscillatory part is
/// integrated by exp-sinh and the cosine part by Ooura's Fourier rule, so no
/// truncation remainder is left over. Kernels with compact support are
/// integrated panel-wise up to the support.
inline quad::Result symbol_quadrature(const Kernel& kernel, double zeta, double abs_tol = 1e-8) {
  const double z = std::abs(zeta);
  if (z == 0.0) return {};
  const auto consts = kernel_constants(kernel);
  const double alpha = consts.alpha;
  const double a0 = consts.a0;
  const double support = kernel_support(kernel);
  auto phi = [&](double x) { return eval_phi(kernel, x); };
  auto integrand = [&](double x) {
    if (x == 0.0) return 0.0;
    const double s = std::sin(0.5 * z * x);
    return 2.0 * s * s * phi(x);
  };

  const double half_period = std::numbers::pi / z;
  const double near_end = std::isfinite(support) ? support : a0;
  const std::size_t panels =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(near_end / half_period)));
  const double h = near_end / static_cast<double>(panels);
  const double panel_tol = 0.25 * abs_tol / static_cast<double>(panels + 1);
  // Large symbols cannot be resolved below double round-off, so the
  // absolute tolerance is floored at kRelFloor relative to the value.
  constexpr double kRelFloor = 1e-12;
  quad::AdaptiveOptions opt{panel_tol, kRelFloor, 4000};

  quad::Result total;
  {
    // First panel on (0, x1] with the singularity-absorbing substitution.
    const double x1 = std::min(h, a0);
    const double p = 2.0 / (2.0 - alpha);
    auto mapped = [&](double s) {
      const double x = x1 * std::pow(s, p);
      if (x <= 0.0) return 0.0;
      return integrand(x) * x1 * p * std::pow(s, p - 1.0);
    };
    total += quad::integrate(mapped, 0.0, 1.0, opt);
    double lo = x1;
    for (std::size_t i = 1; i < panels; ++i) {
      const double hi = h * static_cast<double>(i + 1);
      total += quad::integrate(integrand, lo, hi, opt);
      lo = hi;
    }
    if (lo < near_end) total += quad::integrate(integrand, lo, near_end, opt);
  }

  if (!std::isfinite(support)) {
    // integral_{a0}^inf phi - integral_{a0}^inf cos(z x) phi(x) dx
    auto shifted = [&](double t) { return phi(t + a0); };
    const auto plain = quad::integrate_to_infinity(phi, a0);
    const auto c = quad::fourier_cos(shifted, z);
    const auto s = quad::fourier_sin(shifted, z);
    const double osc = std::cos(z * a0) * c.value - std::sin(z * a0) * s.value;
    total.value += plain.value - osc;
    total.error += plain.error + c.error + s.error;
  }

  total.value *= 2.0;
  total.error *= 2.0;
  if (total.error > std::max(abs_tol, kRelFloor * std::abs(total.value))) {
    std::ostringstream msg;
    msg << "symbol quadrature at zeta = " << zeta << " reached error " << total.error
        << " above tolerance " << abs_tol;
    throw NumericError(msg.str(), total.error);
  }
  return total;
}

inline SymbolTable quadrature_table(const Kernel& kernel, std::size_t N, double abs_tol = 1e-8) {
  return tabulate_symbol(
      N, [&](double z) { return symbol_quadrature(kernel, z, abs_tol).value; },
      SymbolSource::quadrature);
}

/// Closed form for the model kernel, quadrature otherwise.
inline SymbolTable symbol_table_for(const Kernel& kernel, std::size_t N) {
  if (const auto* p = std::get_if<PowerLawPairKernel>(&kernel)) return closed_form_table(*p, N);
  return quadrature_table(kernel, N);
}

struct SymbolBoundsReport {
  double C_lower = 1.0;  ///< smallest C' >= 1 with A >= |z|^a / C' - C'/2
  double C_upper = 1.0;  ///< smallest C >= 1 with A <= C |z|^a + C
  bool lower_pass = false;
  bool upper_pass = false;
  double worst_lower_zeta = 0.0;
  double worst_upper_zeta = 0.0;
  /// sup of |A'(z)| |z|^{1-a} over |z| >= max{1/a0, 1} from central differences
  double derivative_scaling_sup = 0.0;
  double derivative_scaling_zeta = 0.0;
  /// constants from the structural bounds (NaN when not supplied)
  double C_lower_analytic = std::numeric_limits<double>::quiet_NaN();
  double C_upper_analytic = std::numeric_limits<double>::quiet_NaN();
};

inline SymbolBoundsReport verify_symbol_bounds(const SymbolTable& table, double alpha, double a0 = 0.5,
                                               const ShortRangeConstants* analytic = nullptr) {
  if (table.values.empty()) throw PreconditionError("verify_symbol_bounds: empty table");
  SymbolBoundsReport r;
  // Per zeta, the lower bound |z|^a/C - C/2 <= A is monotone in C; its
  // threshold is the positive root of C^2/2 + A C - |z|^a = 0.
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    const double z = table.wavenumbers[i];
    const double A = table.values[i];
    const double za = std::pow(std::abs(z), alpha);
    const double c_lo = -A + std::sqrt(A * A + 2.0 * za);
    if (c_lo > r.C_lower) {
      r.C_lower = c_lo;
      r.worst_lower_zeta = z;
    }
    const double c_up = A / (za + 1.0);
    if (c_up > r.C_upper) {
      r.C_upper = c_up;
      r.worst_upper_zeta = z;
    }
  }
  r.lower_pass = true;
  r.upper_pass = true;
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    const double za = std::pow(std::abs(table.wavenumbers[i]), alpha);
    const double A = table.values[i];
    const double slack = 1e-12 * std::max(1.0, za);
    if (A < za / r.C_lower - 0.5 * r.C_lower - slack) r.lower_pass = false;
    if (A > r.C_upper * za + r.C_upper + slack) r.upper_pass = false;
  }
  // Central differences; stencils touching zeta = 0 are skipped because A is
  // not differentiable there for alpha <= 1.
  const double z_min = std::max(1.0 / a0, 1.0);
  for (std::size_t i = 1; i + 1 < table.values.size(); ++i) {
    const double z = table.wavenumbers[i];
    if (std::abs(z) < z_min) continue;
    if (table.wavenumbers[i - 1] == 0.0 || table.wavenumbers[i + 1] == 0.0) continue;
    const double d = (table.values[i + 1] - table.values[i - 1]) /
                     (table.wavenumbers[i + 1] - table.wavenumbers[i - 1]);
    const double scaled = std::abs(d) * std::pow(std::abs(z), 1.0 - alpha);
    if (scaled > r.derivative_scaling_sup) {
      r.derivative_scaling_sup = scaled;
      r.derivative_scaling_zeta = z;
    }
  }
  if (analytic != nullptr) {
    const double ca = levy_normalization(analytic->alpha);
    const double c1 = analytic->c1;
    const double shift = 2.0 / analytic->alpha / c1 * std::pow(analytic->a0, -analytic->alpha) + analytic->c2;
    r.C_lower_analytic = std::max({1.0, c1 * ca, 2.0 * shift});
    r.C_upper_analytic = std::max(c1 / ca, 2.0 * analytic->c2);
  }
  return r;
}

/// sqrt(C' + A(zeta)) elementwise.
inline SymbolTable sqrt_shifted_symbol(const SymbolTable& table, double C_prime) {
  SymbolTable out = table;
  out.source = SymbolSource::derived;
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    const double rad = C_prime + table.values[i];
    if (!(rad > 0.0)) {
      std::ostringstream msg;
      msg << "sqrt_shifted_symbol: C' + A(zeta) = " << rad << " <= 0 at zeta = " << table.wavenumbers[i];
      throw PreconditionError(msg.str());
    }
    out.values[i] = std::sqrt(rad);
  }
  return out;
}

}  // namespace eas
