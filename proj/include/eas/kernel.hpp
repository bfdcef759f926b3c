#pragma once

// Influence functions: the two-power model kernel, general user kernels
// declared against the short-range/long-range structural assumptions, and
// their periodization on the unit torus [-1/2, 1/2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "eas/errors.hpp"
#include "eas/quadrature.hpp"

namespace eas {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Normalization of the 1D fractional Laplacian kernel,
/// c_a = 2^a Gamma((1+a)/2) / (sqrt(pi) |Gamma(-a/2)|).
inline double levy_normalization(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    std::ostringstream msg;
    msg << "levy_normalization: alpha = " << alpha << " outside (0, 2)";
    throw DomainError(msg.str());
  }
  return std::pow(2.0, alpha) * std::tgamma(0.5 * (1.0 + alpha)) /
         (std::sqrt(std::numbers::pi) * std::abs(std::tgamma(-0.5 * alpha)));
}

/// Structural constants of a kernel: short-range exponent alpha, radius a0,
/// comparability constant c1 and tail-integral bound c2.
struct ShortRangeConstants {
  double alpha = 1.0;
  double a0 = 0.5;
  double c1 = 1.0;
  double c2 = 0.0;
};

namespace detail {

// sum_{k >= 0} (y + k)^{-s} for y >= 1 by Euler-Maclaurin, s > 1.
inline double power_tail_sum(double s, double y) {
  const double ys = std::pow(y, -s);
  double sum = y * ys / (s - 1.0) + 0.5 * ys;
  const double y2 = 1.0 / (y * y);
  double fall = s;                       // s (s+1) ... rising products
  double yp = ys / y;                    // y^{-s-1}
  sum += fall / 12.0 * yp;
  fall *= (s + 1.0) * (s + 2.0);
  yp *= y2;
  sum -= fall / 720.0 * yp;
  fall *= (s + 3.0) * (s + 4.0);
  yp *= y2;
  sum += fall / 30240.0 * yp;
  return sum;
}

}  // namespace detail

/// phi(x) = c_a |x|^{-1-a} - mu c_b |x|^{-1-b}, 0 < b < a < 2, mu >= 0.
class PowerLawPairKernel {
 public:
  PowerLawPairKernel(double alpha, double beta, double mu)
      : alpha_(alpha), beta_(beta), mu_(mu) {
    if (!(beta > 0.0 && beta < alpha && alpha < 2.0)) {
      std::ostringstream msg;
      msg << "power-law pair kernel needs 0 < beta < alpha < 2, got alpha = " << alpha
          << ", beta = " << beta;
      throw DomainError(msg.str());
    }
    if (!(mu >= 0.0)) throw DomainError("power-law pair kernel needs mu >= 0");
    c_alpha_ = levy_normalization(alpha);
    c_beta_ = levy_normalization(beta);
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  double c_alpha() const { return c_alpha_; }
  double c_beta() const { return c_beta_; }
  double support() const { return kInf; }

  double operator()(double x) const {
    if (x == 0.0) throw DomainError("influence function is singular at x = 0");
    const double r = std::abs(x);
    return c_alpha_ * std::pow(r, -1.0 - alpha_) - mu_ * c_beta_ * std::pow(r, -1.0 - beta_);
  }

  /// sum_{k >= first} [phi(k + x) + phi(k - x)] for |x| <= 1/2, first >= 1.
  double image_tail(double x, long first) const {
    const double m = static_cast<double>(first);
    auto both = [&](double s) {
      return detail::power_tail_sum(s, m + x) + detail::power_tail_sum(s, m - x);
    };
    return c_alpha_ * both(1.0 + alpha_) - mu_ * c_beta_ * both(1.0 + beta_);
  }

 private:
  double alpha_, beta_, mu_;
  double c_alpha_ = 0.0, c_beta_ = 0.0;
};

struct StructuralRadii {
  double alignment_radius = kInf;     ///< phi within [c_a/2, c_a] |x|^{-1-a} below this
  double misalignment_radius = kInf;  ///< phi < 0 beyond this
};

inline StructuralRadii structural_radii(const PowerLawPairKernel& k) {
  if (k.mu() == 0.0) return {};
  const double p = 1.0 / (k.alpha() - k.beta());
  const double ratio = k.c_alpha() / (k.mu() * k.c_beta());
  return {std::pow(0.5 * ratio, p), std::pow(ratio, p)};
}

/// A user kernel: evaluator plus declared structural constants. The evaluator
/// is called on |x|, so even symmetry holds by construction.
class GeneralKernel {
 public:
  GeneralKernel(ShortRangeConstants declared, std::function<double(double)> evaluator,
                double support = kInf)
      : consts_(declared), eval_(std::move(evaluator)), support_(support) {
    if (!(consts_.alpha > 0.0 && consts_.alpha < 2.0))
      throw DomainError("general kernel needs alpha in (0, 2)");
    if (!(consts_.a0 > 0.0 && consts_.a0 <= 0.5))
      throw DomainError("general kernel needs a0 in (0, 1/2]");
    if (!(consts_.c1 >= 1.0)) throw DomainError("general kernel needs c1 >= 1");
    if (!(consts_.c2 > 0.0)) throw DomainError("general kernel needs c2 > 0");
    if (!eval_) throw PreconditionError("general kernel needs an evaluator");
  }

  double alpha() const { return consts_.alpha; }
  const ShortRangeConstants& declared() const { return consts_; }
  double support() const { return support_; }

  double operator()(double x) const {
    if (x == 0.0) throw DomainError("influence function is singular at x = 0");
    const double r = std::abs(x);
    return r > support_ ? 0.0 : eval_(r);
  }

  /// sum_{k >= first} [phi(k + x) + phi(k - x)]; exact zero past the
  /// support, otherwise the midpoint-rule integral of the tail.
  double image_tail(double x, long first) const {
    const double m = static_cast<double>(first) - 0.5;
    if (m - 0.5 > support_) return 0.0;
    auto tail_from = [&](double lo) {
      if (std::isfinite(support_)) {
        if (lo >= support_) return 0.0;
        return quad::integrate([&](double t) { return (*this)(t); }, lo, support_,
                               {1e-13, 1e-12, 2000})
            .value;
      }
      return quad::integrate_to_infinity([&](double t) { return (*this)(t); }, lo).value;
    };
    return tail_from(m + x) + tail_from(m - x);
  }

 private:
  ShortRangeConstants consts_;
  std::function<double(double)> eval_;
  double support_;
};

/// Kernel read from a table of (x, phi(x)) with x > 0 ascending. Between
/// nodes phi(x) |x|^{1+a} is interpolated linearly in log x; below the first
/// node it is held constant (pure power law); beyond the last node phi = 0.
inline GeneralKernel tabulated_kernel(std::vector<std::pair<double, double>> table,
                                      ShortRangeConstants declared) {
  if (table.size() < 2) throw PreconditionError("kernel table needs at least two rows");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!(table[i].first > 0.0)) throw PreconditionError("kernel table abscissae must be positive");
    if (i > 0 && !(table[i].first > table[i - 1].first))
      throw PreconditionError("kernel table abscissae must be strictly increasing");
  }
  const double a = declared.alpha;
  std::vector<double> logx(table.size()), q(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    logx[i] = std::log(table[i].first);
    q[i] = table[i].second * std::pow(table[i].first, 1.0 + a);
  }
  const double support = table.back().first;
  auto eval = [logx, q, a](double r) {
    const double lr = std::log(r);
    double scaled;
    if (lr <= logx.front()) {
      scaled = q.front();
    } else if (lr >= logx.back()) {
      scaled = q.back();
    } else {
      const auto it = std::upper_bound(logx.begin(), logx.end(), lr);
      const std::size_t j = static_cast<std::size_t>(it - logx.begin());
      const double w = (lr - logx[j - 1]) / (logx[j] - logx[j - 1]);
      scaled = (1.0 - w) * q[j - 1] + w * q[j];
    }
    return scaled * std::pow(r, -1.0 - a);
  };
  return GeneralKernel(declared, eval, support);
}

using Kernel = std::variant<PowerLawPairKernel, GeneralKernel>;

inline double eval_phi(const Kernel& k, double x) {
  return std::visit([x](const auto& kk) { return kk(x); }, k);
}

inline double kernel_alpha(const Kernel& k) {
  return std::visit([](const auto& kk) { return kk.alpha(); }, k);
}

inline double kernel_support(const Kernel& k) {
  return std::visit([](const auto& kk) { return kk.support(); }, k);
}

/// 2 * integral of |phi| over [a0, support), splitting at sign changes given
/// in `breaks`.
template <class Phi>
double tail_abs_integral(const Phi& phi, double a0, double support, std::vector<double> breaks = {}) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [&](double b) { return !(b > a0 && b < support); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  auto absphi = [&](double t) { return std::abs(phi(t)); };
  double lo = a0;
  double total = 0.0;
  for (double b : breaks) {
    total += quad::integrate(absphi, lo, b, {1e-13, 1e-13, 4000}).value;
    lo = b;
  }
  if (std::isfinite(support)) {
    total += quad::integrate(absphi, lo, support, {1e-13, 1e-13, 4000}).value;
  } else {
    total += quad::integrate_to_infinity(absphi, lo).value;
  }
  return 2.0 * total;
}

/// Effective (a0, c1, c2) of the model kernel: a0 = min{1/2, alignment
/// radius}; c1 the tightest constant with phi |x|^{1+a} in [1/c1, c1] on
/// (0, a0]; c2 by quadrature of the tail.
inline ShortRangeConstants derive_constants(const PowerLawPairKernel& k) {
  const auto radii = structural_radii(k);
  ShortRangeConstants c;
  c.alpha = k.alpha();
  c.a0 = std::min(0.5, radii.alignment_radius);
  // phi |x|^{1+a} = c_a - mu c_b |x|^{a-b} decreases in |x|.
  const double q_min = k.c_alpha() - k.mu() * k.c_beta() * std::pow(c.a0, k.alpha() - k.beta());
  c.c1 = std::max({1.0, k.c_alpha(), 1.0 / q_min});
  std::vector<double> breaks;
  if (std::isfinite(radii.misalignment_radius)) breaks.push_back(radii.misalignment_radius);
  c.c2 = tail_abs_integral(k, c.a0, kInf, breaks);
  return c;
}

inline ShortRangeConstants kernel_constants(const Kernel& k) {
  if (const auto* p = std::get_if<PowerLawPairKernel>(&k)) return derive_constants(*p);
  return std::get<GeneralKernel>(k).declared();
}

struct KernelValidation {
  bool comparability = true;   ///< phi |x|^{1+a} in [1/c1, c1] on the sample
  bool monotone = true;        ///< phi non-increasing on the sample
  bool tail_bound = true;      ///< tail integral <= c2
  double min_scaled = kInf;    ///< min of phi |x|^{1+a} on the sample
  double max_scaled = -kInf;
  double tail_integral = 0.0;
  bool ok() const { return comparability && monotone && tail_bound; }
};

/// Sampled check of the short-range assumptions on a 256-point log-spaced
/// sample of (0, a0] and of the long-range tail bound by quadrature.
inline KernelValidation validate(const GeneralKernel& k, double quad_tol = 1e-8) {
  const auto& c = k.declared();
  KernelValidation v;
  constexpr int kSamples = 256;
  double prev = kInf;
  for (int i = 0; i < kSamples; ++i) {
    const double x = c.a0 * std::pow(10.0, -6.0 * (1.0 - static_cast<double>(i) / (kSamples - 1)));
    const double phi = k(x);
    const double scaled = phi * std::pow(x, 1.0 + c.alpha);
    v.min_scaled = std::min(v.min_scaled, scaled);
    v.max_scaled = std::max(v.max_scaled, scaled);
    if (phi > prev) v.monotone = false;
    prev = phi;
  }
  v.comparability = v.min_scaled >= 1.0 / c.c1 && v.max_scaled <= c.c1;
  v.tail_integral = tail_abs_integral(k, c.a0, k.support());
  v.tail_bound = v.tail_integral <= c.c2 + quad_tol;
  return v;
}

/// Constants of the periodized kernel: short-range radius r0 and long-range
/// sup bound c3.
struct PeriodicConstants {
  double r0 = 0.0;
  double c3 = 0.0;
};

inline PeriodicConstants periodic_constants(const ShortRangeConstants& c) {
  if (!(c.a0 > 0.0 && c.c1 > 0.0 && c.c2 > 0.0))
    throw DomainError("periodic_constants: a0, c1, c2 must be positive");
  PeriodicConstants p;
  p.r0 = std::min(c.a0, std::pow(1.0 / (6.0 * c.c1 * c.c2), 1.0 / (1.0 + c.alpha)));
  p.c3 = c.c1 * std::pow(p.r0, -(1.0 + c.alpha)) + c.c2 * (1.0 + 1.0 / c.a0);
  return p;
}

/// phi^S(x) = sum over integer shifts of phi(x + k) on the unit torus.
class PeriodizedKernel {
 public:
  struct Value {
    double value = 0.0;  ///< truncated image sum plus the tail correction
    double tail = 0.0;   ///< the tail correction (images with |k| > K)
  };

  explicit PeriodizedKernel(Kernel base, int images = 64)
      : base_(std::move(base)), images_(images) {
    if (images_ < 1) throw PreconditionError("periodization needs at least one image");
    consts_ = kernel_constants(base_);
    periodic_ = periodic_constants(consts_);
  }

  const Kernel& base() const { return base_; }
  int images() const { return images_; }
  const ShortRangeConstants& constants() const { return consts_; }
  double r0() const { return periodic_.r0; }
  double c3() const { return periodic_.c3; }

  Value eval(double x) const {
    x -= std::round(x);  // wrap to [-1/2, 1/2]
    if (x == 0.0) throw DomainError("periodic influence function is singular at x = 0");
    Value out;
    // Pair the images so that the sum is exactly even in x.
    double sum = eval_phi(base_, x);
    for (int k = images_; k >= 1; --k) {
      sum += eval_phi(base_, static_cast<double>(k) + x) + eval_phi(base_, static_cast<double>(k) - x);
    }
    out.tail = std::visit([&](const auto& kk) { return kk.image_tail(std::abs(x), images_ + 1L); }, base_);
    out.value = sum + out.tail;
    return out;
  }

  double operator()(double x) const { return eval(x).value; }

 private:
  Kernel base_;
  int images_;
  ShortRangeConstants consts_;
  PeriodicConstants periodic_;
};

/// Sampled minimum of phi^S over the torus (attained away from the
/// singular origin).
inline double periodic_floor(const PeriodizedKernel& pk, int samples = 512) {
  double m = kInf;
  for (int i = 1; i <= samples; ++i) m = std::min(m, pk(0.5 * i / samples));
  return m;
}

}  // namespace eas
