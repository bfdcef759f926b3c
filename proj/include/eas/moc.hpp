#pragma once

// Modulus of continuity for the density: the two-branch profile
//   omega(xi) = delta xi/lambda - delta/4 (xi/lambda)^{1+a/2},   xi <= lambda,
//   omega(xi) = 3 delta/4 + gamma log(xi/lambda),                xi >  lambda,
// the explicit parameter chain, obedience scans and the dissipation and
// velocity moduli evaluated on concrete fields.
//
// The admissible lambda is far below the double range for realistic
// constants (it carries a factor exp(-M1/gamma)), so it is stored as a log.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eas/diagnostics.hpp"
#include "eas/kernel.hpp"
#include "eas/quadrature.hpp"

namespace eas {

inline constexpr double kMocEpsilon = 1e-3;

class MocSpec {
 public:
  MocSpec() = default;
  /// range_bound bounds the oscillation of the field; it fixes Xi.
  MocSpec(double alpha, double delta, double gamma, double log_lambda, double range_bound)
      : MocSpec(alpha, delta, gamma, log_lambda, range_bound, 0) {}

  static MocSpec with_lambda(double alpha, double delta, double gamma, double lambda, double range_bound) {
    if (!(lambda > 0.0)) throw PreconditionError("MOC needs lambda > 0");
    return MocSpec(alpha, delta, gamma, std::log(lambda), range_bound);
  }

  /// Takes log lambda + range_bound/gamma, which stays O(1) when lambda
  /// carries exp(-range_bound/gamma); log_Xi is then free of cancellation.
  static MocSpec from_shifted(double alpha, double delta, double gamma, double shifted_log_lambda,
                              double range_bound) {
    return MocSpec(alpha, delta, gamma, shifted_log_lambda, range_bound, 1);
  }

  double alpha() const { return alpha_; }
  double delta() const { return delta_; }
  double gamma() const { return gamma_; }
  double log_lambda() const { return shifted_ - range_bound_ / gamma_; }
  double shifted_log_lambda() const { return shifted_; }
  /// May underflow to 0; use log_lambda() for comparisons.
  double lambda() const { return std::exp(log_lambda()); }
  double range_bound() const { return range_bound_; }
  /// omega^{-1}(range_bound) = lambda exp((range_bound - 3 delta/4)/gamma).
  double log_Xi() const { return shifted_ - 0.75 * delta_ / gamma_; }
  double Xi() const { return std::exp(log_Xi()); }
  /// omega'(0+) = delta / lambda, in log form.
  double log_slope_at_origin() const { return std::log(delta_) - log_lambda(); }

 private:
  MocSpec(double alpha, double delta, double gamma, double log_value, double range_bound, int shifted)
      : alpha_(alpha), delta_(delta), gamma_(gamma), range_bound_(range_bound) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw PreconditionError("MOC exponent must lie in (0, 2)");
    if (!(delta > 0.0 && gamma > 0.0)) throw PreconditionError("MOC needs delta, gamma > 0");
    if (!(gamma < 0.5 * delta)) throw PreconditionError("MOC needs gamma < delta/2 for concavity");
    if (std::isnan(log_value) || log_value == -std::numeric_limits<double>::infinity())
      throw PreconditionError("MOC needs lambda > 0");
    if (!(range_bound >= 0.0)) throw PreconditionError("MOC range bound must be non-negative");
    shifted_ = shifted ? log_value : log_value + range_bound / gamma;
  }

  double alpha_ = 1.0, delta_ = 1.0, gamma_ = 0.25, shifted_ = 0.0, range_bound_ = 0.0;
};

struct OmegaValue {
  double omega = 0.0;
  double omega_prime = 0.0;  ///< left derivative at the knot
};

inline OmegaValue omega_eval(const MocSpec& s, double xi) {
  if (!(xi > 0.0)) throw DomainError("omega is defined for xi > 0");
  const double log_r = std::log(xi) - s.log_lambda();
  const double d = s.delta(), h = 0.5 * s.alpha();
  if (log_r <= 0.0) {
    const double r = std::exp(log_r);
    const double rp = std::pow(r, h);
    const double lam = s.lambda();
    return {d * r * (1.0 - 0.25 * rp), d / lam * (1.0 - 0.25 * (1.0 + h) * rp)};
  }
  return {0.75 * d + s.gamma() * log_r, s.gamma() / xi};
}

inline double omega(const MocSpec& s, double xi) { return omega_eval(s, xi).omega; }

/// Returned by select_log_lambda when every lambda works.
inline constexpr double kAnyLambda = std::numeric_limits<double>::infinity();

/// log of (2 f / f') exp(-2 f / gamma): a field with sup f_inf and
/// Lipschitz constant fprime_inf obeys omega for any lambda below this.
inline double select_log_lambda(double f_inf, double fprime_inf, double gamma) {
  if (!(gamma > 0.0)) throw PreconditionError("select_lambda needs gamma > 0");
  if (!(f_inf >= 0.0 && fprime_inf >= 0.0)) throw PreconditionError("select_lambda needs non-negative norms");
  if (fprime_inf == 0.0) return kAnyLambda;
  if (f_inf == 0.0) throw PreconditionError("select_lambda needs f_inf > 0 when f' is non-zero");
  return std::log(2.0 * f_inf / fprime_inf) - 2.0 * f_inf / gamma;
}

inline double select_lambda(double f_inf, double fprime_inf, double gamma) {
  return std::exp(select_log_lambda(f_inf, fprime_inf, gamma));
}

/// The alpha-dependent constant in the short-range one-sided bounds of L rho.
inline double moc_constant(double alpha) {
  if (std::abs(alpha - 1.0) < kMocEpsilon) return 2.0;
  if (alpha < 1.0) return 1.0 / (alpha * alpha * (1.0 - alpha));
  return 1.0 / (alpha - 1.0) + 1.25;
}

enum class RhoMinSource { theoretical, empirical };

struct Threshold {
  std::string name;
  std::string condition;
  double log_value = 0.0;  ///< log of the admissible upper bound
};

struct MocSelection {
  MocSpec spec;
  double rho_min = 0.0;
  RhoMinSource source = RhoMinSource::theoretical;
  double C_alpha = 0.0;
  double drift_constant = 0.0;  ///< M1 (2 c2 + 10 c3 + 3 ||F0|| + M1^2 ||H0||)
  std::vector<Threshold> delta_thresholds, gamma_thresholds, lambda_thresholds;
};

/// Picks (delta, gamma, lambda) on [0, T] by the explicit smallness chain.
/// The density floor is M0 exp(-c3 rho_bar0 T) unless an empirical floor is
/// supplied. Strict inequalities are met with a (1 - 1e-3) safety factor.
inline MocSelection select_parameters(double T, const TheoryConstants& c,
                                      std::optional<double> empirical_rho_min = std::nullopt) {
  if (!(T > 0.0)) throw PreconditionError("select_parameters needs T > 0");
  if (!(c.c1 > 0.0 && c.c3 > 0.0 && c.r0 > 0.0 && c.M1 > 0.0 && c.alpha > 0.0 && c.alpha < 2.0))
    throw PreconditionError("select_parameters needs complete theory constants");
  MocSelection out;
  const double a = c.alpha, c1 = c.c1, eps = kMocEpsilon;
  if (empirical_rho_min) {
    out.source = RhoMinSource::empirical;
    out.rho_min = *empirical_rho_min;
  } else {
    out.rho_min = c.lower_envelope(T);
  }
  const double rm = out.rho_min;
  if (!(rm > 0.0) || !std::isnormal(rm)) {
    std::ostringstream msg;
    msg << "density floor rho_min_T = " << rm << " is not a positive normal double (T = " << T << ")";
    throw RangeError(msg.str());
  }
  out.C_alpha = moc_constant(a);

  auto add = [](std::vector<Threshold>& v, std::string n, std::string cond, double log_value) {
    v.push_back({std::move(n), std::move(cond), log_value});
  };
  auto min_of = [](const std::vector<Threshold>& v) {
    double m = kAnyLambda;
    for (const auto& t : v) m = std::min(m, t.log_value);
    return m;
  };
  auto require = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isnormal(v)) {
      std::ostringstream msg;
      msg << what << " = " << v << " is not a positive normal double";
      throw RangeError(msg.str());
    }
  };

  add(out.delta_thresholds, "delta_slope_vs_floor", "4 c1^2 delta <= rho_min/4", std::log(rm / (16.0 * c1 * c1)));
  add(out.delta_thresholds, "delta_inner_misalignment", "22 c1 C_a delta <= a rho_min/(128 c1)",
      std::log(a * rm / (128.0 * 22.0 * c1 * c1 * out.C_alpha)));
  add(out.delta_thresholds, "delta_unit", "delta <= 1 - eps", std::log1p(-eps));
  // Taken from the bounds directly: exp(log x) loses ~|log x| ulps when x is tiny.
  const double delta = std::min({rm / (16.0 * c1 * c1), a * rm / (128.0 * 22.0 * c1 * c1 * out.C_alpha), 1.0 - eps});
  require(delta, "delta");

  add(out.gamma_thresholds, "gamma_concavity", "gamma < delta/2", std::log(0.5 * delta));
  add(out.gamma_thresholds, "gamma_velocity_enhancement", "gamma < 3 a delta/4", std::log(0.75 * a * delta));
  add(out.gamma_thresholds, "gamma_outer_misalignment", "64 c1 gamma/a^2 < (2^a - 1) rho_min/(8 a c1)",
      std::log((std::exp2(a) - 1.0) * a * rm / (8.0 * 64.0 * c1 * c1)));
  const double gamma = std::exp(min_of(out.gamma_thresholds) + std::log1p(-eps));
  require(gamma, "gamma");

  out.drift_constant = c.M1 * (2.0 * c.c2 + 10.0 * c.c3 + 3.0 * c.F0_inf + c.M1 * c.M1 * c.H0_inf);
  const double log_K = std::log(out.drift_constant);
  // Each bound is also kept shifted by M1/gamma; those carrying exp(-M1/gamma)
  // are exact in that form.
  const double shift = c.M1 / gamma;
  double shifted_min = kAnyLambda;
  auto add_lambda = [&](std::string n, std::string cond, double base, bool carries_range) {
    add(out.lambda_thresholds, std::move(n), std::move(cond), carries_range ? base - shift : base);
    shifted_min = std::min(shifted_min, carries_range ? base : base + shift);
  };
  const double f_inf = std::max(std::abs(c.max_rho0), std::abs(c.min_rho0));
  add_lambda("lambda_initial_data", "lambda <= (2 |rho0|/|rho0'|) exp(-2 |rho0|/gamma)",
             select_log_lambda(f_inf, c.drho0_inf, gamma), false);
  add_lambda("lambda_short_range_scope", "lambda <= (r0/4) exp(-M1/gamma)", std::log(0.25 * c.r0), true);
  add_lambda("lambda_below_delta", "lambda <= delta", std::log(delta), false);
  add_lambda("lambda_inner_subcritical", "K lambda^a < a rho_min/(128 c1)",
             (std::log((1.0 - eps) * a * rm / (128.0 * c1)) - log_K) / a, false);
  add_lambda("lambda_outer_slope", "lambda <= gamma exp(-M1/gamma)", std::log(gamma), true);
  add_lambda("lambda_outer_subcritical", "K exp(a M1/gamma) lambda^a <= (2^a - 1) rho_min/(8 a c1)",
             (std::log((std::exp2(a) - 1.0) * rm / (8.0 * a * c1)) - log_K) / a, true);
  if (!std::isfinite(shifted_min)) throw RangeError("lambda threshold chain is not finite");
  out.spec = MocSpec::from_shifted(a, delta, gamma, shifted_min, c.M1);
  return out;
}

struct MocReport {
  bool obeys = true;
  double x_i = 0.0, x_j = 0.0;
  double diff = 0.0;    ///< |f(x_i) - f(x_j)| at the worst pair
  double omega = 0.0;   ///< omega(d_ij) at the worst pair
  double margin = std::numeric_limits<double>::infinity();  ///< min over pairs of omega(d) - |df|
};

/// O(N^2) scan over all node pairs at periodic distance in (0, 1/2]. With
/// refined = true the scan runs on the spectral interpolant at 2N nodes.
inline MocReport check_obeys(const Field& f, const MocSpec& s, bool refined = false) {
  const Field g = refined ? refine(f, 2 * f.size()) : f;
  const std::size_t n = g.size();
  const double dx = g.grid.dx();
  std::vector<double> w(n / 2 + 1, 0.0);
  for (std::size_t k = 1; k <= n / 2; ++k) w[k] = omega(s, static_cast<double>(k) * dx);
  MocReport r;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const std::size_t j = (i + k) % n;
      if (2 * k == n && j < i) continue;  // antipodal pairs once
      const double df = std::abs(g[i] - g[j]);
      const double m = w[k] - df;
      if (m < r.margin) {
        r.margin = m;
        r.x_i = g.grid.node(i);
        r.x_j = g.grid.node(j);
        r.diff = df;
        r.omega = w[k];
      }
    }
  }
  r.obeys = r.margin > 0.0;
  return r;
}

inline double periodic_distance(double x, double y) {
  double d = std::fmod(std::abs(x - y), 1.0);
  return std::min(d, 1.0 - d);
}

/// Lower bound of D1 from the short-range dissipation estimate.
inline double d1_lower_bound(const MocSpec& s, double c1, double xi) {
  const double a = s.alpha();
  if (std::log(xi) <= s.log_lambda()) {
    return std::exp(std::log(a * s.delta() / (32.0 * c1)) - (1.0 + 0.5 * a) * s.log_lambda() +
                    (1.0 - 0.5 * a) * std::log(xi));
  }
  return (std::exp2(a) - 1.0) / (2.0 * a * c1) * omega(s, xi) * std::pow(xi, -a);
}

struct D1Result {
  double value = 0.0;
  double gap = 0.0;             ///< omega(xi) - (rho(x) - rho(y))
  bool at_breakthrough = false;
  double lower_bound = kNaN;    ///< set at breakthrough
  bool meets_bound = true;
  double error = 0.0;           ///< quadrature error estimate
};

inline constexpr double kBreakthroughTolerance = 1e-10;

/// D1(x, y) = p.v. int_{|z| <= a0} phi(z) (omega(xi) - rho(x+z) + rho(y+z)) dz
/// for a periodic density given as a callable. Away from equality
/// rho(x) - rho(y) = omega(xi) the integral diverges like the kernel's
/// non-integrable core and the result is +-inf. At equality the integrand is
/// the symmetric second difference
///   phi(z) [(2 rho(x) - rho(x+z) - rho(x-z)) - (2 rho(y) - rho(y+z) - rho(y-z))],
/// integrated on (0, a0]. Below a cutoff z_c the second differences are
/// replaced by their quadratic model: there, round-off in x + z alone
/// (about 1e-16 times the slope of rho) swamps them. z_c starts at 1e-4 a0
/// and shrinks while the model is inconsistent between z_c and z_c/2, which
/// happens when a corner of rho sits close to x or y.
template <class Rho>
D1Result d1_dissipation(Rho&& rho, double x, double y, const MocSpec& s, const Kernel& kernel, double a0,
                        double c1, double tol = 1e-7) {
  const double xi = periodic_distance(x, y);
  if (!(xi > 0.0 && xi <= 0.5 * a0 * (1.0 + 1e-12)))
    throw DomainError("d1_dissipation needs 0 < |x - y| <= a0/2");
  const double w = omega(s, xi);
  const double rx = rho(x), ry = rho(y);
  D1Result out;
  out.gap = w - (rx - ry);
  const double scale = std::max(1.0, std::abs(w));
  if (std::abs(out.gap) > kBreakthroughTolerance * scale) {
    out.value = out.gap > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return out;
  }
  out.at_breakthrough = true;
  auto second = [&](double z) { return (2.0 * rx - rho(x + z) - rho(x - z)) - (2.0 * ry - rho(y + z) - rho(y - z)); };
  auto phi = [&](double z) { return eval_phi(kernel, z); };

  double zc = 1e-4 * a0;
  double kappa = second(zc) / (zc * zc);
  for (int i = 0; i < 6; ++i) {
    const double k2 = second(0.5 * zc) / (0.25 * zc * zc);
    if (std::abs(k2 - kappa) <= 1e-3 * std::max(std::abs(kappa), std::abs(k2)) + 1e-9) break;
    zc *= 0.5;
    kappa = k2;
  }
  quad::AdaptiveOptions opt{tol, tol, 20000};
  // Core: kappa int_0^zc phi(z) z^2 dz; z = zc t^2 keeps the integrand
  // bounded for alpha < 2.
  const auto core = quad::integrate(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        const double z = zc * t * t;
        return phi(z) * z * z * 2.0 * zc * t;
      },
      0.0, 1.0, opt);
  quad::Result total{kappa * core.value, std::abs(kappa) * core.error};
  // Geometric panels from zc to a0.
  double lo = zc;
  while (lo < a0) {
    const double hi = std::min(a0, 4.0 * lo);
    total += quad::integrate([&](double z) { return phi(z) * second(z); }, lo, hi, opt);
    lo = hi;
  }
  out.value = total.value;
  out.error = total.error;
  out.lower_bound = d1_lower_bound(s, c1, xi);
  out.meets_bound = out.value >= out.lower_bound;
  return out;
}

inline D1Result d1_dissipation(const Field& rho, double x, double y, const MocSpec& s, const Kernel& kernel,
                               double a0, double c1, double tol = 1e-7) {
  const TrigInterpolant f(rho);
  return d1_dissipation([&](double z) { return f(z); }, x, y, s, kernel, a0, c1, tol);
}

namespace detail {

// (1 - e^{-s L}) / s and (s L - 1 + e^{-s L}) / s^2, stable as s L -> 0.
inline double expm1_ratio(double s, double L) {
  if (s == 0.0) return L;
  return -std::expm1(-s * L) / s;
}

inline double expm1_ratio2(double s, double L) {
  const double sl = s * L;
  if (std::abs(sl) < 1e-3) return L * L * (0.5 - sl / 6.0 + sl * sl / 24.0);
  return (sl + std::expm1(-sl)) / (s * s);
}

// int_lo^hi eta^{-p} deta for 0 < lo <= hi.
inline double power_integral(double p, double lo, double hi) {
  const double s = 1.0 - p;
  const double L = std::log(hi / lo);
  return std::pow(hi, s) * expm1_ratio(s, L);
}

// int_lam^xi eta^{-p} (A + g log(eta/lam)) deta with the log of lam given.
inline double log_branch_integral(double p, double A, double g, double xi, double log_lam) {
  const double s = 1.0 - p;
  const double L = std::log(xi) - log_lam;
  if (L <= 0.0) return 0.0;
  // With eta = xi e^{-v}: xi^s int_0^L e^{-s v} (A + g (L - v)) dv.
  const double xs = std::pow(xi, s);
  return xs * (A * expm1_ratio(s, L) + g * expm1_ratio2(s, L));
}

}  // namespace detail

/// Omega(xi) = (52 c1/a) int_0^xi omega eta^{-a} + 8 c1 xi int_xi^{r0+xi} omega eta^{-1-a}
///             + M1 (8 c3 + ||F0||) xi, in closed form on both branches.
inline double omega_velocity(const MocSpec& s, const TheoryConstants& c, double xi) {
  if (!(xi > 0.0 && xi <= 0.25 * c.r0 * (1.0 + 1e-12))) throw DomainError("omega_velocity needs 0 < xi <= r0/4");
  const double a = s.alpha(), d = s.delta(), g = s.gamma(), h = 0.5 * a;
  const double ll = s.log_lambda();
  const double log_xi = std::log(xi);
  const double A = 0.75 * d;
  // Polynomial branch on [lo, hi] with hi <= lambda, weight eta^{-p}:
  //   delta/lambda int eta^{1-p} - delta/4 lambda^{-1-h} int eta^{1+h-p}.
  auto poly = [&](double p, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const double lam = s.lambda();
    const double first = d / lam * (lo > 0.0 ? detail::power_integral(p - 1.0, lo, hi) : std::pow(hi, 2.0 - p) / (2.0 - p));
    const double second = 0.25 * d * std::pow(lam, -1.0 - h) *
                          (lo > 0.0 ? detail::power_integral(p - 1.0 - h, lo, hi)
                                    : std::pow(hi, 2.0 + h - p) / (2.0 + h - p));
    return first - second;
  };
  double t1;
  if (log_xi <= ll) {
    t1 = poly(a, 0.0, xi);
  } else {
    t1 = detail::log_branch_integral(a, A, g, xi, ll) + poly(a, 0.0, s.lambda());
  }
  const double b = c.r0 + xi;
  double t2 = 0.0;
  if (log_xi < ll) {
    const double knot = std::min(s.lambda(), b);
    t2 += poly(1.0 + a, xi, knot);
    if (b > knot) t2 += detail::log_branch_integral(1.0 + a, A, g, b, ll);
  } else {
    // Anchored at xi: omega = omega(xi) + gamma log(eta/xi).
    t2 = detail::log_branch_integral(1.0 + a, A + g * (log_xi - ll), g, b, log_xi);
  }
  return 52.0 * c.c1 / a * t1 + 8.0 * c.c1 * xi * t2 + c.M1 * (8.0 * c.c3 + c.F0_inf) * xi;
}

struct VelocityMocReport {
  bool holds = true;
  double worst_excess = -std::numeric_limits<double>::infinity();  ///< max of |du| - Omega(d)
  double x_i = 0.0, x_j = 0.0;
  std::size_t pairs = 0;
};

/// |u(x_i) - u(x_j)| <= Omega(d) + tol over node pairs with d <= r0/4.
inline VelocityMocReport check_velocity_moc(const Field& u, const MocSpec& s, const TheoryConstants& c,
                                            double tol = 1e-4) {
  const std::size_t n = u.size();
  const double dx = u.grid.dx();
  const std::size_t kmax = std::min<std::size_t>(n / 2, static_cast<std::size_t>(0.25 * c.r0 / dx));
  std::vector<double> W(kmax + 1, 0.0);
  for (std::size_t k = 1; k <= kmax; ++k) W[k] = omega_velocity(s, c, static_cast<double>(k) * dx);
  VelocityMocReport r;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= kmax; ++k) {
      const std::size_t j = (i + k) % n;
      const double e = std::abs(u[i] - u[j]) - W[k];
      ++r.pairs;
      if (e > r.worst_excess) {
        r.worst_excess = e;
        r.x_i = u.grid.node(i);
        r.x_j = u.grid.node(j);
      }
    }
  }
  r.holds = r.worst_excess <= tol;
  return r;
}

struct PreservationReport {
  std::vector<double> times;
  std::vector<MocReport> reports;
  std::vector<double> log_slope;  ///< log sup |d_x rho| per snapshot
  std::optional<double> first_breakthrough;
  bool lipschitz_ok = true;       ///< sup |d_x rho| <= delta/lambda at every snapshot
};

inline PreservationReport verify_preservation(const std::vector<SimState>& snapshots, const MocSpec& s,
                                              bool refined = false) {
  PreservationReport out;
  for (const auto& snap : snapshots) {
    out.times.push_back(snap.t);
    out.reports.push_back(check_obeys(snap.rho, s, refined));
    if (!out.reports.back().obeys && !out.first_breakthrough) out.first_breakthrough = snap.t;
    const double slope = refined_sup_abs(spectral_derivative(snap.rho));
    const double ls = slope > 0.0 ? std::log(slope) : -std::numeric_limits<double>::infinity();
    out.log_slope.push_back(ls);
    if (!(ls <= s.log_slope_at_origin())) out.lipschitz_ok = false;
  }
  return out;
}

/// A density whose oscillation at (x, y) = (c + xi/2, c - xi/2) equals
/// omega(xi) while the modulus holds (non-strictly) elsewhere:
///   rho(z) = rho_bar + sign(t) min(omega(2|t|), cap)/2,  t = fold(z - c),
/// where fold is the 1-Lipschitz odd tent map of the torus with turning
/// points at +-1/4. Requires omega(xi) <= cap.
class BreakthroughProfile {
 public:
  BreakthroughProfile(MocSpec s, double rho_bar, double center, double xi, double cap)
      : s_(s), rho_bar_(rho_bar), center_(center), xi_(xi), cap_(cap) {
    if (!(xi > 0.0 && xi <= 0.5)) throw PreconditionError("breakthrough profile needs 0 < xi <= 1/2");
    if (!(omega(s_, xi) <= cap)) throw PreconditionError("breakthrough profile needs omega(xi) <= cap");
  }

  double operator()(double z) const {
    double t = z - center_;
    t -= std::round(t);
    if (t > 0.25) t = 0.5 - t;
    if (t < -0.25) t = -0.5 - t;
    if (t == 0.0) return rho_bar_;
    const double v = 0.5 * std::min(omega(s_, 2.0 * std::abs(t)), cap_);
    return rho_bar_ + (t > 0.0 ? v : -v);
  }

  double x() const { return center_ + 0.5 * xi_; }
  double y() const { return center_ - 0.5 * xi_; }
  double xi() const { return xi_; }

 private:
  MocSpec s_;
  double rho_bar_, center_, xi_, cap_;
};

}  // namespace eas
