#pragma once

// Conserved quantities, a priori density bounds, transported maxima and the
// blow-up monitors, evaluated on a running state.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eas/dynamics.hpp"
#include "eas/kernel.hpp"

namespace eas {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TheoryConstants {
  double rho_bar0 = 0.0;
  double F0_inf = 0.0;
  double H0_inf = 0.0;
  double min_rho0 = 0.0;
  double max_rho0 = 0.0;
  double drho0_inf = 0.0;  ///< sup |d_x rho0|
  double alpha = 0.0, a0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0, r0 = 0.0;
  double M0 = 0.0;
  double M1 = 0.0;
  std::optional<double> phi_m;

  /// M0 exp(-c3 rho_bar0 t)
  double lower_envelope(double t) const { return M0 * std::exp(-c3 * rho_bar0 * t); }

  /// min{min rho0, phi_m rho_bar0 / (||F0|| + phi_m rho_bar0)} when a floor is declared.
  std::optional<double> uniform_floor() const {
    if (!phi_m) return std::nullopt;
    const double pm = *phi_m * rho_bar0;
    return std::min(min_rho0, pm / (F0_inf + pm));
  }
};

/// The sampled minimum of phi^S when it is positive.
inline std::optional<double> detect_kernel_floor(const PeriodizedKernel& pk) {
  const double m = periodic_floor(pk);
  if (m > 0.0) return m;
  return std::nullopt;
}

inline Field H_of(const Field& F, const Field& rho) { return divide(spectral_derivative(F), rho); }

inline TheoryConstants theory_constants(const SimState& s0, const PeriodizedKernel& pk,
                                        std::optional<double> phi_m = std::nullopt) {
  TheoryConstants c;
  const auto& k = pk.constants();
  c.alpha = k.alpha;
  c.a0 = k.a0;
  c.c1 = k.c1;
  c.c2 = k.c2;
  c.c3 = pk.c3();
  c.r0 = pk.r0();
  c.rho_bar0 = s0.rho.mean();
  c.min_rho0 = refined_min(s0.rho);
  c.max_rho0 = refined_max(s0.rho);
  c.drho0_inf = refined_sup_abs(spectral_derivative(s0.rho));
  if (!(c.min_rho0 > 0.0)) throw PreconditionError("initial density must be positive");
  const Field F0 = divide(s0.G, s0.rho);
  c.F0_inf = refined_sup_abs(F0);
  c.H0_inf = refined_sup_abs(H_of(F0, s0.rho));
  const double a = c.alpha;
  c.M0 = c.c3 * c.rho_bar0 / (c.c3 * c.rho_bar0 / c.min_rho0 + c.F0_inf);
  const double inner = 1e6 / c.c1 * (c.c3 * a + 2.0 * c.c1 * std::pow(c.r0, -a) + c.F0_inf * a);
  c.M1 = std::max(c.max_rho0, c.rho_bar0 * std::pow(inner, 1.0 / a));
  if (phi_m) {
    if (*phi_m < 0.0) throw PreconditionError("kernel floor phi_m must be non-negative");
    c.phi_m = phi_m;
  }
  return c;
}

/// One diagnostics sample; the first 17 members form the CSV row.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double int_G = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double lower_bound = 0.0;
  double upper_bound_M1 = 0.0;
  double max_abs_F = 0.0;
  double max_abs_H = 0.0;
  double max_abs_dxrho = 0.0;
  double max_abs_dx2rho = 0.0;
  double energy_fluct = 0.0;
  double energy_fluct_rate_residual = kNaN;
  double linf_u = 0.0;
  double linf_dxu = 0.0;
  double dt = 0.0;

  double energy_rate = kNaN;  ///< 2 rho_bar0 times the dissipation integral R
  std::optional<double> uniform_floor;
};

inline const char* diagnostics_csv_header() {
  return "t,mass,momentum,int_G,min_rho,max_rho,lower_bound,upper_bound_M1,max_abs_F,max_abs_H,"
         "max_abs_dxrho,max_abs_dx2rho,energy_fluct,energy_fluct_rate_residual,linf_u,linf_dxu,dt";
}

inline std::string to_csv_row(const DiagnosticsRecord& r) {
  const double v[] = {r.t,           r.mass,          r.momentum,       r.int_G,          r.min_rho,
                      r.max_rho,     r.lower_bound,   r.upper_bound_M1, r.max_abs_F,      r.max_abs_H,
                      r.max_abs_dxrho, r.max_abs_dx2rho, r.energy_fluct, r.energy_fluct_rate_residual,
                      r.linf_u,      r.linf_dxu,      r.dt};
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < std::size(v); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

struct ConservationReport {
  double mass = 0.0, momentum = 0.0, int_G = 0.0;
  double mass_drift = 0.0, momentum_drift = 0.0, int_G_drift = 0.0;
};

inline ConservationReport conservation_report(const SimState& s, const DerivedFields& d, double mass0, double P0,
                                              double int_G0 = 0.0) {
  ConservationReport r;
  r.mass = s.rho.mean();
  r.momentum = momentum(s.rho, d.u);
  r.int_G = s.G.mean();
  r.mass_drift = r.mass - mass0;
  r.momentum_drift = r.momentum - P0;
  r.int_G_drift = r.int_G - int_G0;
  return r;
}

struct BoundReport {
  double min_rho = 0.0, max_rho = 0.0;
  double lower_bound = 0.0, upper_bound = 0.0;
  std::optional<double> uniform_floor;
  double max_abs_F = 0.0, max_abs_H = 0.0;
  bool lower_violated = false, upper_violated = false, floor_violated = false;
};

inline constexpr double kBoundTolerance = 1e-6;

inline BoundReport bound_report(const SimState& s, const DerivedFields& d, const TheoryConstants& c) {
  BoundReport r;
  r.min_rho = refined_min(s.rho);
  r.max_rho = refined_max(s.rho);
  r.lower_bound = c.lower_envelope(s.t);
  r.upper_bound = c.M1;
  r.uniform_floor = c.uniform_floor();
  r.max_abs_F = refined_sup_abs(d.F);
  r.max_abs_H = refined_sup_abs(H_of(d.F, s.rho));
  r.lower_violated = r.min_rho < r.lower_bound - kBoundTolerance;
  r.upper_violated = r.max_rho > r.upper_bound + kBoundTolerance;
  r.floor_violated = r.uniform_floor && r.min_rho < *r.uniform_floor - kBoundTolerance;
  return r;
}

struct EnergyReport {
  double E = 0.0;     ///< double integral of |u(x) - u(y)|^2 rho(x) rho(y)
  double R = 0.0;     ///< minus the phi^S-weighted double integral of the same
  double rate = 0.0;  ///< dE/dt predicted by the dynamics, 2 mean(rho) R
};

/// Energy fluctuation and its dissipation integral in Fourier space:
///   E = 2 (M int rho u^2 - P^2),
///   R = -2 sum_k A_k (|m_k|^2 - Re conj(w_k) rho_k),  m = rho u, w = rho u^2.
/// `A_fine` is the symbol on a grid of twice the size; the products are
/// formed there, which is exact for fields inside the 2/3 band.
inline EnergyReport energy_fluctuation_report(const SimState& s, const DerivedFields& d, const SymbolTable& A_fine) {
  const std::size_t n = s.rho.size();
  if (A_fine.N != 2 * n) throw PreconditionError("energy report needs the symbol on the doubled grid");
  const Field rho = refine(s.rho, 2 * n);
  const Field u = refine(d.u, 2 * n);
  const Field m = times(rho, u);
  const Field w = times(m, u);
  EnergyReport r;
  const double M = rho.mean();
  const double P = m.mean();
  r.E = 2.0 * (M * w.mean() - P * P);
  const auto rh = forward(rho), mh = forward(m), wh = forward(w);
  const std::size_t half = n;  // Nyquist index on the doubled grid
  double acc = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double weight = k == half ? 1.0 : 2.0;
    const double Ak = A_fine.at_mode(static_cast<long>(k));
    acc += weight * Ak * (std::norm(mh.coeffs[k]) - (std::conj(wh.coeffs[k]) * rh.coeffs[k]).real());
  }
  r.R = -2.0 * acc;
  r.rate = 2.0 * M * r.R;
  return r;
}

/// O(N^2) cross-check of R: Riemann sum of phi^S(x_i - x_j) |u_i - u_j|^2 rho_i rho_j
/// with the diagonal (where the weight vanishes) excluded.
inline double energy_rate_pairwise(const Field& rho, const Field& u, const PeriodizedKernel& pk) {
  const std::size_t n = rho.size();
  std::vector<double> kern(n, 0.0);
  for (std::size_t o = 1; o < n; ++o) kern[o] = pk(static_cast<double>(o) / static_cast<double>(n));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t o = (i + n - j) % n;
      const double du = u[i] - u[j];
      sum += kern[o] * du * du * rho[i] * rho[j];
    }
  }
  const double dx = rho.grid.dx();
  return -sum * dx * dx;
}

struct OscillationReport {
  double dx_rho = 0.0;
  double dx2_rho = 0.0;
};

inline OscillationReport oscillation_report(const SimState& s) {
  const Field d1 = spectral_derivative(s.rho);
  const Field d2 = spectral_derivative(d1);
  return {refined_sup_abs(d1), refined_sup_abs(d2)};
}

/// The blow-up criterion quantity: ||d_x rho|| for alpha <= 1, ||d_x^2 rho|| otherwise.
inline double blowup_monitor(const OscillationReport& o, double alpha) { return alpha <= 1.0 ? o.dx_rho : o.dx2_rho; }

/// Immutable per-run context for building records.
struct DiagnosticsContext {
  TheoryConstants consts;
  SymbolTable A;
  SymbolTable A_fine;
  double mass0 = 0.0;
  double P0 = 0.0;
  double int_G0 = 0.0;
};

inline DiagnosticsRecord make_record(const SimState& s, const DerivedFields& d, const DiagnosticsContext& ctx,
                                     double dt) {
  DiagnosticsRecord r;
  r.t = s.t;
  const auto cons = conservation_report(s, d, ctx.mass0, ctx.P0, ctx.int_G0);
  r.mass = cons.mass;
  r.momentum = cons.momentum;
  r.int_G = cons.int_G;
  const auto b = bound_report(s, d, ctx.consts);
  r.min_rho = b.min_rho;
  r.max_rho = b.max_rho;
  r.lower_bound = b.lower_bound;
  r.upper_bound_M1 = b.upper_bound;
  r.uniform_floor = b.uniform_floor;
  r.max_abs_F = b.max_abs_F;
  r.max_abs_H = b.max_abs_H;
  const auto o = oscillation_report(s);
  r.max_abs_dxrho = o.dx_rho;
  r.max_abs_dx2rho = o.dx2_rho;
  const auto e = energy_fluctuation_report(s, d, ctx.A_fine);
  r.energy_fluct = e.E;
  r.energy_rate = e.rate;
  r.linf_u = d.u.sup_abs();
  r.linf_dxu = d.dxu.sup_abs();
  r.dt = dt;
  return r;
}

namespace detail {

// Derivative at t[i] of the quadratic through three samples.
inline double three_point_derivative(const double* t, const double* y, std::size_t i) {
  const double t0 = t[0], t1 = t[1], t2 = t[2];
  const double x = t[i];
  const double l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
  const double l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
  const double l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
  return l0 * y[0] + l1 * y[1] + l2 * y[2];
}

}  // namespace detail

/// Fills |dE/dt - rate| for every record: centred three-point differences in
/// the interior, one-sided three-point differences at the ends. Two samples
/// share their secant; a single sample keeps NaN.
inline void fill_energy_residuals(std::vector<DiagnosticsRecord>& recs) {
  const std::size_t n = recs.size();
  if (n == 2) {
    const double slope = (recs[1].energy_fluct - recs[0].energy_fluct) / (recs[1].t - recs[0].t);
    for (auto& r : recs) r.energy_fluct_rate_residual = std::abs(slope - r.energy_rate);
    return;
  }
  if (n < 3) return;
  std::vector<double> t(n), e(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = recs[i].t;
    e[i] = recs[i].energy_fluct;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
    const double dEdt = detail::three_point_derivative(&t[base], &e[base], i - base);
    recs[i].energy_fluct_rate_residual = std::abs(dEdt - recs[i].energy_rate);
  }
}

struct Violation {
  std::string name;
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;
  std::string line() const {
    std::ostringstream s;
    s.precision(17);
    s << "VIOLATION " << name << " t=" << t << " value=" << value << " bound=" << bound;
    return s.str();
  }
};

/// Bound and maximum-principle violations of `cur`, given the previous record
/// (or nullptr at the first sample). Recomputable from the stored scalars.
inline std::vector<Violation> check_record(const DiagnosticsRecord& cur, const DiagnosticsRecord* prev,
                                           double tol = kBoundTolerance) {
  std::vector<Violation> v;
  if (cur.min_rho < cur.lower_bound - tol) v.push_back({"lower_bound", cur.t, cur.min_rho, cur.lower_bound});
  if (cur.max_rho > cur.upper_bound_M1 + tol) v.push_back({"upper_bound_M1", cur.t, cur.max_rho, cur.upper_bound_M1});
  if (cur.uniform_floor && cur.min_rho < *cur.uniform_floor - tol)
    v.push_back({"uniform_floor", cur.t, cur.min_rho, *cur.uniform_floor});
  if (prev != nullptr) {
    const double slack = tol * (cur.t - prev->t);
    if (cur.max_abs_F > prev->max_abs_F + slack) v.push_back({"max_abs_F", cur.t, cur.max_abs_F, prev->max_abs_F});
    if (cur.max_abs_H > prev->max_abs_H + slack) v.push_back({"max_abs_H", cur.t, cur.max_abs_H, prev->max_abs_H});
  }
  return v;
}

}  // namespace eas
