#pragma once

// The (rho, G) form of the Euler-alignment system,
//   d_t rho + d_x(rho u) = 0,   d_t G + d_x(G u) = 0,   G = d_x u - L rho,
// with u rebuilt from mean-free primitives and the conserved momentum.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "eas/errors.hpp"
#include "eas/field.hpp"
#include "eas/symbol.hpp"

namespace eas {

struct SimState {
  double t = 0.0;
  Field rho;
  Field G;
};

struct DerivedFields {
  Field varphi;  ///< mean-free primitive of rho - mean(rho)
  Field psi;     ///< mean-free primitive of G
  Field u;
  Field dxu;
  Field F;       ///< G / rho
  double I0 = 0.0;
};

struct StepControl {
  double cfl = 0.5;
  double stab = 2.5;
  double grad_cfl = 0.25;  ///< dt <= grad_cfl / ||d_x u||
  double dt_min = 1e-8;
  double dt_max = 1e-2;
  double vacuum_eps = 1e-6;
  double gradient_cap = 1e8;

  bool operator==(const StepControl&) const = default;

  void validate() const {
    if (!(cfl > 0.0 && stab > 0.0 && grad_cfl > 0.0)) throw PreconditionError("step factors must be positive");
    if (!(dt_min > 0.0 && dt_min <= dt_max)) throw PreconditionError("need 0 < dt_min <= dt_max");
    if (!(vacuum_eps > 0.0)) throw PreconditionError("vacuum_eps must be positive");
    if (!(gradient_cap > 0.0)) throw PreconditionError("gradient_cap must be positive");
  }
};

class VacuumError : public StateError {
 public:
  using StateError::StateError;
};

/// The admissible step fell below dt_min.
class BlowUpSuspected : public StateError {
 public:
  BlowUpSuspected(const std::string& what, double dt) : StateError(what), dt_(dt) {}
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
};

inline Field compute_G0(const Field& rho0, const Field& u0, const SymbolTable& A) {
  rho0.check_same(u0);
  return spectral_derivative(u0) - apply_multiplier(rho0, A);
}

namespace detail {

inline void require_live(const Field& rho, const Field& G) {
  if (!rho.all_finite() || !G.all_finite()) throw NumericError("non-finite values in the state");
  const double m = rho.min();
  if (!(m > 0.0)) {
    std::ostringstream msg;
    msg << "vacuum: min rho = " << m;
    throw VacuumError(msg.str());
  }
}

inline double grid_dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s / static_cast<double>(a.size());
}

// w = psi + L varphi from the spectra of rho and G.
inline Field primitive_velocity(const Spectrum& rho_hat, const Spectrum& G_hat, const SymbolTable& A) {
  Spectrum w = rho_hat;
  w.coeffs[0] = 0.0;
  multiply_in_place(w, A);
  for (std::size_t k = 0; k < w.coeffs.size(); ++k) w.coeffs[k] += G_hat.coeffs[k];
  integrate_in_place(w);
  return inverse(w);
}

struct Velocity {
  Field u;
  double I0 = 0.0;
};

inline Velocity velocity(const Field& rho, const Spectrum& rho_hat, const Spectrum& G_hat, const SymbolTable& A,
                         double P0) {
  Field w = primitive_velocity(rho_hat, G_hat, A);
  const double mass = rho_hat.coeffs[0].real();
  // int rho L varphi = int d_x varphi L varphi = 0, so this equals
  // (P0 - int rho psi) / mean(rho); pairing with all of w closes the
  // discrete momentum budget to round-off.
  const double I0 = (P0 - grid_dot(rho, w)) / mass;
  w += I0;
  return {std::move(w), I0};
}

inline Field flux_divergence(const Field& a, const Field& u) {
  auto s = forward(times(a, u));
  dealias_in_place(s);
  differentiate_in_place(s);
  for (auto& c : s.coeffs) c = -c;
  return inverse(s);
}

}  // namespace detail

inline DerivedFields reconstruct_velocity(const SimState& s, const SymbolTable& A, double P0) {
  detail::require_live(s.rho, s.G);
  const auto rho_hat = forward(s.rho);
  const auto G_hat = forward(s.G);
  DerivedFields d;
  Spectrum th = rho_hat;
  th.coeffs[0] = 0.0;
  integrate_in_place(th);
  d.varphi = inverse(th);
  Spectrum ps = G_hat;
  ps.coeffs[0] = 0.0;
  integrate_in_place(ps);
  d.psi = inverse(ps);
  auto v = detail::velocity(s.rho, rho_hat, G_hat, A, P0);
  d.u = std::move(v.u);
  d.I0 = v.I0;
  d.dxu = spectral_derivative(d.u);
  d.F = divide(s.G, s.rho);
  return d;
}

/// Time derivatives (d_t rho, d_t G); both are derivatives of 2/3-dealiased
/// fluxes, so they stay inside the retained band.
inline std::pair<Field, Field> rhs(const SimState& s, const SymbolTable& A, double P0) {
  detail::require_live(s.rho, s.G);
  const auto rho_hat = forward(s.rho);
  const auto G_hat = forward(s.G);
  const auto v = detail::velocity(s.rho, rho_hat, G_hat, A, P0);
  return {detail::flux_divergence(s.rho, v.u), detail::flux_divergence(s.G, v.u)};
}

/// Unclamped admissible step: min of the transport CFL, the rho-weighted
/// dissipation bound and the velocity-gradient bound.
inline double admissible_dt(const SimState& s, const StepControl& c, const SymbolTable& A, double P0) {
  detail::require_live(s.rho, s.G);
  const auto rho_hat = forward(s.rho);
  const auto G_hat = forward(s.G);
  const auto v = detail::velocity(s.rho, rho_hat, G_hat, A, P0);
  const double dx = s.rho.grid.dx();
  const double inf = std::numeric_limits<double>::infinity();
  const double u_sup = v.u.sup_abs();
  const double dxu_sup = spectral_derivative(v.u).sup_abs();
  const double a_plus = A.max_positive();
  double dt = inf;
  if (u_sup > 0.0) dt = std::min(dt, c.cfl * dx / u_sup);
  if (a_plus > 0.0) dt = std::min(dt, c.stab / (s.rho.max() * a_plus));
  if (dxu_sup > 0.0) dt = std::min(dt, c.grad_cfl / dxu_sup);
  return dt;
}

struct StepResult {
  SimState state;
  double dt = 0.0;
};

/// Classical RK4 for a generic right-hand side on a pair of fields.
template <class Rhs>
std::pair<Field, Field> rk4_pair(const Field& a, const Field& b, double dt, Rhs&& f) {
  auto axpy = [](const Field& x, double h, const Field& y) {
    Field out = x;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] += h * y.values[j];
    return out;
  };
  const auto k1 = f(a, b);
  const auto k2 = f(axpy(a, 0.5 * dt, k1.first), axpy(b, 0.5 * dt, k1.second));
  const auto k3 = f(axpy(a, 0.5 * dt, k2.first), axpy(b, 0.5 * dt, k2.second));
  const auto k4 = f(axpy(a, dt, k3.first), axpy(b, dt, k3.second));
  Field na = a, nb = b;
  for (std::size_t j = 0; j < a.size(); ++j) {
    na.values[j] += dt / 6.0 * (k1.first[j] + 2.0 * k2.first[j] + 2.0 * k3.first[j] + k4.first[j]);
    nb.values[j] += dt / 6.0 * (k1.second[j] + 2.0 * k2.second[j] + 2.0 * k3.second[j] + k4.second[j]);
  }
  return {std::move(na), std::move(nb)};
}

/// One RK4 step of size min(clamp(admissible), dt_cap).
inline StepResult advance(const SimState& s, const StepControl& c, const SymbolTable& A, double P0,
                          double dt_cap = std::numeric_limits<double>::infinity()) {
  const double raw = admissible_dt(s, c, A, P0);
  if (raw < c.dt_min) {
    std::ostringstream msg;
    msg << "blow-up suspected: admissible dt " << raw << " < dt_min " << c.dt_min << " at t = " << s.t;
    throw BlowUpSuspected(msg.str(), raw);
  }
  const double dt = std::min({raw, c.dt_max, dt_cap});
  auto f = [&](const Field& rho, const Field& G) { return rhs(SimState{s.t, rho, G}, A, P0); };
  auto [rho, G] = rk4_pair(s.rho, s.G, dt, f);
  if (!rho.all_finite() || !G.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite state after step at t = " << s.t << " with dt = " << dt;
    throw NumericError(msg.str());
  }
  return {SimState{s.t + dt, std::move(rho), std::move(G)}, dt};
}

// Initial data presets. All presets are projected onto the 2/3 band.

struct InitialData {
  Field rho0;
  Field u0;
};

inline InitialData band_limit(InitialData d) {
  d.rho0 = dealias(d.rho0);
  d.u0 = dealias(d.u0);
  return d;
}

/// rho0 = rho_bar + a cos(2 pi m x), u0 = b sin(2 pi n x).
inline InitialData cosine_preset(Grid g, double rho_bar, double a, int m, double b, int n) {
  using std::numbers::pi;
  InitialData d{Field::sample(g, [&](double x) { return rho_bar + a * std::cos(2 * pi * m * x); }),
                Field::sample(g, [&](double x) { return b * std::sin(2 * pi * n * x); })};
  return band_limit(std::move(d));
}

/// rho0 = rho_bar + a cos(2 pi x) with a close to rho_bar, u0 = b sin(2 pi x).
inline InitialData near_vacuum_preset(Grid g, double rho_bar, double a, double b) {
  if (!(a < rho_bar)) throw PreconditionError("near_vacuum preset needs a < rho_bar");
  return cosine_preset(g, rho_bar, a, 1, b, 1);
}

/// Uniform double in [0, 1) from the top 53 bits of a mt19937_64 draw; the
/// engine's output sequence is fixed by the C++ standard.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Random Fourier coefficients on modes 1..modes, normalized so that
/// rho0 = rho_bar + a theta / ||theta||, u0 = b psi / ||psi|| on the grid.
inline InitialData random_bandlimited_preset(Grid g, double rho_bar, double a, double b, int modes,
                                             std::uint64_t seed) {
  using std::numbers::pi;
  if (modes < 1 || static_cast<std::size_t>(modes) > g.dealias_cutoff())
    throw PreconditionError("random preset needs 1 <= modes <= N/3");
  std::mt19937_64 gen(seed);
  auto draw_series = [&]() {
    std::vector<double> c(modes), s(modes);
    for (int k = 0; k < modes; ++k) {
      c[k] = 2.0 * unit_uniform(gen) - 1.0;
      s[k] = 2.0 * unit_uniform(gen) - 1.0;
    }
    Field f = Field::sample(g, [&](double x) {
      double v = 0.0;
      for (int k = 0; k < modes; ++k) {
        v += c[k] * std::cos(2 * pi * (k + 1) * x) + s[k] * std::sin(2 * pi * (k + 1) * x);
      }
      return v;
    });
    const double sup = f.sup_abs();
    return sup > 0.0 ? f * (1.0 / sup) : f;
  };
  Field theta = draw_series();
  Field psi = draw_series();
  InitialData d{theta * a, psi * b};
  d.rho0 += rho_bar;
  return d;
}

inline SimState initial_state(const InitialData& d, const SymbolTable& A) {
  return SimState{0.0, d.rho0, compute_G0(d.rho0, d.u0, A)};
}

/// Conserved momentum int rho u.
inline double momentum(const Field& rho, const Field& u) { return detail::grid_dot(rho, u); }

}  // namespace eas
