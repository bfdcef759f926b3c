#pragma once

// Constant-density companion equation
//   d_t u + u d_x u = -L u,   L with symbol A = |z|^a - mu |z|^b,
// sharing the grid, symbol and step policy of the full system.

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eas/dynamics.hpp"
#include "eas/termination.hpp"

namespace eas {

struct BurgersState {
  double t = 0.0;
  Field u;
};

/// -d_x dealias(u^2/2) - L u. The flux form equals -dealias(u d_x u) on
/// band-limited data and keeps the mean of u exactly.
inline Field burgers_rhs(const Field& u, const SymbolTable& A) {
  if (!u.all_finite()) throw NumericError("non-finite values in the Burgers state");
  auto flux = forward(times(u, u));
  dealias_in_place(flux);
  differentiate_in_place(flux);
  auto lin = forward(u);
  multiply_in_place(lin, A);
  for (std::size_t k = 0; k < flux.coeffs.size(); ++k) flux.coeffs[k] = -0.5 * flux.coeffs[k] - lin.coeffs[k];
  return inverse(flux);
}

/// min(cfl dx/|u|, stab/A+max, grad_cfl/|d_x u|), before clamping.
inline double burgers_admissible_dt(const Field& u, const StepControl& c, const SymbolTable& A) {
  const double inf = std::numeric_limits<double>::infinity();
  const double u_sup = u.sup_abs();
  const double g_sup = spectral_derivative(u).sup_abs();
  const double a_plus = A.max_positive();
  double dt = inf;
  if (u_sup > 0.0) dt = std::min(dt, c.cfl * u.grid.dx() / u_sup);
  if (a_plus > 0.0) dt = std::min(dt, c.stab / a_plus);
  if (g_sup > 0.0) dt = std::min(dt, c.grad_cfl / g_sup);
  return dt;
}

struct BurgersStep {
  BurgersState state;
  double dt = 0.0;
};

inline BurgersStep burgers_advance(const BurgersState& s, const StepControl& c, const SymbolTable& A,
                                   double dt_cap = std::numeric_limits<double>::infinity()) {
  const double raw = burgers_admissible_dt(s.u, c, A);
  if (raw < c.dt_min) {
    std::ostringstream msg;
    msg << "blow-up suspected: admissible dt " << raw << " < dt_min " << c.dt_min << " at t = " << s.t;
    throw BlowUpSuspected(msg.str(), raw);
  }
  const double dt = std::min({raw, c.dt_max, dt_cap});
  auto axpy = [](const Field& x, double h, const Field& y) {
    Field out = x;
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] += h * y.values[j];
    return out;
  };
  const Field k1 = burgers_rhs(s.u, A);
  const Field k2 = burgers_rhs(axpy(s.u, 0.5 * dt, k1), A);
  const Field k3 = burgers_rhs(axpy(s.u, 0.5 * dt, k2), A);
  const Field k4 = burgers_rhs(axpy(s.u, dt, k3), A);
  Field u = s.u;
  for (std::size_t j = 0; j < u.size(); ++j) u.values[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  if (!u.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite Burgers state after step at t = " << s.t << " with dt = " << dt;
    throw NumericError(msg.str());
  }
  return {BurgersState{s.t + dt, std::move(u)}, dt};
}

struct BurgersRecord {
  double t = 0.0;
  double mean_u = 0.0;
  double energy = 0.0;  ///< mean of u^2 / 2
  double linf_u = 0.0;
  double linf_dxu = 0.0;
  double dt = 0.0;
};

inline const char* burgers_csv_header() { return "t,mean_u,energy,linf_u,linf_dxu,dt"; }

inline std::string to_csv_row(const BurgersRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.mean_u, r.energy, r.linf_u,
                r.linf_dxu, r.dt);
  return buf;
}

inline BurgersRecord burgers_record(const BurgersState& s, double dt) {
  BurgersRecord r;
  r.t = s.t;
  r.mean_u = s.u.mean();
  double e = 0.0;
  for (double v : s.u.values) e += v * v;
  r.energy = 0.5 * e / static_cast<double>(s.u.size());
  r.linf_u = s.u.sup_abs();
  r.linf_dxu = spectral_derivative(s.u).sup_abs();
  r.dt = dt;
  return r;
}

struct BurgersTrajectory {
  std::vector<BurgersState> snapshots;
  std::vector<BurgersRecord> records;
  Termination termination = Termination::completed;
  std::string message;
  double final_t = 0.0;
  double max_gradient = 0.0;  ///< largest |d_x u| seen at any step
};

/// RK4 to T with records every diag_dt and snapshots every snapshot_dt
/// (0 disables snapshots). Aborts when |d_x u| exceeds gradient_cap or the
/// admissible step collapses below dt_min.
inline BurgersTrajectory burgers_run(const Field& u0, const SymbolTable& A, const StepControl& c, double T,
                                     double diag_dt, double snapshot_dt = 0.0) {
  c.validate();
  if (!(T > 0.0 && diag_dt > 0.0 && snapshot_dt >= 0.0)) throw PreconditionError("burgers_run needs T, diag_dt > 0");
  BurgersTrajectory out;
  BurgersState s{0.0, u0};
  EventClock diag(diag_dt, T), snap(snapshot_dt, T);
  double last_dt = 0.0;
  out.records.push_back(burgers_record(s, last_dt));
  out.max_gradient = out.records.back().linf_dxu;
  if (snapshot_dt > 0.0) out.snapshots.push_back(s);
  try {
    while (s.t < T && !at_time(s.t, T)) {
      const double target = std::min(diag.next(), snap.next());
      auto step = burgers_advance(s, c, A, target - s.t);
      s = std::move(step.state);
      last_dt = step.dt;
      if (at_time(s.t, target)) s.t = target;
      const double grad = spectral_derivative(s.u).sup_abs();
      out.max_gradient = std::max(out.max_gradient, grad);
      const bool diag_due = diag.due(s.t), snap_due = snap.due(s.t);
      if (diag_due) out.records.push_back(burgers_record(s, last_dt));
      if (snap_due) out.snapshots.push_back(s);
      if (grad > c.gradient_cap) {
        std::ostringstream msg;
        msg << "gradient cap exceeded: |d_x u| = " << grad << " > " << c.gradient_cap << " at t = " << s.t;
        out.termination = Termination::gradient_cap;
        out.message = msg.str();
        if (!diag_due) out.records.push_back(burgers_record(s, last_dt));
        break;
      }
    }
  } catch (const BlowUpSuspected& e) {
    out.termination = Termination::dt_collapse;
    out.message = e.what();
    if (out.records.back().t != s.t) out.records.push_back(burgers_record(s, last_dt));
  } catch (const NumericError& e) {
    out.termination = Termination::non_finite;
    out.message = e.what();
  }
  out.final_t = s.t;
  return out;
}

}  // namespace eas
