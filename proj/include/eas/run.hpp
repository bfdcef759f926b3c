#pragma once

// Time integration of the full system with diagnostics, snapshots and typed
// early termination.

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eas/diagnostics.hpp"
#include "eas/dynamics.hpp"
#include "eas/termination.hpp"

namespace eas {

struct RunSetup {
  SimState s0;
  DiagnosticsContext ctx;
};

/// Initial state and the immutable per-run context. The symbol tables may be
/// shared between runs; A_fine lives on the doubled grid.
inline RunSetup prepare_run(const InitialData& d, const PeriodizedKernel& pk, const SymbolTable& A,
                            const SymbolTable& A_fine, std::optional<double> phi_m = std::nullopt) {
  RunSetup r;
  r.s0 = initial_state(d, A);
  r.ctx.consts = theory_constants(r.s0, pk, phi_m);
  r.ctx.A = A;
  r.ctx.A_fine = A_fine;
  r.ctx.mass0 = r.s0.rho.mean();
  r.ctx.P0 = momentum(d.rho0, d.u0);
  r.ctx.int_G0 = r.s0.G.mean();
  return r;
}

struct RunOptions {
  StepControl control;
  double T = 1.0;
  double diag_dt = 0.01;
  double snapshot_dt = 0.0;  ///< 0 disables snapshots
};

struct Trajectory {
  std::vector<SimState> snapshots;
  std::vector<DiagnosticsRecord> records;
  std::vector<Violation> violations;
  Termination termination = Termination::completed;
  std::string message;
  double final_t = 0.0;
  std::size_t steps = 0;
  double min_rho = std::numeric_limits<double>::infinity();  ///< over every step and record
  double max_monitor = 0.0;  ///< largest oscillation norm over every step and record
};

namespace detail {

// Grid sup of d_x rho or d_x^2 rho, whichever the criterion uses.
inline double step_monitor(const Field& rho, double alpha) {
  Field d = spectral_derivative(rho);
  if (alpha > 1.0) d = spectral_derivative(d);
  return d.sup_abs();
}

}  // namespace detail

inline Trajectory run(const SimState& s0, const DiagnosticsContext& ctx, const RunOptions& o) {
  o.control.validate();
  if (!(o.T > 0.0 && o.diag_dt > 0.0 && o.snapshot_dt >= 0.0))
    throw PreconditionError("run needs T > 0, diag_dt > 0, snapshot_dt >= 0");
  const StepControl& c = o.control;
  const double alpha = ctx.consts.alpha;
  Trajectory out;
  SimState s = s0;
  double last_dt = 0.0;

  auto record = [&] {
    const auto d = reconstruct_velocity(s, ctx.A, ctx.P0);
    out.records.push_back(make_record(s, d, ctx, last_dt));
    const auto& r = out.records.back();
    const DiagnosticsRecord* prev = out.records.size() > 1 ? &out.records[out.records.size() - 2] : nullptr;
    for (auto& v : check_record(r, prev)) out.violations.push_back(std::move(v));
    out.min_rho = std::min(out.min_rho, r.min_rho);
    out.max_monitor = std::max(out.max_monitor, alpha <= 1.0 ? r.max_abs_dxrho : r.max_abs_dx2rho);
  };
  auto stop = [&](Termination t, std::string msg) {
    out.termination = t;
    out.message = std::move(msg);
  };

  EventClock diag(o.diag_dt, o.T), snap(o.snapshot_dt, o.T);
  try {
    record();
    if (o.snapshot_dt > 0.0) out.snapshots.push_back(s);
    while (!at_time(s.t, o.T) && s.t < o.T) {
      const double target = std::min(diag.next(), snap.next());
      auto step = advance(s, c, ctx.A, ctx.P0, target - s.t);
      s = std::move(step.state);
      last_dt = step.dt;
      ++out.steps;
      if (at_time(s.t, target)) s.t = target;

      const double m = s.rho.min();
      const double mon = detail::step_monitor(s.rho, alpha);
      out.min_rho = std::min(out.min_rho, m);
      out.max_monitor = std::max(out.max_monitor, mon);
      std::ostringstream msg;
      if (!(m > 0.0)) {
        msg << "vacuum: min rho = " << m << " at t = " << s.t;
        stop(Termination::vacuum, msg.str());
        break;
      }
      const bool diag_due = diag.due(s.t);
      const bool snap_due = snap.due(s.t);
      if (m < c.vacuum_eps) {
        msg << "vacuum: min rho = " << m << " < " << c.vacuum_eps << " at t = " << s.t;
        stop(Termination::vacuum, msg.str());
      } else if (mon > c.gradient_cap) {
        msg << "gradient cap exceeded: monitor = " << mon << " > " << c.gradient_cap << " at t = " << s.t;
        stop(Termination::gradient_cap, msg.str());
      }
      if (diag_due || out.termination != Termination::completed) record();
      if (snap_due) out.snapshots.push_back(s);
      if (out.termination != Termination::completed) break;
    }
  } catch (const BlowUpSuspected& e) {
    stop(Termination::dt_collapse, e.what());
    try {
      if (out.records.empty() || out.records.back().t != s.t) record();
    } catch (const StateError&) {
    }
  } catch (const VacuumError& e) {
    stop(Termination::vacuum, e.what());
  } catch (const NumericError& e) {
    stop(Termination::non_finite, e.what());
  }
  out.final_t = s.t;
  fill_energy_residuals(out.records);
  return out;
}

}  // namespace eas
