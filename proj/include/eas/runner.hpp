#pragma once

// Config-driven runs and parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eas/burgers.hpp"
#include "eas/config.hpp"
#include "eas/io.hpp"
#include "eas/run.hpp"

namespace eas {

struct RunSummary {
  double final_t = 0.0;
  Termination termination = Termination::completed;
  double min_rho = std::numeric_limits<double>::quiet_NaN();  ///< NaN for Burgers runs
  double max_monitor = 0.0;
  std::size_t violations = 0;
  std::string message;
};

struct SimulationResult {
  Mode mode = Mode::euler_alignment;
  std::optional<Trajectory> euler;
  std::optional<BurgersTrajectory> burgers;
  RunSummary summary;

  std::string diagnostics_csv() const {
    return euler ? csv_text(diagnostics_csv_header(), euler->records)
                 : csv_text(burgers_csv_header(), burgers->records);
  }

  std::vector<Snapshot> snapshots() const {
    std::vector<Snapshot> out;
    if (euler) {
      for (const auto& s : euler->snapshots) out.push_back({s.t, {s.rho, s.G}});
    } else {
      for (const auto& s : burgers->snapshots) out.push_back({s.t, {s.u}});
    }
    return out;
  }
};

inline SymbolTable config_symbol(const Kernel& k, std::size_t N) {
  if (const auto* p = std::get_if<PowerLawPairKernel>(&k)) return closed_form_table(*p, N);
  return symbol_table_for(k, N);
}

inline RunOptions run_options(const RunConfig& c) { return {c.step, c.T, c.diag_dt, c.snapshot_dt}; }

/// Initial state and context of an Euler-alignment config.
inline RunSetup setup_for(const RunConfig& c, const PeriodizedKernel& pk) {
  const auto data = make_initial_data(c);
  try {
    return prepare_run(data, pk, config_symbol(pk.base(), c.N), config_symbol(pk.base(), 2 * c.N), c.phi_m);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("initial data: ") + e.what());
  }
}

inline SimulationResult simulate(const RunConfig& c) {
  validate(c);
  SimulationResult r;
  r.mode = c.mode;
  const Kernel kernel = make_kernel(c);
  if (c.mode == Mode::burgers) {
    const auto A = config_symbol(kernel, c.N);
    const auto data = make_initial_data(c);
    r.burgers = burgers_run(data.u0, A, c.step, c.T, c.diag_dt, c.snapshot_dt);
    const auto& b = *r.burgers;
    r.summary = {b.final_t, b.termination, std::numeric_limits<double>::quiet_NaN(), b.max_gradient, 0, b.message};
    return r;
  }
  const PeriodizedKernel pk(kernel, static_cast<int>(c.images));
  const auto setup = setup_for(c, pk);
  r.euler = run(setup.s0, setup.ctx, run_options(c));
  const auto& t = *r.euler;
  r.summary = {t.final_t, t.termination, t.min_rho, t.max_monitor, t.violations.size(), t.message};
  return r;
}

struct SweepRow {
  std::string value;
  std::optional<RunSummary> summary;
  std::string error;  ///< set when the run could not be set up
};

namespace detail {

inline std::string csv_safe(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

}  // namespace detail

inline std::string summary_header(const std::string& key) {
  return key + ",final_t,termination,min_rho,max_monitor,violations,error";
}

inline std::string summary_row(const std::string& value, const RunSummary& s) {
  return value + "," + detail::format_double(s.final_t) + "," + std::string(to_string(s.termination)) + "," +
         detail::format_double(s.min_rho) + "," + detail::format_double(s.max_monitor) + "," +
         std::to_string(s.violations) + ",";
}

inline std::string summary_row(const SweepRow& r) {
  if (r.summary) return summary_row(r.value, *r.summary);
  return r.value + ",nan,error,nan,nan,0," + detail::csv_safe(r.error);
}

/// SIM_THREADS when set to a positive integer, else the hardware count.
inline std::size_t default_worker_count() {
  if (const char* env = std::getenv("SIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// One independent run per value, on at most `workers` threads. Rows come
/// back in input order and failures stay in their row.
inline std::vector<SweepRow> sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values,
                                   std::size_t workers) {
  if (!is_numeric_key(key)) throw ConfigError(key + ": not a numeric config key", 0, key);
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = values[i];
      try {
        RunConfig c = base;
        set_value(c, key, values[i]);
        row.summary = simulate(c).summary;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(workers, 1), values.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
  if (n > 0) work();
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace eas
