#pragma once

// Flat `section.key = value` run configuration with `#` comments.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eas/dynamics.hpp"
#include "eas/errors.hpp"
#include "eas/kernel.hpp"
#include "eas/moc.hpp"
#include "eas/symbol.hpp"

namespace eas {

enum class Mode { euler_alignment, burgers };
enum class KernelType { power_pair, custom_table };
enum class Preset { cosine, near_vacuum, random_bandlimited };

struct RunConfig {
  Mode mode = Mode::euler_alignment;

  KernelType kernel_type = KernelType::power_pair;
  double alpha = 1.0;
  double beta = 0.5;
  double mu = 0.0;
  std::string kernel_table;  ///< two-column (x, phi) file for custom_table
  double a0 = 0.5;           ///< declared constants of a custom table
  double c1 = 1.0;
  double c2 = 1.0;
  long images = 64;
  std::optional<double> phi_m;  ///< declared floor of the periodized kernel

  std::size_t N = 0;
  double T = 0.0;
  double diag_dt = 0.01;
  double snapshot_dt = 0.0;

  StepControl step;

  Preset preset = Preset::cosine;
  double rho_bar = 1.0;
  double rho_amp = 0.5;
  long rho_mode = 1;
  double u_amp = 0.5;
  long u_mode = 1;
  long modes = 4;
  std::uint64_t seed = 1;

  std::string diagnostics_path = "diagnostics.csv";
  std::string snapshot_prefix;  ///< empty: no snapshot files
  std::string summary_path;     ///< empty: sweep summary on stdout

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Ctx {
  std::string key;
  int line = 0;
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    if (line > 0) msg << "line " << line << ": ";
    msg << key << ": " << what;
    throw ConfigError(msg.str(), line, key);
  }
};

inline double parse_double(std::string_view v, const Ctx& c) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) c.fail("expected a number, got '" + std::string(v) + "'");
  if (!std::isfinite(x)) c.fail("value must be finite");
  return x;
}

template <class Int>
Int parse_int(std::string_view v, const Ctx& c) {
  Int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) c.fail("expected an integer, got '" + std::string(v) + "'");
  return x;
}

struct Entry {
  const char* key;
  bool numeric;
  std::function<void(RunConfig&, std::string_view, const Ctx&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

// lo/hi bounds with open or closed ends.
struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false, hi_open = false;
  void check(double x, const Ctx& c) const {
    const bool ok = (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
    if (ok) return;
    std::ostringstream msg;
    msg << "value " << x << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    c.fail(msg.str());
  }
};

inline Range positive() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
inline Range non_negative() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }

inline Entry real(const char* key, double RunConfig::*m, Range r) {
  return {key, true,
          [m, r](RunConfig& cfg, std::string_view v, const Ctx& c) {
            const double x = parse_double(v, c);
            r.check(x, c);
            cfg.*m = x;
          },
          [m](const RunConfig& cfg) { return std::optional<std::string>(format_double(cfg.*m)); }};
}

inline Entry step_real(const char* key, double StepControl::*m) {
  return {key, true,
          [m](RunConfig& cfg, std::string_view v, const Ctx& c) {
            const double x = parse_double(v, c);
            positive().check(x, c);
            cfg.step.*m = x;
          },
          [m](const RunConfig& cfg) { return std::optional<std::string>(format_double(cfg.step.*m)); }};
}

inline Entry integer(const char* key, long RunConfig::*m, long lo) {
  return {key, true,
          [m, lo](RunConfig& cfg, std::string_view v, const Ctx& c) {
            const long x = parse_int<long>(v, c);
            if (x < lo) c.fail("value must be >= " + std::to_string(lo));
            cfg.*m = x;
          },
          [m](const RunConfig& cfg) { return std::optional<std::string>(std::to_string(cfg.*m)); }};
}

inline Entry text(const char* key, std::string RunConfig::*m) {
  return {key, false, [m](RunConfig& cfg, std::string_view v, const Ctx&) { cfg.*m = std::string(v); },
          [m](const RunConfig& cfg) { return std::optional<std::string>(cfg.*m); }};
}

template <class E>
Entry choice(const char* key, E RunConfig::*m, std::vector<std::pair<const char*, E>> names) {
  return {key, false,
          [m, names](RunConfig& cfg, std::string_view v, const Ctx& c) {
            for (const auto& [n, e] : names) {
              if (v == n) {
                cfg.*m = e;
                return;
              }
            }
            std::string opts;
            for (const auto& [n, e] : names) opts += (opts.empty() ? "" : ", ") + std::string(n);
            c.fail("unknown value '" + std::string(v) + "' (expected one of " + opts + ")");
          },
          [m, names](const RunConfig& cfg) {
            for (const auto& [n, e] : names)
              if (cfg.*m == e) return std::optional<std::string>(n);
            return std::optional<std::string>();
          }};
}

inline const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(choice<Mode>("run.mode", &RunConfig::mode,
                             {{"euler_alignment", Mode::euler_alignment}, {"burgers", Mode::burgers}}));
    t.push_back(real("run.T", &RunConfig::T, positive()));
    t.push_back(real("run.diag_dt", &RunConfig::diag_dt, positive()));
    t.push_back(real("run.snapshot_dt", &RunConfig::snapshot_dt, non_negative()));

    t.push_back(choice<KernelType>("kernel.type", &RunConfig::kernel_type,
                                   {{"power_pair", KernelType::power_pair}, {"custom_table", KernelType::custom_table}}));
    t.push_back(real("kernel.alpha", &RunConfig::alpha, {0.0, 2.0, true, true}));
    t.push_back(real("kernel.beta", &RunConfig::beta, {0.0, 2.0, true, true}));
    t.push_back(real("kernel.mu", &RunConfig::mu, non_negative()));
    t.push_back(text("kernel.table", &RunConfig::kernel_table));
    t.push_back(real("kernel.a0", &RunConfig::a0, {0.0, 0.5, true, false}));
    t.push_back(real("kernel.c1", &RunConfig::c1, {1.0, std::numeric_limits<double>::infinity()}));
    t.push_back(real("kernel.c2", &RunConfig::c2, positive()));
    t.push_back(integer("kernel.images", &RunConfig::images, 1));
    t.push_back({"kernel.phi_m", true,
                 [](RunConfig& cfg, std::string_view v, const Ctx& c) {
                   const double x = parse_double(v, c);
                   non_negative().check(x, c);
                   cfg.phi_m = x;
                 },
                 [](const RunConfig& cfg) {
                   return cfg.phi_m ? std::optional<std::string>(format_double(*cfg.phi_m)) : std::nullopt;
                 }});

    t.push_back({"grid.N", true,
                 [](RunConfig& cfg, std::string_view v, const Ctx& c) {
                   const auto n = parse_int<std::size_t>(v, c);
                   if (n < 16 || n > (std::size_t{1} << 22) || (n & (n - 1)) != 0)
                     c.fail("grid size must be a power of two in [16, 2^22]");
                   cfg.N = n;
                 },
                 [](const RunConfig& cfg) { return std::optional<std::string>(std::to_string(cfg.N)); }});

    t.push_back(step_real("step.cfl", &StepControl::cfl));
    t.push_back(step_real("step.stab", &StepControl::stab));
    t.push_back(step_real("step.grad_cfl", &StepControl::grad_cfl));
    t.push_back(step_real("step.dt_min", &StepControl::dt_min));
    t.push_back(step_real("step.dt_max", &StepControl::dt_max));
    t.push_back(step_real("step.vacuum_eps", &StepControl::vacuum_eps));
    t.push_back(step_real("step.gradient_cap", &StepControl::gradient_cap));

    t.push_back(choice<Preset>("init.preset", &RunConfig::preset,
                               {{"cosine", Preset::cosine},
                                {"near_vacuum", Preset::near_vacuum},
                                {"random_bandlimited", Preset::random_bandlimited}}));
    t.push_back(real("init.rho_bar", &RunConfig::rho_bar, positive()));
    t.push_back(real("init.rho_amp", &RunConfig::rho_amp, non_negative()));
    t.push_back(integer("init.rho_mode", &RunConfig::rho_mode, 1));
    t.push_back(real("init.u_amp", &RunConfig::u_amp, {}));
    t.push_back(integer("init.u_mode", &RunConfig::u_mode, 1));
    t.push_back(integer("init.modes", &RunConfig::modes, 1));
    t.push_back({"init.seed", true,
                 [](RunConfig& cfg, std::string_view v, const Ctx& c) { cfg.seed = parse_int<std::uint64_t>(v, c); },
                 [](const RunConfig& cfg) { return std::optional<std::string>(std::to_string(cfg.seed)); }});

    t.push_back(text("output.diagnostics", &RunConfig::diagnostics_path));
    t.push_back(text("output.snapshots", &RunConfig::snapshot_prefix));
    t.push_back(text("output.summary", &RunConfig::summary_path));
    return t;
  }();
  return table;
}

inline const Entry* find_entry(std::string_view key) {
  for (const auto& e : entries())
    if (key == e.key) return &e;
  return nullptr;
}

// Calls f(line number, key, value) for each assignment; comments and blank
// lines are skipped.
template <class F>
void for_each_assignment(std::string_view text, F&& f) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + s + "'", line);
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key before '='", line);
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": " + key + ": missing value", line, key);
    f(line, key, value);
  }
}

}  // namespace detail

/// Cross-field checks; the key named in the error is the one to change.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what, 0, key); };
  if (c.N == 0) fail("grid.N", "required key missing");
  if (!(c.T > 0.0)) fail("run.T", "required key missing");
  if (c.kernel_type == KernelType::power_pair && !(c.beta < c.alpha)) fail("kernel.beta", "must be below kernel.alpha");
  if (c.kernel_type == KernelType::custom_table && c.kernel_table.empty())
    fail("kernel.table", "custom_table kernels need a table path");
  if (c.mode == Mode::burgers && c.kernel_type != KernelType::power_pair)
    fail("kernel.type", "burgers mode needs the power_pair symbol");
  if (!(c.step.dt_min <= c.step.dt_max)) fail("step.dt_min", "must not exceed step.dt_max");
  const auto cutoff = static_cast<long>(c.N / 3);
  if (c.rho_mode > cutoff) fail("init.rho_mode", "must be <= N/3");
  if (c.u_mode > cutoff) fail("init.u_mode", "must be <= N/3");
  if (c.preset == Preset::random_bandlimited && c.modes > cutoff) fail("init.modes", "must be <= N/3");
  if (c.mode == Mode::euler_alignment && !(c.rho_amp < c.rho_bar))
    fail("init.rho_amp", "must be below init.rho_bar so the density stays positive");
}

/// Sets one key from its textual value; unknown keys are rejected.
inline void set_value(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0) {
  const auto* e = detail::find_entry(key);
  if (e == nullptr) {
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "unknown key '" + key + "'",
                      line, key);
  }
  e->set(cfg, value, detail::Ctx{key, line});
}

inline bool is_numeric_key(const std::string& key) {
  const auto* e = detail::find_entry(key);
  return e != nullptr && e->numeric;
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  detail::for_each_assignment(text, [&](int line, const std::string& key, const std::string& value) {
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError("line " + std::to_string(line) + ": " + key + ": duplicate key (first set on line " +
                            std::to_string(it->second) + ")",
                        line, key);
    }
    seen[key] = line;
    set_value(cfg, key, value, line);
  });
  for (const char* required : {"kernel.type", "grid.N", "run.T"}) {
    if (!seen.count(required)) throw ConfigError(std::string(required) + ": required key missing", 0, required);
  }
  validate(cfg);
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// A relative kernel.table is taken relative to the config file.
inline RunConfig load_config(const std::string& path) {
  RunConfig c = parse_config(read_text_file(path));
  const std::filesystem::path table(c.kernel_table);
  if (!c.kernel_table.empty() && table.is_relative())
    c.kernel_table = (std::filesystem::path(path).parent_path() / table).string();
  return c;
}

/// Every key with its current value, one per line, in a fixed order.
inline std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& e : detail::entries()) {
    const auto v = e.get(cfg);
    if (!v) continue;
    if (!e.numeric && v->empty()) continue;
    out << e.key << " = " << *v << "\n";
  }
  return out.str();
}

/// Two-column (x, phi(x)) text table; `#` starts a comment.
inline std::vector<std::pair<double, double>> read_kernel_table(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::vector<std::pair<double, double>> rows;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    if (detail::trim(raw).empty()) continue;
    std::istringstream ls(raw);
    double x = 0.0, y = 0.0;
    std::string extra;
    if (!(ls >> x >> y) || (ls >> extra))
      throw ConfigError(path + ": line " + std::to_string(line) + ": expected two numbers", line, "kernel.table");
    rows.emplace_back(x, y);
  }
  return rows;
}

inline Kernel make_kernel(const RunConfig& c) {
  if (c.kernel_type == KernelType::power_pair) return PowerLawPairKernel(c.alpha, c.beta, c.mu);
  ShortRangeConstants declared;
  declared.alpha = c.alpha;
  declared.a0 = c.a0;
  declared.c1 = c.c1;
  declared.c2 = c.c2;
  try {
    return tabulated_kernel(read_kernel_table(c.kernel_table), declared);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("kernel.table: ") + e.what(), 0, "kernel.table");
  }
}

inline InitialData make_initial_data(const RunConfig& c) {
  const Grid g(c.N);
  switch (c.preset) {
    case Preset::cosine:
      return cosine_preset(g, c.rho_bar, c.rho_amp, static_cast<int>(c.rho_mode), c.u_amp, static_cast<int>(c.u_mode));
    case Preset::near_vacuum:
      if (!(c.rho_amp < c.rho_bar)) throw ConfigError("init.rho_amp: near_vacuum needs rho_amp < rho_bar", 0, "init.rho_amp");
      return near_vacuum_preset(g, c.rho_bar, c.rho_amp, c.u_amp);
    case Preset::random_bandlimited:
      return random_bandlimited_preset(g, c.rho_bar, c.rho_amp, c.u_amp, static_cast<int>(c.modes), c.seed);
  }
  throw ConfigError("init.preset: unknown preset", 0, "init.preset");
}

/// Modulus parameters as a small key-value file (`moc.*` keys).
inline std::string serialize_moc_spec(const MocSpec& s) {
  std::ostringstream out;
  out << "moc.alpha = " << detail::format_double(s.alpha()) << "\n"
      << "moc.delta = " << detail::format_double(s.delta()) << "\n"
      << "moc.gamma = " << detail::format_double(s.gamma()) << "\n"
      << "moc.log_lambda = " << detail::format_double(s.log_lambda()) << "\n"
      << "moc.range_bound = " << detail::format_double(s.range_bound()) << "\n"
      << "moc.shifted_log_lambda = " << detail::format_double(s.shifted_log_lambda()) << "\n";
  return out.str();
}

inline MocSpec parse_moc_spec(std::string_view text) {
  std::map<std::string, double> v;
  detail::for_each_assignment(text, [&](int line, const std::string& key, const std::string& value) {
    static const char* known[] = {"moc.alpha", "moc.delta", "moc.gamma", "moc.log_lambda", "moc.range_bound",
                                  "moc.shifted_log_lambda"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
    v[key] = detail::parse_double(value, detail::Ctx{key, line});
  });
  for (const char* k : {"moc.alpha", "moc.delta", "moc.gamma", "moc.log_lambda", "moc.range_bound"})
    if (!v.count(k)) throw ConfigError(std::string(k) + ": required key missing", 0, k);
  try {
    // The shifted form, when present, is exact and takes precedence.
    if (v.count("moc.shifted_log_lambda"))
      return MocSpec::from_shifted(v["moc.alpha"], v["moc.delta"], v["moc.gamma"], v["moc.shifted_log_lambda"],
                                   v["moc.range_bound"]);
    return MocSpec(v["moc.alpha"], v["moc.delta"], v["moc.gamma"], v["moc.log_lambda"], v["moc.range_bound"]);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("moc spec: ") + e.what());
  }
}

}  // namespace eas
