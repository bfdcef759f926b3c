// Command-line front end: simulate, sweep, symbol, moc-params, moc-check, burgers.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "eas/eas.hpp"

using namespace eas;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kAborted = 3;
constexpr int kNumericError = 4;

int exit_code(Termination t) {
  switch (t) {
    case Termination::completed: return kOk;
    case Termination::non_finite: return kNumericError;
    default: return kAborted;
  }
}

void check_outputs(const RunConfig& c) {
  check_writable(c.diagnostics_path);
  if (!c.snapshot_prefix.empty() && c.snapshot_dt > 0.0) check_writable(snapshot_path(c.snapshot_prefix, 0));
}

int run_and_write(const RunConfig& c) {
  check_outputs(c);
  const auto r = simulate(c);
  write_file(c.diagnostics_path, r.diagnostics_csv());
  if (!c.snapshot_prefix.empty()) {
    const auto snaps = r.snapshots();
    for (std::size_t i = 0; i < snaps.size(); ++i) write_snapshot(snapshot_path(c.snapshot_prefix, i), snaps[i]);
  }
  if (r.euler)
    for (const auto& v : r.euler->violations) std::cerr << v.line() << "\n";
  if (!r.summary.message.empty()) std::cerr << to_string(r.summary.termination) << ": " << r.summary.message << "\n";
  std::cout << summary_header("run") << "\n" << summary_row("-", r.summary) << "\n";
  return exit_code(r.summary.termination);
}

int cmd_sweep(const RunConfig& base, const std::string& axis) {
  const auto eq = axis.find('=');
  if (eq == std::string::npos) throw ConfigError("--axis must look like key=v1,v2,...");
  const std::string key = axis.substr(0, eq);
  std::vector<std::string> values;
  std::stringstream list(axis.substr(eq + 1));
  for (std::string v; std::getline(list, v, ',');) {
    const std::string t = detail::trim(v);
    if (!t.empty()) values.push_back(t);
  }
  if (!is_numeric_key(key)) throw ConfigError(key + ": not a numeric config key", 0, key);
  if (!base.summary_path.empty()) check_writable(base.summary_path);
  const auto rows = sweep(base, key, values, default_worker_count());
  std::string out = summary_header(key) + "\n";
  for (const auto& r : rows) out += summary_row(r) + "\n";
  if (base.summary_path.empty()) {
    std::cout << out;
  } else {
    write_file(base.summary_path, out);
  }
  return kOk;
}

int cmd_symbol(const RunConfig& c) {
  const Kernel k = make_kernel(c);
  const auto A = config_symbol(k, c.N);
  std::cout << "k,zeta,A\n";
  for (long i = 0; i <= static_cast<long>(c.N / 2); ++i) {
    std::printf("%ld,%.17g,%.17g\n", i, 2.0 * std::numbers::pi * static_cast<double>(i), A.at_mode(i));
  }
  const auto consts = kernel_constants(k);
  const auto b = verify_symbol_bounds(A, consts.alpha, consts.a0, &consts);
  std::fprintf(stderr, "lower bound constant %.6g (%s), upper bound constant %.6g (%s)\n", b.C_lower,
               b.lower_pass ? "pass" : "fail", b.C_upper, b.upper_pass ? "pass" : "fail");
  return kOk;
}

void print_thresholds(const char* group, const std::vector<Threshold>& ts) {
  for (const auto& t : ts)
    std::printf("%s,%s,%.17g,%s\n", group, t.name.c_str(), t.log_value, detail::csv_safe(t.condition).c_str());
}

int cmd_moc_params(const RunConfig& c, double T, const std::string& out_path) {
  if (c.mode != Mode::euler_alignment) throw ConfigError("run.mode: moc-params needs euler_alignment", 0, "run.mode");
  const PeriodizedKernel pk(make_kernel(c), static_cast<int>(c.images));
  const auto setup = setup_for(c, pk);
  const auto sel = select_parameters(T, setup.ctx.consts);
  const auto& s = sel.spec;
  std::printf("delta = %.17g\ngamma = %.17g\nlog_lambda = %.17g\nlambda = %.17g\nlog_Xi = %.17g\nXi = %.17g\n",
              s.delta(), s.gamma(), s.log_lambda(), s.lambda(), s.log_Xi(), s.Xi());
  std::printf("rho_min = %.17g\nC_alpha = %.17g\n", sel.rho_min, sel.C_alpha);
  std::printf("group,name,log_value,condition\n");
  print_thresholds("delta", sel.delta_thresholds);
  print_thresholds("gamma", sel.gamma_thresholds);
  print_thresholds("lambda", sel.lambda_thresholds);
  if (!out_path.empty()) write_file(out_path, serialize_moc_spec(s));
  return kOk;
}

int cmd_moc_check(const std::string& snapshot, const std::string& spec_file, bool refined) {
  const auto snap = read_snapshot(snapshot);
  const auto spec = parse_moc_spec(read_text_file(spec_file));
  const auto r = check_obeys(snap.fields.front(), spec, refined);
  std::printf("t = %.17g\nobeys = %s\nx_i = %.17g\nx_j = %.17g\ndiff = %.17g\nomega = %.17g\nmargin = %.17g\n",
              snap.t, r.obeys ? "true" : "false", r.x_i, r.x_j, r.diff, r.omega, r.margin);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euler-alignment simulator and verification tools"};
  app.require_subcommand(1);

  std::string cfg_path, axis, out_path, snapshot, spec_file;
  double T = 0.0;
  bool refined = false;

  auto* sim = app.add_subcommand("simulate", "Run one simulation from a config file");
  sim->add_option("config", cfg_path, "Config file")->required();
  auto* swp = app.add_subcommand("sweep", "Run one simulation per value of a numeric key");
  swp->add_option("config", cfg_path, "Base config file")->required();
  swp->add_option("--axis", axis, "key=v1,v2,...")->required();
  auto* sym = app.add_subcommand("symbol", "Print the Fourier symbol table");
  sym->add_option("config", cfg_path, "Config file")->required();
  auto* mp = app.add_subcommand("moc-params", "Select modulus-of-continuity parameters for a horizon");
  mp->add_option("config", cfg_path, "Config file")->required();
  mp->add_option("--T", T, "Time horizon")->required()->check(CLI::PositiveNumber);
  mp->add_option("--out", out_path, "Write the selected modulus to this spec file");
  auto* mc = app.add_subcommand("moc-check", "Check a snapshot's density against a modulus");
  mc->add_option("snapshot", snapshot, "Snapshot file")->required();
  mc->add_option("specfile", spec_file, "Modulus spec file")->required();
  mc->add_flag("--refined", refined, "Scan the interpolant on the doubled grid");
  auto* bg = app.add_subcommand("burgers", "Run the constant-density comparison equation");
  bg->add_option("config", cfg_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (mc->parsed()) return cmd_moc_check(snapshot, spec_file, refined);
    RunConfig c = load_config(cfg_path);
    if (sim->parsed()) return run_and_write(c);
    if (bg->parsed()) {
      c.mode = Mode::burgers;
      validate(c);
      return run_and_write(c);
    }
    if (swp->parsed()) return cmd_sweep(c, axis);
    if (sym->parsed()) return cmd_symbol(c);
    if (mp->parsed()) return cmd_moc_params(c, T, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const StateError& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kAborted;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumericError;
  }
  return kOk;
}
