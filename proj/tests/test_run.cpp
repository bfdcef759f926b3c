#include <catch_amalgamated.hpp>

#include "eas/run.hpp"

using namespace eas;

namespace {

struct Setup {
  PeriodizedKernel pk;
  SymbolTable A, A_fine;
  RunSetup run;
};

Setup make(std::size_t N, double alpha, double beta, double mu, const InitialData& d) {
  PowerLawPairKernel k(alpha, beta, mu);
  Setup s{PeriodizedKernel(k), closed_form_table(k, N), closed_form_table(k, 2 * N), {}};
  s.run = prepare_run(d, s.pk, s.A, s.A_fine);
  return s;
}

}  // namespace

TEST_CASE("compliant run", "[run]") {
  Grid g(64);
  const auto s = make(64, 1.2, 0.4, 1.0, cosine_preset(g, 1.0, 0.3, 1, 0.2, 1));
  RunOptions o;
  o.T = 0.3;
  o.diag_dt = 0.05;
  o.snapshot_dt = 0.1;
  const auto tr = run(s.run.s0, s.run.ctx, o);
  REQUIRE(tr.termination == Termination::completed);
  CHECK(tr.final_t == Catch::Approx(0.3).margin(1e-14));
  REQUIRE(tr.records.size() == 7);
  CHECK(tr.snapshots.size() == 4);
  CHECK(tr.violations.empty());
  for (const auto& r : tr.records) {
    CHECK(std::abs(r.mass - s.run.ctx.mass0) < 1e-10 * s.run.ctx.mass0);
    CHECK(std::abs(r.momentum - s.run.ctx.P0) < 1e-10);
    CHECK(std::abs(r.int_G) < 1e-10);
    CHECK(std::isfinite(r.energy_fluct_rate_residual));
  }
  CHECK(tr.min_rho > 0.0);
  CHECK(tr.min_rho <= s.run.s0.rho.min());
  CHECK(tr.steps >= 6);
}

TEST_CASE("typed termination", "[run]") {
  Grid g(64);
  const auto s = make(64, 0.8, 0.4, 1.0, cosine_preset(g, 1.0, 0.5, 1, 0.5, 1));
  RunOptions o;
  o.T = 0.2;
  o.diag_dt = 0.05;

  SECTION("vacuum threshold") {
    o.control.vacuum_eps = 0.6;
    const auto tr = run(s.run.s0, s.run.ctx, o);
    CHECK(tr.termination == Termination::vacuum);
    CHECK(tr.final_t < 0.05);
    CHECK(tr.records.size() == 2);
  }
  SECTION("gradient cap") {
    o.control.gradient_cap = 1.0;
    const auto tr = run(s.run.s0, s.run.ctx, o);
    CHECK(tr.termination == Termination::gradient_cap);
    CHECK(tr.max_monitor > 1.0);
  }
  SECTION("step collapse") {
    o.control.dt_min = 0.009;
    o.control.dt_max = 0.01;
    o.control.cfl = 1e-3;
    const auto tr = run(s.run.s0, s.run.ctx, o);
    CHECK(tr.termination == Termination::dt_collapse);
    CHECK(tr.final_t == 0.0);
    CHECK(tr.records.size() == 1);
  }
  SECTION("invalid options") {
    o.diag_dt = 0.0;
    CHECK_THROWS_AS(run(s.run.s0, s.run.ctx, o), PreconditionError);
  }
}

TEST_CASE("repeat runs are identical", "[run]") {
  Grid g(64);
  const auto s = make(64, 1.2, 0.4, 1.0, random_bandlimited_preset(g, 1.0, 0.5, 0.5, 6, 11));
  RunOptions o;
  o.T = 0.2;
  o.diag_dt = 0.05;
  const auto a = run(s.run.s0, s.run.ctx, o);
  const auto b = run(s.run.s0, s.run.ctx, o);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(to_csv_row(a.records[i]) == to_csv_row(b.records[i]));
}
