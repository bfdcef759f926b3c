#include <catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "eas/burgers.hpp"
#include "eas/symbol.hpp"

using namespace eas;
using std::numbers::pi;

namespace {

SymbolTable pair_symbol(std::size_t N, double alpha, double beta, double mu) {
  return tabulate_symbol(N, [&](double z) { return symbol_closed_form(alpha, beta, mu, z); }, SymbolSource::closed_form);
}

Field sine(Grid g, double amp, int m = 1) {
  return Field::sample(g, [&](double x) { return amp * std::sin(2 * pi * m * x); });
}

Field random_field(Grid g, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Field f(g);
  for (auto& v : f.values) v = nd(gen);
  return dealias(f);
}

double mode_amplitude(const Field& u, int m) { return 2.0 * std::abs(forward(u).coeffs[m]); }

}  // namespace

TEST_CASE("burgers right-hand side", "[burgers]") {
  Grid g(128);
  const auto A = pair_symbol(128, 1.3, 0.5, 1.0);

  SECTION("zero data") {
    const auto r = burgers_rhs(Field(g), A);
    CHECK(r.sup_abs() == 0.0);
  }
  SECTION("linearization at small amplitude") {
    const double eps = 1e-6;
    const auto u = sine(g, eps);
    const auto r = burgers_rhs(u, A);
    const double a1 = A.at_mode(1);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(r[j] + a1 * u[j]));
    // The quadratic part is eps^2 pi sin(4 pi x).
    CHECK(err <= 1.01 * eps * eps * pi);
    CHECK(err >= 0.99 * eps * eps * pi);
  }
  SECTION("flux form matches the advective form on band-limited data") {
    const auto u = random_field(g, 7);
    const auto r = burgers_rhs(u, A);
    const auto adv = dealias(times(u, spectral_derivative(u)));
    const auto lin = apply_multiplier(u, A);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(r[j] + adv[j] + lin[j]));
    CHECK(err < 1e-10 * std::max(1.0, r.sup_abs()));
  }
  SECTION("zero mean") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto u = random_field(g, seed);
      const auto r = burgers_rhs(u, A);
      CHECK(std::abs(r.mean()) < 1e-12 * std::max(1.0, r.sup_abs()));
    }
  }
  SECTION("grid mismatch") {
    CHECK_THROWS_AS(burgers_rhs(Field(Grid(64)), A), PreconditionError);
  }
  SECTION("non-finite input") {
    Field u(g);
    u[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(burgers_rhs(u, A), NumericError);
  }
}

TEST_CASE("burgers step policy", "[burgers]") {
  Grid g(64);
  const auto A = pair_symbol(64, 1.0, 0.5, 0.0);
  StepControl c;
  SECTION("zero data is limited by the dissipation only") {
    CHECK(burgers_admissible_dt(Field(g), c, A) == Catch::Approx(c.stab / A.max_positive()));
  }
  SECTION("steep data is limited by the gradient") {
    const auto u = sine(g, 100.0);
    const double grad = 100.0 * 2 * pi;
    CHECK(burgers_admissible_dt(u, c, A) <= c.grad_cfl / grad * (1 + 1e-12));
  }
  SECTION("collapse throws") {
    c.dt_min = 1.0;
    c.dt_max = 1.0;
    CHECK_THROWS_AS(burgers_advance(BurgersState{0.0, sine(g, 1.0)}, c, A), BlowUpSuspected);
  }
}

TEST_CASE("burgers runs", "[burgers]") {
  StepControl c;
  c.dt_min = 2e-4;
  c.grad_cfl = 0.012;

  SECTION("mean is conserved") {
    Grid g(128);
    const auto A = pair_symbol(128, 1.2, 0.5, 2.0);
    Field u0 = random_field(g, 3);
    u0 += 0.37;
    const auto tr = burgers_run(u0, A, StepControl{}, 0.5, 0.05);
    REQUIRE(tr.termination == Termination::completed);
    for (const auto& r : tr.records) CHECK(std::abs(r.mean_u - u0.mean()) < 1e-10);
  }
  SECTION("records land on the output times") {
    Grid g(64);
    const auto A = pair_symbol(64, 1.2, 0.5, 0.0);
    const auto tr = burgers_run(sine(g, 0.5), A, c, 0.3, 0.1, 0.15);
    REQUIRE(tr.records.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(tr.records[i].t == Catch::Approx(0.1 * i).margin(1e-14));
    REQUIRE(tr.snapshots.size() == 3);
    CHECK(tr.snapshots.back().t == Catch::Approx(0.3).margin(1e-14));
    CHECK(tr.final_t == Catch::Approx(0.3).margin(1e-14));
  }
  SECTION("long-wave growth at rate -A") {
    Grid g(64);
    const auto A = pair_symbol(64, 1.5, 0.5, 8.0);
    for (int m : {1, 2}) {
      const double Am = A.at_mode(m);
      const double eps = 1e-6, T = 0.01;
      StepControl small;
      small.dt_max = 1e-4;
      const auto end = burgers_run(sine(g, eps, m), A, small, T, T, T).snapshots.back();
      const double measured = std::log(mode_amplitude(end.u, m) / eps) / T;
      INFO("m = " << m << " A = " << Am);
      CHECK(std::abs(measured + Am) <= 0.01 * std::abs(Am));
    }
    CHECK(A.at_mode(1) < 0.0);
    CHECK(A.at_mode(8) > 0.0);
  }
  SECTION("alpha above one stays smooth") {
    Grid g(128);
    const auto A = pair_symbol(128, 1.2, 0.5, 0.0);
    const auto tr = burgers_run(sine(g, 2.0), A, c, 5.0, 0.5);
    CHECK(tr.termination == Termination::completed);
    CHECK(tr.max_gradient < 20.0);
  }
  SECTION("alpha below one collapses, consistently under refinement") {
    std::vector<double> times;
    for (std::size_t N : {128, 256}) {
      Grid g(N);
      const auto A = pair_symbol(N, 0.6, 0.5, 0.0);
      const auto tr = burgers_run(sine(g, 2.0), A, c, 5.0, 0.01);
      REQUIRE(tr.termination == Termination::dt_collapse);
      CHECK(tr.final_t < 5.0);
      // The front steepens until the step collapses.
      CHECK(tr.records.back().linf_dxu > 4.0 * tr.records.front().linf_dxu);
      times.push_back(tr.final_t);
    }
    CHECK(std::abs(times[1] - times[0]) <= 0.2 * times[1]);
  }
}

TEST_CASE("burgers csv rows", "[burgers]") {
  BurgersRecord r{0.5, 0.0, 1.25, 2.0, 3.0, 1e-3};
  CHECK(std::string(burgers_csv_header()) == "t,mean_u,energy,linf_u,linf_dxu,dt");
  CHECK(to_csv_row(r) == "0.5,0,1.25,2,3,0.001");
}
