#include <catch_amalgamated.hpp>

#include "eas/dynamics.hpp"

using namespace eas;
using Catch::Approx;
using std::numbers::pi;

namespace {

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

SymbolTable pure_power(std::size_t N, double alpha) {
  return tabulate_symbol(N, [&](double z) { return std::pow(std::abs(z), alpha); }, SymbolSource::closed_form);
}

}  // namespace

TEST_CASE("initial G", "[dynamics]") {
  Grid g(64);
  const auto A = pure_power(64, 1.3);
  const auto one = Field(g, 1.0);
  const auto s = Field::sample(g, [](double x) { return std::sin(2 * pi * x); });
  const auto G1 = compute_G0(one, s, A);
  CHECK(max_diff(G1, Field::sample(g, [](double x) { return 2 * pi * std::cos(2 * pi * x); })) < 1e-12);

  const auto rho = Field::sample(g, [](double x) { return 1.0 + 0.1 * std::cos(2 * pi * x); });
  const auto G2 = compute_G0(rho, Field(g), A);
  const double lam = std::pow(2 * pi, 1.3);
  CHECK(max_diff(G2, Field::sample(g, [&](double x) { return -0.1 * lam * std::cos(2 * pi * x); })) < 1e-12);

  PowerLawPairKernel k(0.8, 0.3, 2.0);
  const auto d = random_bandlimited_preset(g, 1.0, 0.5, 0.7, 8, 11);
  CHECK(std::abs(compute_G0(d.rho0, d.u0, closed_form_table(k, 64)).mean()) < 1e-10);
  CHECK_THROWS_AS(compute_G0(rho, Field(Grid(32)), A), PreconditionError);
}

TEST_CASE("velocity reconstruction", "[dynamics]") {
  Grid g(64);
  const auto A = closed_form_table(PowerLawPairKernel(1.2, 0.4, 1.0), 64);
  SimState flat{0.0, Field(g, 2.0), Field(g)};
  const auto d = reconstruct_velocity(flat, A, 3.0);
  for (double v : d.u.values) CHECK(v == Approx(1.5).epsilon(1e-15));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = random_bandlimited_preset(g, 1.0, 0.6, 0.8, 10, seed);
    const auto st = initial_state(data, A);
    const double P0 = momentum(data.rho0, data.u0);
    const auto r = reconstruct_velocity(st, A, P0);
    CHECK(max_diff(r.u, data.u0) < 1e-8);
    CHECK(momentum(st.rho, r.u) == Approx(P0).margin(1e-14));
    CHECK(max_diff(spectral_derivative(r.psi), st.G) < 1e-10);
    CHECK(std::abs(r.psi.mean()) < 1e-15);
    CHECK(std::abs(r.varphi.mean()) < 1e-15);
    auto theta = st.rho;
    theta += -theta.mean();
    CHECK(max_diff(spectral_derivative(r.varphi), theta) < 1e-10);
    CHECK(max_diff(r.F, divide(st.G, st.rho)) == 0.0);
  }
  SimState vac{0.0, Field::sample(g, [](double x) { return std::cos(2 * pi * x); }), Field(g)};
  CHECK_THROWS_AS(reconstruct_velocity(vac, A, 0.0), VacuumError);
}

TEST_CASE("right-hand side", "[dynamics]") {
  Grid g(64);
  const auto A = closed_form_table(PowerLawPairKernel(1.2, 0.4, 1.0), 64);
  SimState flat{0.0, Field(g, 1.0), Field(g)};
  const auto [r0, g0] = rhs(flat, A, 0.0);
  CHECK(r0.sup_abs() == 0.0);
  CHECK(g0.sup_abs() == 0.0);

  const auto data = random_bandlimited_preset(g, 1.0, 0.5, 0.5, 10, 4);
  const auto st = initial_state(data, A);
  const auto [dr, dG] = rhs(st, A, momentum(data.rho0, data.u0));
  CHECK(std::abs(dr.mean()) < 1e-13);
  CHECK(std::abs(dG.mean()) < 1e-12);

  // Linearization about (1, 0): d_t theta = -A(2 pi m) theta.
  const double eps = 1e-6;
  for (int m : {1, 2, 4}) {
    SimState lin{0.0, Field::sample(g, [&](double x) { return 1.0 + eps * std::cos(2 * pi * m * x); }), Field(g)};
    const auto [drho, dG2] = rhs(lin, A, 0.0);
    const double Am = A.at_mode(m);
    for (std::size_t j = 0; j < 64; ++j) {
      const double theta = lin.rho[j] - 1.0;
      CHECK(drho[j] == Approx(-Am * theta).margin(10.0 * eps * eps * (1.0 + std::abs(Am))));
    }
    CHECK(dG2.sup_abs() < 1e-20);
  }
}

TEST_CASE("time stepping", "[dynamics]") {
  Grid g(64);
  const auto A = closed_form_table(PowerLawPairKernel(1.2, 0.4, 1.0), 64);
  StepControl c;
  SimState flat{0.0, Field(g, 1.0), Field(g)};
  const auto step = advance(flat, c, A, 0.0);
  CHECK(step.dt == std::min(c.dt_max, c.stab / A.max_positive()));
  CHECK(max_diff(step.state.rho, flat.rho) == 0.0);
  CHECK(step.state.G.sup_abs() == 0.0);

  const auto data = cosine_preset(g, 1.0, 0.3, 1, 0.5, 2);
  auto st = initial_state(data, A);
  const double P0 = momentum(data.rho0, data.u0);
  const double mass0 = st.rho.mean();
  const double intG0 = st.G.mean();
  c.dt_max = 1e-3;
  for (int i = 0; i < 1000; ++i) st = advance(st, c, A, P0).state;
  CHECK(std::abs(st.rho.mean() - mass0) < 1e-10 * mass0);
  CHECK(std::abs(st.G.mean() - intG0) < 1e-10);
  const auto d = reconstruct_velocity(st, A, P0);
  CHECK(momentum(st.rho, d.u) == Approx(P0).margin(1e-12));

  // Output capping.
  const auto capped = advance(st, c, A, P0, 1e-5);
  CHECK(capped.dt == 1e-5);

  StepControl tight = c;
  tight.dt_min = 1.0;
  tight.dt_max = 1.0;
  CHECK_THROWS_AS(advance(st, tight, A, P0), BlowUpSuspected);

  SimState bad = st;
  bad.G.values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(advance(bad, c, A, P0), NumericError);

  StepControl invalid;
  invalid.dt_min = 1.0;
  invalid.dt_max = 0.5;
  CHECK_THROWS_AS(invalid.validate(), PreconditionError);
}

TEST_CASE("presets", "[dynamics]") {
  Grid g(128);
  const auto a = random_bandlimited_preset(g, 1.0, 0.6, 0.4, 12, 99);
  const auto b = random_bandlimited_preset(g, 1.0, 0.6, 0.4, 12, 99);
  CHECK(a.rho0.values == b.rho0.values);
  CHECK(a.u0.values == b.u0.values);
  CHECK(a.rho0.min() >= 0.4 - 1e-15);
  CHECK(a.u0.sup_abs() == Approx(0.4).epsilon(1e-15));
  const auto c = random_bandlimited_preset(g, 1.0, 0.6, 0.4, 12, 100);
  CHECK(c.rho0.values != a.rho0.values);
  CHECK_THROWS_AS(random_bandlimited_preset(g, 1.0, 0.6, 0.4, 60, 1), PreconditionError);

  const auto nv = near_vacuum_preset(g, 1.0, 0.95, 0.0);
  CHECK(nv.rho0.min() == Approx(0.05).epsilon(1e-12));
  CHECK_THROWS_AS(near_vacuum_preset(g, 1.0, 1.0, 0.0), PreconditionError);
}
