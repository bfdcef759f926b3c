#include <catch_amalgamated.hpp>

#include <chrono>
#include <random>

#include "eas/symbol.hpp"

using namespace eas;
using Catch::Approx;

TEST_CASE("closed-form symbol", "[symbol]") {
  CHECK(symbol_closed_form(1.5, 0.5, 2.0, 4.0) == Approx(4.0).epsilon(1e-15));
  CHECK(symbol_closed_form(1.5, 0.5, 2.0, 0.0) == 0.0);
  CHECK(symbol_closed_form(1.2, 0.4, 3.0, -7.0) == symbol_closed_form(1.2, 0.4, 3.0, 7.0));
  const double mu = 3.0, cross = std::pow(mu, 1.0 / 0.8);
  for (double z : {0.1, 0.5 * cross, 0.99 * cross}) CHECK(symbol_closed_form(1.2, 0.4, mu, z) < 0.0);
  CHECK(symbol_closed_form(1.2, 0.4, mu, 1.01 * cross) > 0.0);
}

TEST_CASE("symbol table layout", "[symbol]") {
  PowerLawPairKernel k(1.0, 0.5, 1.0);
  const auto t = closed_form_table(k, 32);
  REQUIRE(t.values.size() == 32);
  CHECK(t.wavenumbers.front() == Approx(-2.0 * std::numbers::pi * 16));
  CHECK(t.at_mode(0) == 0.0);
  for (long m = 1; m < 16; ++m) {
    CHECK(t.at_mode(m) == t.at_mode(-m));
    CHECK(t.at_mode(m) == symbol_closed_form(1.0, 0.5, 1.0, 2.0 * std::numbers::pi * m));
  }
  CHECK(t.at_mode(16) == t.at_mode(-16));
}

TEST_CASE("quadrature matches the closed form", "[symbol]") {
  PowerLawPairKernel k(1.5, 0.5, 2.0);
  const auto r = symbol_quadrature(k, 4.0);
  CHECK(std::abs(r.value - 4.0) < 1e-6);
  CHECK(r.error < 1e-8);
  CHECK(symbol_quadrature(k, 0.0).value == 0.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(0.1, 300.0);
  for (int i = 0; i < 5; ++i) {
    const double z = dist(gen);
    CHECK(symbol_quadrature(k, z).value == Approx(symbol_quadrature(k, -z).value).margin(1e-12));
  }

  for (auto [a, b] : {std::pair{0.3, 0.1}, std::pair{1.0, 0.5}, std::pair{1.9, 1.5}}) {
    PowerLawPairKernel kk(a, b, 1.0);
    for (long m : {1L, 3L, 17L, 128L}) {
      const double z = 2.0 * std::numbers::pi * m;
      CHECK(std::abs(symbol_quadrature(kk, z).value - symbol_closed_form(a, b, 1.0, z)) < 1e-6);
    }
  }
}

namespace {

// Si(t) by its power series (adequate for t <= 6).
double sine_integral(double t) {
  long double sum = 0.0L, term = t;
  for (int n = 0; n < 60; ++n) {
    sum += term / (2 * n + 1);
    term *= -static_cast<long double>(t) * t / ((2 * n + 2) * (2 * n + 3));
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("quadrature of a compactly supported kernel", "[symbol]") {
  // phi = x^{-2} on 0 < |x| <= 1/2:
  // A(z) = 2 z [Si(z/2) - (1 - cos(z/2)) / (z/2)].
  GeneralKernel k({1.0, 0.5, 1.0, 1e-3}, [](double r) { return 1.0 / (r * r); }, 0.5);
  for (double z : {3.0, 10.0}) {
    const double t = 0.5 * z;
    const double expected = 2.0 * z * (sine_integral(t) - (1.0 - std::cos(t)) / t);
    CHECK(symbol_quadrature(k, z).value == Approx(expected).epsilon(1e-9));
  }
  PowerLawPairKernel full(1.0, 0.5, 0.0);
  for (double z : {3.0, 40.0}) CHECK(std::abs(symbol_quadrature(full, z).value - z) < 1e-8);
}

TEST_CASE("symbol bounds", "[symbol]") {
  const std::size_t N = 256;
  const double alpha = 1.0;
  auto pure = tabulate_symbol(N, [&](double z) { return std::pow(std::abs(z), alpha); }, SymbolSource::closed_form);
  auto rp = verify_symbol_bounds(pure, alpha);
  CHECK(rp.C_lower == 1.0);
  CHECK(rp.C_upper == 1.0);
  CHECK(rp.lower_pass);
  CHECK(rp.upper_pass);
  for (double a : {0.5, 1.0, 1.5}) {
    auto t = tabulate_symbol(N, [&](double z) { return std::pow(std::abs(z), a); }, SymbolSource::closed_form);
    CHECK(verify_symbol_bounds(t, a).derivative_scaling_sup == Approx(a).epsilon(0.05));
  }

  PowerLawPairKernel k(1.0, 0.5, 1.0);
  const auto table = closed_form_table(k, N);
  const auto r = verify_symbol_bounds(table, 1.0);
  CHECK(r.lower_pass);
  CHECK(r.upper_pass);
  CHECK(std::isfinite(r.C_lower));
  CHECK(std::isfinite(r.C_upper));
  CHECK(r.C_lower > 1.0);
  CHECK(std::abs(r.worst_lower_zeta) < 2.0 * std::numbers::pi * 8);
  // Independent scan: every entry satisfies the fitted bounds, and any
  // smaller C' fails somewhere.
  bool tighter_fails = false;
  for (std::size_t i = 0; i < N; ++i) {
    const double za = std::abs(table.wavenumbers[i]);
    CHECK(table.values[i] >= za / r.C_lower - 0.5 * r.C_lower - 1e-12);
    CHECK(table.values[i] <= r.C_upper * za + r.C_upper + 1e-12);
    const double c = r.C_lower * (1.0 - 1e-9);
    if (table.values[i] < za / c - 0.5 * c) tighter_fails = true;
  }
  CHECK(tighter_fails);
  const auto again = verify_symbol_bounds(table, 1.0);
  CHECK(again.C_lower == r.C_lower);
  CHECK(again.C_upper == r.C_upper);

  const auto consts = derive_constants(k);
  const auto ra = verify_symbol_bounds(table, 1.0, consts.a0, &consts);
  CHECK(ra.C_lower_analytic >= r.C_lower);

  SymbolTable empty;
  CHECK_THROWS_AS(verify_symbol_bounds(empty, 1.0), PreconditionError);
}

TEST_CASE("shifted square root", "[symbol]") {
  auto zero = tabulate_symbol(32, [](double) { return 0.0; }, SymbolSource::closed_form);
  for (double v : sqrt_shifted_symbol(zero, 4.0).values) CHECK(v == 2.0);

  PowerLawPairKernel k(1.0, 0.5, 1.0);
  const auto table = closed_form_table(k, 128);
  const double Cp = verify_symbol_bounds(table, 1.0).C_lower;
  const auto s = sqrt_shifted_symbol(table, Cp);
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    CHECK(s.values[i] * s.values[i] - Cp == Approx(table.values[i]).margin(1e-12 * (1.0 + std::abs(table.values[i]))));
    CHECK(s.values[i] >= std::sqrt(Cp / 2.0));
  }
  CHECK_THROWS_AS(sqrt_shifted_symbol(table, 0.0), PreconditionError);

  auto pure = tabulate_symbol(4096, [](double z) { return std::pow(std::abs(z), 1.5); }, SymbolSource::closed_form);
  const auto sp = sqrt_shifted_symbol(pure, 1.0);
  CHECK(sp.values[1] / std::pow(std::abs(sp.wavenumbers[1]), 0.75) == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("quadrature table agrees with closed form", "[symbol]") {
  PowerLawPairKernel k(0.8, 0.3, 2.0);
  const auto q = quadrature_table(k, 64);
  const auto c = closed_form_table(k, 64);
  CHECK(q.source == SymbolSource::quadrature);
  for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(q.values[i] - c.values[i]) < 1e-6);
}
