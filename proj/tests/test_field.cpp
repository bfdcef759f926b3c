#include <catch_amalgamated.hpp>

#include <random>

#include "eas/field.hpp"

using namespace eas;
using Catch::Approx;
using std::numbers::pi;

namespace {

Field random_bandlimited(Grid g, int modes, std::uint64_t seed, bool mean_free) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> a(modes + 1), b(modes + 1);
  for (int k = 0; k <= modes; ++k) {
    a[k] = n(gen);
    b[k] = n(gen);
  }
  return Field::sample(g, [&](double x) {
    double s = mean_free ? 0.0 : a[0];
    for (int k = 1; k <= modes; ++k) s += a[k] * std::cos(2 * pi * k * x) + b[k] * std::sin(2 * pi * k * x);
    return s;
  });
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("grid", "[field]") {
  Grid g(64);
  CHECK(g.dx() == 1.0 / 64);
  CHECK(g.node(0) == -0.5);
  CHECK(g.node(63) == Approx(0.5 - 1.0 / 64));
  CHECK_THROWS_AS(Grid(8), PreconditionError);
  CHECK_THROWS_AS(Grid(48), PreconditionError);
}

TEST_CASE("transforms", "[field]") {
  Grid g(128);
  const auto f = random_bandlimited(g, 60, 1, false);
  const auto back = inverse(forward(f));
  CHECK(max_diff(f, back) < 1e-12 * f.sup_abs());
  CHECK(l2_norm(f) == Approx(l2_norm(forward(f))).epsilon(1e-12));

  // Coefficients are taken relative to the first node x_0 = -1/2.
  const auto c = Field::sample(g, [](double x) { return std::cos(2 * pi * x); });
  const auto s = forward(c);
  CHECK(std::abs(s.coeffs[1] - cplx(-0.5, 0.0)) < 1e-14);
}

TEST_CASE("spectral derivative", "[field]") {
  Grid g(64);
  const auto c = Field::sample(g, [](double x) { return std::cos(2 * pi * x); });
  const auto d = spectral_derivative(c);
  const auto expect = Field::sample(g, [](double x) { return -2 * pi * std::sin(2 * pi * x); });
  CHECK(max_diff(d, expect) < 1e-12);
  CHECK(spectral_derivative(Field(g, 3.0)).sup_abs() == 0.0);
  const auto r = random_bandlimited(g, 20, 2, false);
  CHECK(std::abs(spectral_derivative(r).mean()) < 1e-13);
}

TEST_CASE("multipliers", "[field]") {
  Grid g(64);
  const double alpha = 1.3;
  auto A = tabulate_symbol(64, [&](double z) { return std::pow(std::abs(z), alpha); }, SymbolSource::closed_form);
  for (int m : {1, 5, 21}) {
    const auto c = Field::sample(g, [&](double x) { return std::cos(2 * pi * m * x); });
    const auto out = apply_multiplier(c, A);
    const double lam = std::pow(2 * pi * m, alpha);
    CHECK(max_diff(out, lam * c) < 1e-12 * lam);
  }
  auto zero = tabulate_symbol(64, [](double) { return 0.0; }, SymbolSource::closed_form);
  const auto f = random_bandlimited(g, 20, 3, false);
  CHECK(apply_multiplier(f, zero).sup_abs() == 0.0);
  CHECK(apply_multiplier(Field(g, 2.0), A).sup_abs() < 1e-14);

  const auto h = random_bandlimited(g, 20, 4, false);
  const auto lhs = apply_multiplier(2.0 * f + (-3.0) * h, A);
  const auto rhs = 2.0 * apply_multiplier(f, A) + (-3.0) * apply_multiplier(h, A);
  CHECK(max_diff(lhs, rhs) < 1e-12 * lhs.sup_abs());

  auto wrong = tabulate_symbol(32, [](double) { return 1.0; }, SymbolSource::closed_form);
  CHECK_THROWS_AS(apply_multiplier(f, wrong), PreconditionError);
}

TEST_CASE("mean-free primitive", "[field]") {
  Grid g(128);
  const auto c = Field::sample(g, [](double x) { return std::cos(2 * pi * x); });
  const auto p = mean_free_primitive(c);
  const auto expect = Field::sample(g, [](double x) { return std::sin(2 * pi * x) / (2 * pi); });
  CHECK(max_diff(p, expect) < 1e-14);
  CHECK(mean_free_primitive(Field(g)).sup_abs() == 0.0);
  const auto th = random_bandlimited(g, 50, 5, true);
  const auto back = spectral_derivative(mean_free_primitive(th));
  CHECK(max_diff(back, th) < 1e-12);
  CHECK(std::abs(mean_free_primitive(th).mean()) < 1e-15);
  CHECK_THROWS_AS(mean_free_primitive(Field(g, 1.0)), PreconditionError);
}

TEST_CASE("dealiasing and refinement", "[field]") {
  Grid g(64);
  const auto f = Field::sample(g, [](double x) { return std::cos(2 * pi * 3 * x) + std::sin(2 * pi * 30 * x); });
  const auto d = dealias(f);
  const auto expect = Field::sample(g, [](double x) { return std::cos(2 * pi * 3 * x); });
  CHECK(max_diff(d, expect) < 1e-13);

  const auto r = random_bandlimited(g, 20, 6, false);
  const auto fine = refine(r, 256);
  for (std::size_t j = 0; j < 64; ++j) CHECK(fine[4 * j] == Approx(r[j]).margin(1e-12));
}

TEST_CASE("interpolant extrema", "[field]") {
  Grid g(32);
  const double shift = 0.37 / 32;
  const auto f = Field::sample(g, [&](double x) { return 1.0 + 0.5 * std::cos(2 * pi * (x - shift)); });
  CHECK(f.max() < 1.5);
  CHECK(refined_max(f) == Approx(1.5).epsilon(1e-12));
  CHECK(refined_min(f) == Approx(0.5).epsilon(1e-12));
  CHECK(refined_sup_abs(f) == Approx(1.5).epsilon(1e-12));
  TrigInterpolant p(f);
  CHECK(p(0.123) == Approx(1.0 + 0.5 * std::cos(2 * pi * (0.123 - shift))).epsilon(1e-13));
}
