#pragma once

// Thin adaptive drivers over Boost.Math quadrature rules. All drivers are
// deterministic: the same integrand and tolerances give bit-identical
// results.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <vector>

#include "eas/errors.hpp"

namespace eas::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

inline Result& operator+=(Result& lhs, const Result& rhs) {
  lhs.value += rhs.value;
  lhs.error += rhs.error;
  return lhs;
}

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 4000;
};

/// Globally adaptive 31-point Gauss-Kronrod on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate drops
/// below max(abs_tol, rel_tol * |I|). Throws NumericError with the achieved
/// estimate when the panel budget is exhausted.
template <class F>
Result integrate(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == b) return {};
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    // Without recursion Boost reports |K - G| on the reference interval
    // [-1, 1]; rescale it to [lo, hi].
    return Panel{lo, hi, v, err * 0.5 * (hi - lo)};
  };
  std::priority_queue<Panel> panels;
  Panel first = eval(a, b);
  double total = first.value;
  double total_err = first.error;
  panels.push(first);
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (total_err <= target) break;
    if (panels.size() >= opt.max_intervals) {
      std::ostringstream msg;
      msg << "adaptive quadrature on [" << a << ", " << b
          << "] did not converge: error estimate " << total_err << " > " << target;
      throw NumericError(msg.str(), total_err);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel width at round-off; accept its contribution as is.
      panels.push({worst.a, worst.b, worst.value, 0.0});
      total_err -= worst.error;
      continue;
    }
    Panel l = eval(worst.a, mid);
    Panel r = eval(mid, worst.b);
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    panels.push(l);
    panels.push(r);
  }
  // Re-sum from the panels to shed accumulated cancellation in `total`.
  Result out;
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : all) {
    out.value += p.value;
    out.error += p.error;
  }
  if (!std::isfinite(out.value)) throw NumericError("quadrature produced a non-finite value");
  return out;
}

/// Integral over [a, +inf) by the exp-sinh rule.
template <class F>
Result integrate_to_infinity(F&& f, double a, double rel_tol = 1e-12) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate([&](double t) { return f(t); }, a,
                                        std::numeric_limits<double>::infinity(), rel_tol, &err, &l1);
  if (!std::isfinite(v)) throw NumericError("exp-sinh quadrature produced a non-finite value", err);
  return {v, err};
}

/// Integral of f(t) cos(w t) over [0, inf) (Ooura-Mori double exponential).
template <class F>
Result fourier_cos(F&& f, double w, double rel_tol = 1e-12) {
  // Node tables are costly to build; keep one integrator per tolerance and thread.
  thread_local std::map<double, boost::math::quadrature::ooura_fourier_cos<double>> cache;
  auto it = cache.try_emplace(rel_tol, rel_tol).first;
  auto [v, err] = it->second.integrate([&](double t) { return f(t); }, w);
  if (!std::isfinite(v)) throw NumericError("Ooura cosine quadrature produced a non-finite value", err);
  return {v, std::abs(err * v)};
}

/// Integral of f(t) sin(w t) over [0, inf).
template <class F>
Result fourier_sin(F&& f, double w, double rel_tol = 1e-12) {
  thread_local std::map<double, boost::math::quadrature::ooura_fourier_sin<double>> cache;
  auto it = cache.try_emplace(rel_tol, rel_tol).first;
  auto [v, err] = it->second.integrate([&](double t) { return f(t); }, w);
  if (!std::isfinite(v)) throw NumericError("Ooura sine quadrature produced a non-finite value", err);
  return {v, std::abs(err * v)};
}

}  // namespace eas::quad
