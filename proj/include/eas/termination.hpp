#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

namespace eas {

enum class Termination { completed, vacuum, gradient_cap, dt_collapse, non_finite };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::vacuum: return "vacuum";
    case Termination::gradient_cap: return "gradient_cap";
    case Termination::dt_collapse: return "dt_collapse";
    case Termination::non_finite: return "non_finite";
  }
  return "unknown";
}

/// Times closer than this (relative to max(1, |t|)) are the same event.
inline bool at_time(double t, double target) {
  return std::abs(t - target) <= 1e-12 * std::max(1.0, std::abs(target));
}

/// Output times k * period, clipped to T, with T itself always an event.
/// A zero period yields no events at all.
class EventClock {
 public:
  EventClock(double period, double T) : period_(period), T_(T) {}

  double next() const {
    if (period_ <= 0.0 || done_) return std::numeric_limits<double>::infinity();
    return std::min(static_cast<double>(k_ + 1) * period_, T_);
  }

  /// True once per event reached at t; advances past it.
  bool due(double t) {
    const double n = next();
    if (!std::isfinite(n) || !(t >= n || at_time(t, n))) return false;
    if (at_time(n, T_)) done_ = true;
    ++k_;
    return true;
  }

 private:
  double period_;
  double T_;
  long k_ = 0;
  bool done_ = false;
};

}  // namespace eas
