#pragma once

// 1+1 dimensional special relativity with c = 1: enough to decide which of
// two measurement events comes first in a boosted frame.

#include <cmath>

#include "hvlab/core.hpp"

namespace hvlab {

struct Event {
  double t = 0.0;
  double x = 0.0;

  Event() = default;
  Event(double t_, double x_) : t(t_), x(x_) {
    if (!std::isfinite(t) || !std::isfinite(x)) throw Error("event coordinates must be finite");
  }
};

class Boost {
 public:
  explicit Boost(double v) : v_(v) {
    if (!(std::abs(v) < 1.0)) throw Error("superluminal boost");
  }
  double velocity() const { return v_; }
  double gamma() const { return 1.0 / std::sqrt(1.0 - v_ * v_); }

 private:
  double v_;
};

/// Strict: lightlike pairs are not spacelike.
inline bool is_spacelike(const Event& a, const Event& b) {
  return std::abs(b.x - a.x) > std::abs(b.t - a.t);
}

inline Event boost_event(const Event& e, const Boost& boost) {
  const double v = boost.velocity();
  const double g = boost.gamma();
  return Event(g * (e.t - v * e.x), g * (e.x - v * e.t));
}

/// Squared interval dt^2 - dx^2; positive for timelike separation.
inline double interval(const Event& a, const Event& b) {
  const double dt = b.t - a.t;
  const double dx = b.x - a.x;
  return dt * dt - dx * dx;
}

/// Ordering of Alice's event `ea` and Bob's event `eb` in the boosted frame.
inline TimeOrdering time_order(const Event& ea, const Event& eb, const Boost& boost) {
  const double ta = boost_event(ea, boost).t;
  const double tb = boost_event(eb, boost).t;
  if (ta < tb) return TimeOrdering::AB;
  if (ta > tb) return TimeOrdering::BA;
  throw Error("simultaneous in this frame; ordering undefined");
}

/// Velocity at which a spacelike pair becomes simultaneous (dt/dx).
inline double simultaneity_velocity(const Event& ea, const Event& eb) {
  if (!is_spacelike(ea, eb)) throw Error("events are not spacelike separated");
  return (eb.t - ea.t) / (eb.x - ea.x);
}

}  // namespace hvlab
