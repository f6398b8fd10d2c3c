#pragma once

// Concentration-feedback steering laws built on the sliding-surface error
//   e = d(eps)/dt + c3 * tanh(eps / c4),  eps = s - s_d,
// with a PI structure omega = c1 * e + c2 * integral(e). The controllers
// only consume the scalar measurement s (plus its oracle or estimated rate).

#include "isotrack/geometry.hpp"

namespace isotrack {

struct Gains {
  double c1 = 0.0;  // proportional gain on the sliding error
  double c2 = 0.0;  // integral gain (0 = proportional-only controller)
  double c3 = 0.0;  // sliding-surface attraction gain
  double c4 = 1.0;  // tanh saturation width
  double c5 = 0.0;  // speed-regulation gain (double integrator only)
  friend bool operator==(const Gains&, const Gains&) = default;
};

// Exact sign with sgn(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Boundary-layer sign: tanh(x/delta) for delta > 0, exact sign for delta = 0.
inline double sgn_smoothed(double x, double delta) {
  return delta > 0.0 ? std::tanh(x / delta) : sgn(x);
}

// Sliding-surface error from the tracking error and its rate.
inline double sliding_error(double eps, double epsdot, double c3, double c4) {
  return epsdot + c3 * std::tanh(eps / c4);
}

// Discrete-time accumulators shared by all vehicles. Integrals use the
// trapezoidal rule and start at zero: the first sample only primes the
// history, so sigma(t0) = zeta(t0) = 0.
struct ControllerState {
  double sigma = 0.0;  // integral of the sliding error e
  double zeta = 0.0;   // integral of tanh(eps/c4) (single-integrator vehicle)
  bool have_prev_s = false;
  double prev_s = 0.0;
  bool have_prev_e = false;
  double prev_e = 0.0;
  bool have_prev_w = false;
  double prev_w = 0.0;
};

// Backward-difference estimate of ds/dt from successive measurements;
// returns 0 on the first call (no history yet).
inline double estimate_sdot(ControllerState& cs, double s, double dt) {
  double sdot = 0.0;
  if (cs.have_prev_s) sdot = (s - cs.prev_s) / dt;
  cs.prev_s = s;
  cs.have_prev_s = true;
  return sdot;
}

// Trapezoidal update of sigma with the new sliding error; returns the
// updated integral.
inline double accumulate_sigma(ControllerState& cs, double e, double dt) {
  if (cs.have_prev_e) cs.sigma += 0.5 * dt * (e + cs.prev_e);
  cs.prev_e = e;
  cs.have_prev_e = true;
  return cs.sigma;
}

// Trapezoidal update of zeta with the new tanh(eps/c4) sample.
inline double accumulate_zeta(ControllerState& cs, double w, double dt) {
  if (cs.have_prev_w) cs.zeta += 0.5 * dt * (w + cs.prev_w);
  cs.prev_w = w;
  cs.have_prev_w = true;
  return cs.zeta;
}

// Angular-rate command omega = c1*e + c2*sigma.
inline double pi_angular_rate(const Gains& g, double e, double sigma) {
  return g.c1 * e + g.c2 * sigma;
}

// Heading output of the single-integrator vehicle: theta1 = c1*s + c1*c3*zeta.
// (The time derivative of this heading reproduces the proportional-only
// angular rate, which is what makes the two vehicles trace identical paths.)
inline double single_integrator_heading(const Gains& g, double s, double zeta) {
  return g.c1 * s + g.c1 * g.c3 * zeta;
}

inline Vec2 heading_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Acceleration command for the double-integrator vehicle:
//   a = omega * rot90(v2) + c5 * sgn(v * h(theta2) - v2)  (componentwise sign)
// where theta2 = atan2(v2_y, v2_x) and rot90 rotates +90 degrees, so the
// first term steers and the second regulates the speed toward v.
inline Vec2 double_integrator_accel(const Gains& g, Vec2 v2, double omega, double v,
                                    double sgn_delta) {
  const double theta2 = std::atan2(v2.y, v2.x);
  const Vec2 desired = v * heading_vector(theta2);
  const Vec2 steer{-omega * v2.y, omega * v2.x};
  return {steer.x + g.c5 * sgn_smoothed(desired.x - v2.x, sgn_delta),
          steer.y + g.c5 * sgn_smoothed(desired.y - v2.y, sgn_delta)};
}

}  // namespace isotrack
