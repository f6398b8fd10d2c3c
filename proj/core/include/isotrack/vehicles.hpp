#pragma once

// Vehicle models and polar diagnostics relative to a field.
//
//  - Dubins: constant speed v, steerable angular rate omega.
//  - Single integrator: velocity command of magnitude v along a computed
//    heading (heading is an output, not a state).
//  - Double integrator: acceleration command; speed is regulated toward v.

#include <cmath>

#include "isotrack/fields.hpp"
#include "isotrack/geometry.hpp"

namespace isotrack {

struct DubinsState {
  Vec2 p;
  double theta = 0.0;
};

struct SingleIntegratorState {
  Vec2 p;
};

struct DoubleIntegratorState {
  Vec2 p;
  Vec2 v;
};

struct DubinsDerivative {
  Vec2 pdot;
  double thetadot;
};

inline DubinsDerivative dubins_derivative(const DubinsState& s, double v, double omega) {
  return {{v * std::cos(s.theta), v * std::sin(s.theta)}, omega};
}

// Polar diagnostics of a pose relative to the field:
//   r      distance to the field source (NaN for non-radial fields),
//   phi    heading error: heading minus the outward direction, wrapped to
//          (-pi, pi]. The outward direction is taken along -grad F (fields
//          here decay outward). NaN when the gradient is stationary or the
//          pose sits within 1e-6 of a radial source.
struct PolarDiagnostics {
  double r;
  double phi;
};

PolarDiagnostics polar_diagnostics(const Field& field, Vec2 p, double heading);

}  // namespace isotrack
