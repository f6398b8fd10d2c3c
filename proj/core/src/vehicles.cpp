#include "isotrack/vehicles.hpp"

#include <limits>

namespace isotrack {

PolarDiagnostics polar_diagnostics(const Field& field, Vec2 p, double heading) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  double r = nan;
  if (const auto src = field.source()) {
    r = (p - *src).norm();
    if (r < 1e-6) return {r, nan};  // gradient direction is not meaningful here
  }
  const Vec2 g = field.gradient(p);
  if (g.norm() < kStationaryGradient) return {r, nan};
  const double outward = std::atan2(-g.y, -g.x);
  return {r, wrap_angle(heading - outward)};
}

}  // namespace isotrack
