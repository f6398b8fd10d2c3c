#pragma once

// Small planar vector/matrix helpers shared across the toolkit.

#include <cmath>
#include <numbers>

namespace isotrack {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double k) { return {k * a.x, k * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double k) { return {a.x / k, a.y / k}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

// Row-major 2x2 matrix; Hessians stored here are symmetric by construction.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend constexpr Mat2 operator*(double k, const Mat2& a) {
    return {k * a.a11, k * a.a12, k * a.a21, k * a.a22};
  }
  friend constexpr bool operator==(const Mat2& a, const Mat2& b) = default;

  constexpr Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
};

constexpr Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

inline constexpr Mat2 kIdentity2{1.0, 0.0, 0.0, 1.0};

// Largest absolute eigenvalue of a symmetric 2x2 matrix (its spectral norm).
inline double sym_spectral_norm(const Mat2& m) {
  const double mean = 0.5 * (m.a11 + m.a22);
  const double disc = std::hypot(0.5 * (m.a11 - m.a22), m.a12);
  return std::max(std::abs(mean + disc), std::abs(mean - disc));
}

// Wrap an angle into (-pi, pi]; idempotent, and -pi maps to +pi.
inline double wrap_angle(double a) {
  double x = std::fmod(a + kPi, 2.0 * kPi);
  if (x <= 0.0) x += 2.0 * kPi;
  return x - kPi;
}

}  // namespace isotrack
