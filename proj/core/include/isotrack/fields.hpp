#pragma once

// Scalar concentration fields: analytic models, a sampled-grid model with
// bilinear interpolation, a logarithmic wrapper, and region bound estimation.

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isotrack/geometry.hpp"

namespace isotrack {

// A planar scalar field with first and second derivatives.
class Field {
 public:
  virtual ~Field() = default;

  virtual double value(Vec2 p) const = 0;
  virtual Vec2 gradient(Vec2 p) const = 0;
  virtual Mat2 hessian(Vec2 p) const = 0;

  // Center of symmetry for radially symmetric fields; nullopt otherwise.
  virtual std::optional<Vec2> source() const { return std::nullopt; }
};

// F(p) = intensity * exp(-decay * |p - center|).
// |grad F| = decay * F everywhere away from the center; the gradient is
// undefined at the center itself.
class CircularExpField final : public Field {
 public:
  CircularExpField(double intensity, double decay, Vec2 center);

  double value(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  Mat2 hessian(Vec2 p) const override;
  std::optional<Vec2> source() const override { return center_; }

  double intensity() const { return intensity_; }
  double decay() const { return decay_; }

 private:
  double intensity_;
  double decay_;
  Vec2 center_;
};

// F(p) = level - slope * (|p - center| - radius): the radial profile is an
// exact line, so |grad F| = slope everywhere away from the center.
class LinearRadialField final : public Field {
 public:
  LinearRadialField(double level, double slope, double radius, Vec2 center);

  double value(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  Mat2 hessian(Vec2 p) const override;
  std::optional<Vec2> source() const override { return center_; }

  double level() const { return level_; }
  double slope() const { return slope_; }
  double radius() const { return radius_; }

 private:
  double level_;
  double slope_;
  double radius_;
  Vec2 center_;
};

// Sum of isotropic Gaussian bumps: F(p) = sum_i A_i * exp(-|p - c_i|^2 / spread_i).
class MultiGaussianField final : public Field {
 public:
  struct Component {
    double amplitude = 0.0;
    Vec2 center;
    double spread = 1.0;  // denominator of the squared distance in the exponent
    friend bool operator==(const Component&, const Component&) = default;
  };

  explicit MultiGaussianField(std::vector<Component> components);

  double value(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  Mat2 hessian(Vec2 p) const override;

  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
};

// Regular-grid samples with bilinear interpolation inside the covered
// rectangle. Derivatives are finite differences of the interpolant:
//  - gradient: central differences at half the grid spacing (exact for data
//    sampled from affine or bilinear functions);
//  - hessian: central second differences at the full grid spacing, where the
//    bilinear interpolation error of a quadratic cancels, so quadratic data
//    reproduces its curvature exactly (half-spacing stencils would measure
//    the interpolation kink instead).
// Evaluation outside the rectangle (shrunk by the stencil arm for the
// derivative calls) throws std::domain_error.
class GridField final : public Field {
 public:
  GridField(Vec2 origin, double dx, double dy, int nx, int ny, std::vector<double> values);

  double value(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  Mat2 hessian(Vec2 p) const override;

  Vec2 origin() const { return origin_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double at(int ix, int iy) const { return values_[static_cast<std::size_t>(iy) * nx_ + ix]; }

 private:
  double interpolate(double x, double y) const;

  Vec2 origin_;
  double dx_, dy_;
  int nx_, ny_;
  std::vector<double> values_;
};

// Pointwise natural logarithm of a positive base field:
//   value    = ln F
//   gradient = grad F / F
//   hessian  = (F * hess F - grad F grad F^T) / F^2
// Throws std::domain_error where the base field is not strictly positive.
class LogField final : public Field {
 public:
  explicit LogField(std::shared_ptr<const Field> base);

  double value(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  Mat2 hessian(Vec2 p) const override;
  std::optional<Vec2> source() const override { return base_->source(); }

  const Field& base() const { return *base_; }

 private:
  std::shared_ptr<const Field> base_;
};

std::shared_ptr<const Field> log_of(std::shared_ptr<const Field> base);

// Gradient/curvature envelope over a region:
//   gamma1 <= |grad F| <= gamma2 and |hess F| (spectral) <= gamma3
// at every sampled point.
struct FieldBounds {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  std::size_t samples = 0;
  double sample_step = 0.0;  // grid pitch used (0 when sampled from a point list)
};

// Samples the axis-aligned rectangle [lo, hi] on a grid of pitch `step`
// (both edges included). Throws std::domain_error if a sampled point is
// stationary (|grad F| < 1e-9), naming the point: bounds taken across a
// stationary point are vacuous.
FieldBounds estimate_bounds(const Field& field, Vec2 lo, Vec2 hi, double step);

// Same envelope over an explicit list of points (e.g. a logged trajectory).
FieldBounds estimate_bounds(const Field& field, std::span<const Vec2> points);

// Reads a grid field from a text file:
//   line 1: x0,y0,dx,dy,nx,ny
//   then ny lines of nx comma-separated values (row iy at y = y0 + iy*dy).
// Malformed input throws std::runtime_error with "path:line: message".
GridField load_grid_field(const std::filesystem::path& path);

// Gradient magnitude below which a point is treated as stationary.
inline constexpr double kStationaryGradient = 1e-9;

}  // namespace isotrack
