#include "isotrack/fields.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace isotrack {

namespace {

[[noreturn]] void throw_at(const char* what, Vec2 p) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s at (%.6g, %.6g)", what, p.x, p.y);
  throw std::domain_error(buf);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

// ---------- CircularExpField ----------

CircularExpField::CircularExpField(double intensity, double decay, Vec2 center)
    : intensity_(intensity), decay_(decay), center_(center) {
  require_positive(intensity, "intensity");
  require_positive(decay, "decay");
}

double CircularExpField::value(Vec2 p) const {
  return intensity_ * std::exp(-decay_ * (p - center_).norm());
}

Vec2 CircularExpField::gradient(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r = d.norm();
  if (r < 1e-12) throw_at("gradient undefined at the field source", p);
  return (-decay_ * value(p) / r) * d;
}

Mat2 CircularExpField::hessian(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r = d.norm();
  if (r < 1e-12) throw_at("hessian undefined at the field source", p);
  const Vec2 u = d / r;
  const double f = value(p);
  // Radial curvature decay^2*F, tangential -decay*F/r.
  const Mat2 uu = outer(u, u);
  return decay_ * decay_ * f * uu + (-decay_ * f / r) * (kIdentity2 + (-1.0) * uu);
}

// ---------- LinearRadialField ----------

LinearRadialField::LinearRadialField(double level, double slope, double radius, Vec2 center)
    : level_(level), slope_(slope), radius_(radius), center_(center) {
  require_positive(slope, "slope");
  require_positive(radius, "radius");
}

double LinearRadialField::value(Vec2 p) const {
  return level_ - slope_ * ((p - center_).norm() - radius_);
}

Vec2 LinearRadialField::gradient(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r = d.norm();
  if (r < 1e-12) throw_at("gradient undefined at the field source", p);
  return (-slope_ / r) * d;
}

Mat2 LinearRadialField::hessian(Vec2 p) const {
  const Vec2 d = p - center_;
  const double r = d.norm();
  if (r < 1e-12) throw_at("hessian undefined at the field source", p);
  const Vec2 u = d / r;
  const Mat2 uu = outer(u, u);
  // Straight radial profile: curvature is purely tangential.
  return (-slope_ / r) * (kIdentity2 + (-1.0) * uu);
}

// ---------- MultiGaussianField ----------

MultiGaussianField::MultiGaussianField(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("at least one component required");
  for (const Component& c : components_) require_positive(c.spread, "component spread");
}

double MultiGaussianField::value(Vec2 p) const {
  double sum = 0.0;
  for (const Component& c : components_) {
    sum += c.amplitude * std::exp(-(p - c.center).squared_norm() / c.spread);
  }
  return sum;
}

Vec2 MultiGaussianField::gradient(Vec2 p) const {
  Vec2 g{};
  for (const Component& c : components_) {
    const Vec2 d = p - c.center;
    const double e = c.amplitude * std::exp(-d.squared_norm() / c.spread);
    g = g + (-2.0 * e / c.spread) * d;
  }
  return g;
}

Mat2 MultiGaussianField::hessian(Vec2 p) const {
  Mat2 h{};
  for (const Component& c : components_) {
    const Vec2 d = p - c.center;
    const double e = c.amplitude * std::exp(-d.squared_norm() / c.spread);
    const double k = 2.0 / c.spread;
    h = h + e * (k * k * outer(d, d) + (-k) * kIdentity2);
  }
  return h;
}

// ---------- GridField ----------

GridField::GridField(Vec2 origin, double dx, double dy, int nx, int ny, std::vector<double> values)
    : origin_(origin), dx_(dx), dy_(dy), nx_(nx), ny_(ny), values_(std::move(values)) {
  require_positive(dx, "dx");
  require_positive(dy, "dy");
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs at least 2x2 samples");
  if (values_.size() != static_cast<std::size_t>(nx) * ny) {
    throw std::invalid_argument("grid value count does not match nx*ny");
  }
}

double GridField::interpolate(double x, double y) const {
  const double fx = (x - origin_.x) / dx_;
  const double fy = (y - origin_.y) / dy_;
  const double eps = 1e-9;  // tolerate round-off on the boundary itself
  if (fx < -eps || fx > nx_ - 1 + eps || fy < -eps || fy > ny_ - 1 + eps) {
    throw_at("position outside the grid", {x, y});
  }
  int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 2);
  int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 2);
  const double tx = std::clamp(fx - ix, 0.0, 1.0);
  const double ty = std::clamp(fy - iy, 0.0, 1.0);
  const double f00 = at(ix, iy), f10 = at(ix + 1, iy);
  const double f01 = at(ix, iy + 1), f11 = at(ix + 1, iy + 1);
  return (1 - tx) * (1 - ty) * f00 + tx * (1 - ty) * f10 + (1 - tx) * ty * f01 + tx * ty * f11;
}

double GridField::value(Vec2 p) const { return interpolate(p.x, p.y); }

Vec2 GridField::gradient(Vec2 p) const {
  const double hx = 0.5 * dx_, hy = 0.5 * dy_;
  return {(interpolate(p.x + hx, p.y) - interpolate(p.x - hx, p.y)) / (2.0 * hx),
          (interpolate(p.x, p.y + hy) - interpolate(p.x, p.y - hy)) / (2.0 * hy)};
}

Mat2 GridField::hessian(Vec2 p) const {
  const double hx = dx_, hy = dy_;
  const double f0 = interpolate(p.x, p.y);
  const double fxx = (interpolate(p.x + hx, p.y) - 2.0 * f0 + interpolate(p.x - hx, p.y)) / (hx * hx);
  const double fyy = (interpolate(p.x, p.y + hy) - 2.0 * f0 + interpolate(p.x, p.y - hy)) / (hy * hy);
  const double fxy = (interpolate(p.x + hx, p.y + hy) - interpolate(p.x + hx, p.y - hy) -
                      interpolate(p.x - hx, p.y + hy) + interpolate(p.x - hx, p.y - hy)) /
                     (4.0 * hx * hy);
  return {fxx, fxy, fxy, fyy};
}

// ---------- LogField ----------

LogField::LogField(std::shared_ptr<const Field> base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("log wrapper needs a base field");
}

double LogField::value(Vec2 p) const {
  const double f = base_->value(p);
  if (!(f > 0.0)) throw_at("log of a non-positive field value", p);
  return std::log(f);
}

Vec2 LogField::gradient(Vec2 p) const {
  const double f = base_->value(p);
  if (!(f > 0.0)) throw_at("log of a non-positive field value", p);
  return base_->gradient(p) / f;
}

Mat2 LogField::hessian(Vec2 p) const {
  const double f = base_->value(p);
  if (!(f > 0.0)) throw_at("log of a non-positive field value", p);
  const Vec2 g = base_->gradient(p);
  return (1.0 / (f * f)) * (f * base_->hessian(p) + (-1.0) * outer(g, g));
}

std::shared_ptr<const Field> log_of(std::shared_ptr<const Field> base) {
  return std::make_shared<LogField>(std::move(base));
}

// ---------- bound estimation ----------

namespace {

struct BoundAccumulator {
  double g1 = std::numeric_limits<double>::infinity();
  double g2 = 0.0;
  double g3 = 0.0;
  std::size_t n = 0;

  void add(const Field& field, Vec2 p) {
    const double gn = field.gradient(p).norm();
    if (gn < kStationaryGradient) throw_at("stationary point sampled", p);
    g1 = std::min(g1, gn);
    g2 = std::max(g2, gn);
    g3 = std::max(g3, sym_spectral_norm(field.hessian(p)));
    ++n;
  }
};

}  // namespace

FieldBounds estimate_bounds(const Field& field, Vec2 lo, Vec2 hi, double step) {
  require_positive(step, "step");
  if (!(lo.x <= hi.x && lo.y <= hi.y)) throw std::invalid_argument("empty bound region");
  BoundAccumulator acc;
  const auto axis = [step](double a, double b) {
    std::vector<double> out;
    for (double v = a; v < b - 1e-12; v += step) out.push_back(v);
    out.push_back(b);  // include the far edge exactly
    return out;
  };
  for (double y : axis(lo.y, hi.y)) {
    for (double x : axis(lo.x, hi.x)) acc.add(field, {x, y});
  }
  return {acc.g1, acc.g2, acc.g3, acc.n, step};
}

FieldBounds estimate_bounds(const Field& field, std::span<const Vec2> points) {
  if (points.empty()) throw std::invalid_argument("no points to bound over");
  BoundAccumulator acc;
  for (Vec2 p : points) acc.add(field, p);
  return {acc.g1, acc.g2, acc.g3, acc.n, 0.0};
}

// ---------- grid file loading ----------

namespace {

[[noreturn]] void file_error(const std::filesystem::path& path, int line, const std::string& msg) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::vector<double> split_numbers(const std::string& text, const std::filesystem::path& path,
                                  int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      file_error(path, line, "not a number: '" + cell + "'");
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size()) file_error(path, line, "trailing junk in cell: '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

GridField load_grid_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open grid file");
  std::string line;
  if (!std::getline(in, line)) file_error(path, 1, "missing header line");
  const std::vector<double> hdr = split_numbers(line, path, 1);
  if (hdr.size() != 6) file_error(path, 1, "header must be x0,y0,dx,dy,nx,ny");
  const double nx_d = hdr[4], ny_d = hdr[5];
  if (nx_d != std::floor(nx_d) || ny_d != std::floor(ny_d) || nx_d < 2 || ny_d < 2) {
    file_error(path, 1, "nx and ny must be integers >= 2");
  }
  const int nx = static_cast<int>(nx_d), ny = static_cast<int>(ny_d);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    if (!std::getline(in, line)) file_error(path, 2 + iy, "unexpected end of file");
    const std::vector<double> row = split_numbers(line, path, 2 + iy);
    if (row.size() != static_cast<std::size_t>(nx)) {
      file_error(path, 2 + iy,
                 "expected " + std::to_string(nx) + " values, got " + std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  try {
    return GridField({hdr[0], hdr[1]}, hdr[2], hdr[3], nx, ny, std::move(values));
  } catch (const std::invalid_argument& e) {
    file_error(path, 1, e.what());
  }
}

}  // namespace isotrack
