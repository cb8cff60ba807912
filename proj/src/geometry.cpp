#include "tdsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

constexpr double kPi = std::numbers::pi;

struct ShapeName {
  Shape shape;
  std::string_view name;
};

constexpr std::array<ShapeName, 7> kShapeNames{{
    {Shape::point, "point"},
    {Shape::circle, "circle"},
    {Shape::kite, "kite"},
    {Shape::starfish, "starfish"},
    {Shape::acorn, "acorn"},
    {Shape::rounded_square, "rounded_square"},
    {Shape::peanut, "peanut"},
}};

// r(theta) (cos, sin) with radial profile derivatives r, r', r''.
CurvePoint radial(double r, double dr, double ddr, double theta) {
  const Vec2 e(std::cos(theta), std::sin(theta));
  const Vec2 et(-std::sin(theta), std::cos(theta));
  return {r * e, dr * e + r * et, (ddr - r) * e + 2.0 * dr * et};
}

// A * sqrt(g) with g, g', g''.
CurvePoint sqrt_profile(double amp, double g, double dg, double ddg, double theta) {
  const double sg = std::sqrt(g);
  const double r = amp * sg;
  const double dr = amp * dg / (2.0 * sg);
  const double ddr = amp * (ddg / (2.0 * sg) - dg * dg / (4.0 * g * sg));
  return radial(r, dr, ddr, theta);
}

}  // namespace

Shape parse_shape(std::string_view name) {
  for (const auto& entry : kShapeNames) {
    if (entry.name == name) {
      return entry.shape;
    }
  }
  if (name == "rounded-square" || name == "square") {
    return Shape::rounded_square;
  }
  fail(ErrorKind::invalid_argument, "unknown shape '" + std::string(name) + "'");
}

std::string_view shape_name(Shape shape) noexcept {
  for (const auto& entry : kShapeNames) {
    if (entry.shape == shape) {
      return entry.name;
    }
  }
  return "unknown";
}

CurvePoint eval_shape(Shape shape, const Vec2& center, double scale, double theta) noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  CurvePoint p{};
  switch (shape) {
    case Shape::point:
      p = radial(0.001, 0.0, 0.0, theta);
      break;
    case Shape::circle:
      p = radial(1.5, 0.0, 0.0, theta);
      break;
    case Shape::kite:
      p.pos = Vec2(c + 0.65 * std::cos(2.0 * theta) - 0.65, 1.5 * s);
      p.d1 = Vec2(-s - 1.3 * std::sin(2.0 * theta), 1.5 * c);
      p.d2 = Vec2(-c - 2.6 * std::cos(2.0 * theta), -1.5 * s);
      break;
    case Shape::starfish:
      p = radial(1.0 + 0.2 * std::cos(5.0 * theta), -std::sin(5.0 * theta), -5.0 * std::cos(5.0 * theta), theta);
      break;
    case Shape::acorn:
      p = sqrt_profile(0.84, 17.0 / 4.0 + 2.0 * std::cos(3.0 * theta), -6.0 * std::sin(3.0 * theta),
                       -18.0 * std::cos(3.0 * theta), theta);
      break;
    case Shape::rounded_square: {
      const double k = std::numbers::sqrt2 / 2.0;
      const double c3 = c * c * c;
      const double s3 = s * s * s;
      p.pos = k * Vec2(c3 + s3 + c + s, -c3 + s3 - c + s);
      const double dc3 = -3.0 * c * c * s;
      const double ds3 = 3.0 * s * s * c;
      p.d1 = k * Vec2(dc3 + ds3 - s + c, -dc3 + ds3 + s + c);
      const double ddc3 = 6.0 * c * s * s - 3.0 * c3;
      const double dds3 = 6.0 * s * c * c - 3.0 * s3;
      p.d2 = k * Vec2(ddc3 + dds3 - c - s, -ddc3 + dds3 + c - s);
      break;
    }
    case Shape::peanut:
      p = sqrt_profile(5.0 / 12.0, 1.0 + 3.0 * c * c, -3.0 * std::sin(2.0 * theta), -6.0 * std::cos(2.0 * theta),
                       theta);
      break;
  }
  p.pos = center + scale * p.pos;
  p.d1 *= scale;
  p.d2 *= scale;
  return p;
}

double BoundaryCurve::diameter() const {
  double best = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      best = std::max(best, (nodes[a].pos - nodes[b].pos).norm());
    }
  }
  return best;
}

BoundaryCurve make_boundary(Shape shape, const Vec2& center, double scale, int n) {
  require(n >= 8, "boundary: node count must be >= 8");
  require(std::isfinite(scale) && scale > 0.0, "boundary: scale must be positive");
  require(shape != Shape::point || 0.002 * scale <= 0.2 + 1e-12,
          "boundary: point-like shapes need an effective diameter <= 0.2");
  BoundaryCurve curve{shape, center, scale, {}};
  curve.nodes.reserve(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    curve.nodes.push_back(eval_shape(shape, center, scale, 2.0 * kPi * m / n));
  }
  return curve;
}

SurfaceGeometry make_circle_sensors(int count, double radius, double aperture_start, double aperture_span) {
  require(count >= 1, "circle sensors: count must be >= 1");
  require(std::isfinite(radius) && radius > 0.0, "circle sensors: radius must be positive");
  require(aperture_span > 0.0 && aperture_span <= 2.0 * kPi + 1e-12, "circle sensors: span must lie in (0, 2pi]");

  const bool full = aperture_span >= 2.0 * kPi - 1e-12;
  double step = 0.0;
  if (full) {
    step = aperture_span / count;
  } else if (count > 1) {
    step = aperture_span / (count - 1);
  }

  SurfaceGeometry g;
  g.dimension = 2;
  g.layout = "circle";
  g.radius = radius;
  g.aperture_start = aperture_start;
  g.aperture_span = aperture_span;
  g.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double theta = aperture_start + i * step;
    g.points.emplace_back(radius * std::cos(theta), radius * std::sin(theta), 0.0);
  }
  g.weights.assign(static_cast<std::size_t>(count), radius * aperture_span / count);
  return g;
}

SurfaceGeometry make_fibonacci_sphere_sensors(int count, double radius) {
  require(count >= 2, "sphere sensors: count must be >= 2");
  require(std::isfinite(radius) && radius > 0.0, "sphere sensors: radius must be positive");
  SurfaceGeometry g;
  g.dimension = 3;
  g.layout = "sphere";
  g.radius = radius;
  g.points.reserve(static_cast<std::size_t>(count));
  const double golden = (3.0 - std::sqrt(5.0)) * kPi;
  for (int i = 0; i < count; ++i) {
    const double alpha = static_cast<double>(2 * i - count + 1) / count;
    const double rho = std::sqrt(1.0 - alpha * alpha);
    const double phi = golden * i;
    g.points.emplace_back(radius * rho * std::cos(phi), radius * alpha, radius * rho * std::sin(phi));
  }
  g.weights.assign(static_cast<std::size_t>(count), 4.0 * kPi * radius * radius / count);
  return g;
}

double GridAxis::at(int idx) const noexcept {
  if (idx == count - 1) {
    return hi;
  }
  return lo + idx * spacing();
}

SamplingGrid::SamplingGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  require(axes_.size() == 2 || axes_.size() == 3, "sampling grid: dimension must be 2 or 3");
  std::size_t total = 1;
  for (const auto& ax : axes_) {
    require(ax.count >= 2, "sampling grid: need at least 2 points per axis");
    require(std::isfinite(ax.lo) && std::isfinite(ax.hi) && ax.hi > ax.lo, "sampling grid: bounds must satisfy lo < hi");
    total *= static_cast<std::size_t>(ax.count);
  }
  points_.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto multi = unflatten(idx);
    Vec3 p = Vec3::Zero();
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      p[static_cast<Eigen::Index>(a)] = axes_[a].at(multi[a]);
    }
    points_.push_back(p);
  }
}

std::array<int, 3> SamplingGrid::unflatten(std::size_t idx) const noexcept {
  std::array<int, 3> multi{0, 0, 0};
  for (std::size_t a = axes_.size(); a-- > 0;) {
    const auto n = static_cast<std::size_t>(axes_[a].count);
    multi[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return multi;
}

std::size_t SamplingGrid::flatten(const std::array<int, 3>& multi) const noexcept {
  std::size_t idx = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    idx = idx * static_cast<std::size_t>(axes_[a].count) + static_cast<std::size_t>(multi[a]);
  }
  return idx;
}

std::size_t SamplingGrid::nearest(const Vec3& p) const {
  require(!points_.empty(), "sampling grid: empty");
  std::array<int, 3> multi{0, 0, 0};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& ax = axes_[a];
    const double f = (p[static_cast<Eigen::Index>(a)] - ax.lo) / ax.spacing();
    multi[a] = std::clamp(static_cast<int>(std::lround(f)), 0, ax.count - 1);
  }
  return flatten(multi);
}

SamplingGrid make_sampling_grid(std::span<const double> bounds, std::span<const int> counts) {
  require(bounds.size() == 2 * counts.size(), "sampling grid: need a lo/hi pair per axis");
  std::vector<GridAxis> axes;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    axes.push_back({bounds[2 * a], bounds[2 * a + 1], counts[a]});
  }
  return SamplingGrid(std::move(axes));
}

namespace {

double distance_to_box(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  const Vec3 below = (lo - p).cwiseMax(0.0);
  const Vec3 above = (p - hi).cwiseMax(0.0);
  return (below + above).norm();
}

// Gap between a box and a radius-R shell about the origin, given the box's
// radial extent [near, far] (in the plane for circles, plus a height offset).
double shell_gap(double near, double far, double radius, double height) {
  double radial = 0.0;
  if (far < radius) {
    radial = radius - far;
  } else if (near > radius) {
    radial = near - radius;
  }
  return std::hypot(radial, height);
}

// Distance from the grid box to the continuous measurement surface (the whole
// circle, arc or sphere), falling back to the sensor points for ad hoc layouts.
double surface_gap(const SurfaceGeometry& surface, const Vec3& lo, const Vec3& hi) {
  const Vec3 corner = lo.cwiseAbs().cwiseMax(hi.cwiseAbs());
  if (surface.layout == "sphere") {
    return shell_gap(distance_to_box(Vec3::Zero(), lo, hi), corner.norm(), surface.radius, 0.0);
  }
  if (surface.layout == "circle") {
    const double height = distance_to_box(Vec3::Zero(), Vec3(0, 0, lo.z()), Vec3(0, 0, hi.z()));
    if (surface.aperture_span >= 2.0 * kPi - 1e-12) {
      const double near = distance_to_box(Vec3::Zero(), Vec3(lo.x(), lo.y(), 0), Vec3(hi.x(), hi.y(), 0));
      return shell_gap(near, corner.head<2>().norm(), surface.radius, height);
    }
    constexpr int samples = 1 << 15;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= samples; ++s) {
      const double th = surface.aperture_start + surface.aperture_span * s / samples;
      best = std::min(best, distance_to_box(surface.radius * Vec3(std::cos(th), std::sin(th), 0.0), lo, hi));
    }
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : surface.points) {
    best = std::min(best, distance_to_box(x, lo, hi));
  }
  return best;
}

}  // namespace

SeparationReport check_separation(const SamplingGrid& grid, const SurfaceGeometry& surface,
                                  std::span<const BoundaryCurve> boundaries, std::span<const Vec3> point_centers,
                                  double point_diameter) {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  for (int a = 0; a < grid.dimension(); ++a) {
    lo[a] = grid.axes()[static_cast<std::size_t>(a)].lo;
    hi[a] = grid.axes()[static_cast<std::size_t>(a)].hi;
  }

  SeparationReport report;
  report.grid_to_surface = surface_gap(surface, lo, hi);

  for (const auto& curve : boundaries) {
    report.max_diameter = std::max(report.max_diameter, curve.diameter());
    for (const auto& node : curve.nodes) {
      if (distance_to_box(Vec3(node.pos.x(), node.pos.y(), 0.0), lo, hi) > 0.0) {
        report.contained = false;
      }
    }
  }
  for (const auto& c : point_centers) {
    report.max_diameter = std::max(report.max_diameter, point_diameter);
    if (distance_to_box(c, lo, hi) > 0.0) {
      report.contained = false;
    }
  }

  report.disjoint = report.grid_to_surface > 0.0;
  report.separated = report.grid_to_surface > report.max_diameter;

  std::ostringstream msg;
  if (!report.disjoint) {
    report.warnings.emplace_back("sampling region intersects the measurement surface");
  }
  if (!report.separated) {
    msg << "dist(grid, sensors) = " << report.grid_to_surface << " does not exceed the scatterer diameter "
        << report.max_diameter;
    report.warnings.push_back(msg.str());
  }
  if (!report.contained) {
    report.warnings.emplace_back("a scatterer extends outside the sampling region");
  }
  return report;
}

}  // namespace tdsm
