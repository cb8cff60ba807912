#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tdsm {

/// Points are stored in 3D throughout; planar configurations use z = 0.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

enum class Shape { point, circle, kite, starfish, acorn, rounded_square, peanut };

[[nodiscard]] Shape parse_shape(std::string_view name);
[[nodiscard]] std::string_view shape_name(Shape shape) noexcept;

/// Position and first two parameter derivatives of a boundary curve at one angle.
struct CurvePoint {
  Vec2 pos;
  Vec2 d1;
  Vec2 d2;
};

/// Evaluates the counter-clockwise parameterization s(theta) of a shape.
[[nodiscard]] CurvePoint eval_shape(Shape shape, const Vec2& center, double scale, double theta) noexcept;

/// A closed planar scatterer boundary sampled at theta_m = 2 pi m / n.
struct BoundaryCurve {
  Shape shape = Shape::circle;
  Vec2 center = Vec2::Zero();
  double scale = 1.0;
  std::vector<CurvePoint> nodes;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
  [[nodiscard]] double diameter() const;
};

[[nodiscard]] BoundaryCurve make_boundary(Shape shape, const Vec2& center, double scale, int n);

/// Incident / measurement point set with per-point quadrature weights.
struct SurfaceGeometry {
  int dimension = 2;
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::string layout;          ///< "circle" or "sphere"
  double radius = 0.0;
  double aperture_start = 0.0;  ///< circle layouts only
  double aperture_span = 0.0;   ///< circle layouts only

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Points on a circle in the z = 0 plane. A full 2 pi span spaces points by
/// span / N; a partial span includes both arc end points, spacing span / (N - 1).
[[nodiscard]] SurfaceGeometry make_circle_sensors(int count, double radius, double aperture_start,
                                                  double aperture_span);

/// Golden-angle (Fibonacci) points on a sphere centred at the origin.
[[nodiscard]] SurfaceGeometry make_fibonacci_sphere_sensors(int count, double radius);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 2;

  [[nodiscard]] double spacing() const noexcept { return (hi - lo) / (count - 1); }
  [[nodiscard]] double at(int idx) const noexcept;

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

/// Tensor-product probe grid, flattened row-major (last axis fastest).
class SamplingGrid {
 public:
  SamplingGrid() = default;
  explicit SamplingGrid(std::vector<GridAxis> axes);

  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(axes_.size()); }
  [[nodiscard]] const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const std::vector<Vec3>& points() const noexcept { return points_; }
  [[nodiscard]] const Vec3& point(std::size_t idx) const { return points_.at(idx); }
  [[nodiscard]] std::array<int, 3> unflatten(std::size_t idx) const noexcept;
  [[nodiscard]] std::size_t flatten(const std::array<int, 3>& multi) const noexcept;
  /// Index of the probe closest to p.
  [[nodiscard]] std::size_t nearest(const Vec3& p) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<Vec3> points_;
};

/// bounds: lo/hi pairs per axis; counts: points per axis.
[[nodiscard]] SamplingGrid make_sampling_grid(std::span<const double> bounds, std::span<const int> counts);

struct SeparationReport {
  double grid_to_surface = 0.0;  ///< dist(Omega, Gamma_m), Omega the grid bounding box
  double max_diameter = 0.0;     ///< largest scatterer diameter
  bool separated = false;        ///< dist(Omega, Gamma_m) > max diam(D)
  bool contained = true;         ///< every boundary node lies in Omega
  bool disjoint = false;         ///< Omega does not meet Gamma_m
  std::vector<std::string> warnings;

  [[nodiscard]] bool ok() const noexcept { return separated && contained && disjoint; }
};

/// Point scatterers (3D point model) enter as centers sharing one diameter.
[[nodiscard]] SeparationReport check_separation(const SamplingGrid& grid, const SurfaceGeometry& surface,
                                                std::span<const BoundaryCurve> boundaries,
                                                std::span<const Vec3> point_centers = {},
                                                double point_diameter = 0.0);

}  // namespace tdsm
