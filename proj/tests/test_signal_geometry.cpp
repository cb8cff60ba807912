#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

#include "tdsm/error.hpp"
#include "tdsm/geometry.hpp"
#include "tdsm/signal.hpp"

using namespace tdsm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Signal, VanishesAtOrigin) {
  EXPECT_EQ(eval_signal(SignalSpec{}, 0.0), 0.0);
}

TEST(Signal, PeakEnvelopeAtShift) {
  // sin(12) to 6 digits, envelope 1 at t = t0
  EXPECT_NEAR(eval_signal(SignalSpec{}, 3.0), -0.536573, 1e-6);
  EXPECT_DOUBLE_EQ(eval_signal(SignalSpec{}, 3.0), std::sin(12.0));
}

TEST(Signal, CausalTruncation) {
  EXPECT_EQ(eval_signal(SignalSpec{}, -1.0), 0.0);
  SignalSpec open;
  open.causal_truncation = false;
  EXPECT_NE(eval_signal(open, -1.0), 0.0);
}

TEST(Signal, RejectsBadParameters) {
  SignalSpec s;
  s.sigma = -1.0;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_THROW(TimeGrid(0.0, 10), Error);
  EXPECT_THROW(TimeGrid(1.0, 0), Error);
}

TEST(Signal, SampledTwoNodes) {
  const auto v = sample_signal(SignalSpec{}, TimeGrid(3.0, 1));
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], -0.536573, 1e-6);
}

TEST(Signal, SampledPeakNearShift) {
  const TimeGrid grid(25.0, 128);
  const auto v = sample_signal(SignalSpec{}, grid);
  ASSERT_EQ(v.size(), 129u);
  std::size_t best = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  }
  EXPECT_NEAR(grid.node(best), 3.0, 0.5);
}

TEST(Geometry, KiteFirstNode) {
  const auto b = make_boundary(Shape::kite, Vec2(0, 0), 1.0, 64);
  EXPECT_NEAR(b.nodes[0].pos.x(), 1.0, 1e-15);
  EXPECT_NEAR(b.nodes[0].pos.y(), 0.0, 1e-15);
}

TEST(Geometry, CircleQuarterNode) {
  const auto b = make_boundary(Shape::circle, Vec2(1, 1), 1.0, 64);
  EXPECT_NEAR(b.nodes[16].pos.x(), 1.0, 1e-14);
  EXPECT_NEAR(b.nodes[16].pos.y(), 2.5, 1e-14);
}

TEST(Geometry, PointShapeIsTiny) {
  const auto b = make_boundary(Shape::point, Vec2(0, 0), 1.0, 32);
  for (const auto& n : b.nodes) {
    EXPECT_LE(n.pos.norm(), 0.001 + 1e-15);
  }
}

TEST(Geometry, UnknownShape) {
  EXPECT_THROW((void)parse_shape("hexagon"), Error);
  EXPECT_EQ(parse_shape("rounded_square"), Shape::rounded_square);
}

// Re-substitution into the closed-form parameterizations.
TEST(Geometry, NodesSatisfyParameterization) {
  const Vec2 c(0.3, -0.7);
  const int n = 40;
  auto check = [&](Shape shape, double scale, auto formula) {
    const auto b = make_boundary(shape, c, scale, n);
    ASSERT_EQ(b.size(), static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      const double th = 2.0 * kPi * m / n;
      const Vec2 expect = c + scale * formula(th);
      EXPECT_NEAR((b.nodes[m].pos - expect).norm(), 0.0, 1e-14) << shape_name(shape) << " node " << m;
    }
  };
  const auto dir = [](double th) { return Vec2(std::cos(th), std::sin(th)); };
  check(Shape::circle, 1.0, [&](double th) -> Vec2 { return 1.5 * dir(th); });
  check(Shape::kite, 0.5, [](double th) -> Vec2 {
    return {std::cos(th) + 0.65 * std::cos(2 * th) - 0.65, 1.5 * std::sin(th)};
  });
  check(Shape::starfish, 2.0 / 3.0, [&](double th) -> Vec2 { return (1 + 0.2 * std::cos(5 * th)) * dir(th); });
  check(Shape::acorn, 1.0, [&](double th) -> Vec2 { return 0.84 * std::sqrt(17.0 / 4 + 2 * std::cos(3 * th)) * dir(th); });
  check(Shape::peanut, 1.0, [&](double th) -> Vec2 {
    const double s = std::sin(th), co = std::cos(th);
    return 5.0 / 12.0 * std::sqrt(4 * co * co + s * s) * dir(th);
  });
  check(Shape::rounded_square, 1.0, [](double th) -> Vec2 {
    const double co = std::cos(th), s = std::sin(th);
    const double c3 = co * co * co, s3 = s * s * s;
    return std::sqrt(2.0) / 2 * Vec2(c3 + s3 + co + s, -c3 + s3 - co + s);
  });
  check(Shape::point, 100.0, [&](double th) -> Vec2 { return 0.001 * dir(th); });
}

// The stored derivatives agree with centred differences of the positions.
TEST(Geometry, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (Shape s : {Shape::kite, Shape::starfish, Shape::acorn, Shape::rounded_square, Shape::peanut}) {
    for (double th : {0.1, 1.3, 2.9, 5.0}) {
      const auto p = eval_shape(s, Vec2(0, 0), 1.0, th);
      const auto a = eval_shape(s, Vec2(0, 0), 1.0, th + h);
      const auto b = eval_shape(s, Vec2(0, 0), 1.0, th - h);
      EXPECT_NEAR(((a.pos - b.pos) / (2 * h) - p.d1).norm(), 0.0, 1e-8) << shape_name(s);
      EXPECT_NEAR(((a.d1 - b.d1) / (2 * h) - p.d2).norm(), 0.0, 1e-7) << shape_name(s);
    }
  }
}

TEST(Sensors, FullCircle) {
  const auto g = make_circle_sensors(20, 4.0, 0.0, 2 * kPi);
  EXPECT_NEAR(g.points[5].x(), 0.0, 1e-14);
  EXPECT_NEAR(g.points[5].y(), 4.0, 1e-14);
  EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 2 * kPi * 4.0, 1e-10 * 8 * kPi);
}

TEST(Sensors, HalfAperture) {
  const auto g = make_circle_sensors(10, 4.0, 0.0, kPi);
  EXPECT_NEAR(g.points[0].x(), 4.0, 1e-14);
  EXPECT_NEAR(g.points[0].y(), 0.0, 1e-14);
  EXPECT_NEAR(g.points[1].x(), 4.0 * std::cos(kPi / 9), 1e-14);
  EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 4.0 * kPi, 1e-10 * 4 * kPi);
}

TEST(Sensors, ThreeQuarterAperture) {
  const auto g = make_circle_sensors(15, 4.0, 0.0, 1.5 * kPi);
  EXPECT_NEAR(g.points[14].x(), 0.0, 1e-13);
  EXPECT_NEAR(g.points[14].y(), -4.0, 1e-13);
}

TEST(Sensors, FibonacciFirstPoint) {
  const auto g = make_fibonacci_sphere_sensors(50, 4.0);
  EXPECT_NEAR(g.points[0].x(), 4.0 * std::sqrt(1 - 0.9604), 1e-12);
  EXPECT_NEAR(g.points[0].x(), 0.79599, 1e-5);
  EXPECT_NEAR(g.points[0].y(), -3.92, 1e-12);
  EXPECT_NEAR(g.points[0].z(), 0.0, 1e-12);
}

TEST(Sensors, FibonacciOnSphere) {
  const auto g = make_fibonacci_sphere_sensors(50, 4.0);
  for (const auto& p : g.points) EXPECT_NEAR(p.norm(), 4.0, 1e-12);
  const double area = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
  EXPECT_NEAR(area, 4 * kPi * 16, 1e-10 * 4 * kPi * 16);
}

TEST(Sensors, FibonacciTwoPoints) {
  const auto g = make_fibonacci_sphere_sensors(2, 1.0);
  EXPECT_DOUBLE_EQ(g.points[0].y(), -0.5);
  EXPECT_DOUBLE_EQ(g.points[1].y(), 0.5);
}

TEST(Grid, PlanarDefault) {
  const std::vector<double> b{-2.6, 2.6, -2.6, 2.6};
  const std::vector<int> n{21, 21};
  const auto g = make_sampling_grid(b, n);
  EXPECT_EQ(g.size(), 441u);
  EXPECT_NEAR(g.axes()[0].spacing(), 0.26, 1e-15);
  double lo = 1e9, hi = -1e9;
  for (const auto& p : g.points()) {
    lo = std::min(lo, p.x());
    hi = std::max(hi, p.y());
  }
  EXPECT_EQ(lo, -2.6);
  EXPECT_EQ(hi, 2.6);
}

TEST(Grid, CubeDefault) {
  const std::vector<double> b{-2, 2, -2, 2, -2, 2};
  const std::vector<int> n{21, 21, 21};
  const auto g = make_sampling_grid(b, n);
  EXPECT_EQ(g.size(), 9261u);
  EXPECT_NEAR(g.axes()[2].spacing(), 0.2, 1e-15);
  const std::size_t idx = g.flatten({3, 7, 11});
  EXPECT_EQ(g.unflatten(idx), (std::array<int, 3>{3, 7, 11}));
  EXPECT_EQ(g.nearest(Vec3(0.41, -0.79, 0.19)), g.flatten({12, 6, 11}));
}

TEST(Grid, TwoPointAxis) {
  const SamplingGrid g({GridAxis{0, 1, 2}, GridAxis{0, 1, 2}});
  EXPECT_EQ(g.point(0).x(), 0.0);
  EXPECT_EQ(g.point(3).x(), 1.0);
  EXPECT_EQ(g.point(3).y(), 1.0);
}

TEST(Separation, DefaultsPass) {
  const std::vector<double> b{-2.6, 2.6, -2.6, 2.6};
  const std::vector<int> n{21, 21};
  const auto g = make_sampling_grid(b, n);
  const auto s = make_circle_sensors(20, 4.0, 0, 2 * kPi);
  const std::vector<Vec3> centers{Vec3::Zero()};
  const auto rep = check_separation(g, s, {}, centers, 0.002);
  EXPECT_TRUE(rep.ok());
  EXPECT_NEAR(rep.grid_to_surface, 4 - 2.6 * std::sqrt(2.0), 1e-12);
}

TEST(Separation, OverlapReported) {
  const std::vector<double> b{-5, 5, -5, 5};
  const std::vector<int> n{11, 11};
  const auto rep = check_separation(make_sampling_grid(b, n), make_circle_sensors(20, 4.0, 0, 2 * kPi), {});
  EXPECT_FALSE(rep.disjoint);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Separation, EmptyBoundaryListContained) {
  const std::vector<double> b{-2.6, 2.6, -2.6, 2.6};
  const std::vector<int> n{5, 5};
  const auto rep = check_separation(make_sampling_grid(b, n), make_circle_sensors(20, 4.0, 0, 2 * kPi), {});
  EXPECT_TRUE(rep.contained);
}
