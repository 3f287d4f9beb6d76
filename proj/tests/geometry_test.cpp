#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lilis/error.hpp"
#include "lilis/geometry.hpp"
#include "oracles.hpp"

using namespace lilis;

namespace {

const Polygon kUnitSquare{"sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

}  // namespace

TEST(Geometry, RectContainsPointIsClosed) {
  const Rect r{0, 0, 1, 1};
  EXPECT_TRUE(rect_contains_point(r, {0.5, 0.5}));
  EXPECT_TRUE(rect_contains_point(r, {1, 1}));
  EXPECT_FALSE(rect_contains_point(r, {1.0001, 0.5}));
}

TEST(Geometry, RectIntersects) {
  EXPECT_TRUE(rect_intersects({0, 0, 1, 1}, {1, 1, 2, 2}));
  EXPECT_FALSE(rect_intersects({0, 0, 1, 1}, {2, 2, 3, 3}));
  EXPECT_TRUE(rect_intersects({0, 0, 4, 4}, {1, 1, 2, 2}));
}

TEST(Geometry, RectEnvelops) {
  EXPECT_TRUE(rect_envelops({0, 0, 4, 4}, {1, 1, 2, 2}));
  EXPECT_FALSE(rect_envelops({0, 0, 4, 4}, {3, 3, 5, 5}));
  EXPECT_TRUE(rect_envelops({0, 0, 1, 1}, {0, 0, 1, 1}));
}

TEST(Geometry, Distance) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(distance({1, 1}, {1, 1}), 0.0);
  EXPECT_NEAR(distance({0, 0}, {1, 1}), 1.41421, 1e-5);
}

TEST(Geometry, PointInPolygonCountsBoundary) {
  EXPECT_TRUE(point_in_polygon(kUnitSquare, {0.5, 0.5}));
  EXPECT_FALSE(point_in_polygon(kUnitSquare, {2, 2}));
  EXPECT_TRUE(point_in_polygon(kUnitSquare, {1, 0.5}));
  EXPECT_TRUE(point_in_polygon(kUnitSquare, {0, 0}));
  EXPECT_TRUE(point_in_polygon(kUnitSquare, {1, 1}));
  EXPECT_FALSE(point_in_polygon(kUnitSquare, {1, 1.5}));
}

TEST(Geometry, PointInConcavePolygon) {
  // U shape: the notch between the arms is outside.
  const Polygon u{"u", {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}}};
  EXPECT_TRUE(point_in_polygon(u, {0.5, 2.0}));
  EXPECT_TRUE(point_in_polygon(u, {2.5, 2.0}));
  EXPECT_FALSE(point_in_polygon(u, {1.5, 2.0}));
  EXPECT_TRUE(point_in_polygon(u, {1.5, 1.0}));  // on the notch floor
  // Ray through the vertex at (2,3)/(1,3) level must not double count.
  EXPECT_FALSE(point_in_polygon(u, {-1.0, 3.0}));
}

TEST(Geometry, PolygonMbr) {
  EXPECT_EQ(polygon_mbr({"t", {{0, 0}, {2, 0}, {1, 3}}}), (Rect{0, 0, 2, 3}));
  EXPECT_EQ(polygon_mbr(kUnitSquare), (Rect{0, 0, 1, 1}));
  EXPECT_EQ(polygon_mbr({"d", {{0, 0}, {2, 0}, {1, 0}}}), (Rect{0, 0, 2, 0}));
}

TEST(Geometry, ConstructorsValidate) {
  EXPECT_THROW(make_rect(1, 0, 0, 1), InvalidArgument);
  EXPECT_THROW(make_rect(0, NAN, 1, 1), InvalidArgument);
  EXPECT_NO_THROW(make_rect(1, 1, 1, 1));
  EXPECT_THROW(make_polygon("p", {{0, 0}, {1, 1}}), InvalidArgument);
  EXPECT_THROW(make_polygon("p", {{0, 0}, {1, 1}, {NAN, 0}}), InvalidArgument);
  EXPECT_THROW(make_circle({0, 0}, -1.0), InvalidArgument);
  EXPECT_NO_THROW(make_circle({0, 0}, 0.0));
}

TEST(GeometryProperty, ContainmentImpliesDegenerateIntersection) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10000; ++i) {
    const Rect r = oracle::random_rect(rng, {-1, -1, 1, 1}, 1.0);
    const Point p{u(rng), u(rng)};
    if (rect_contains_point(r, p)) {
      EXPECT_TRUE(rect_intersects(r, Rect::around(p)));
    }
    const Rect s = oracle::random_rect(rng, {-1, -1, 1, 1}, 1.0);
    if (rect_envelops(r, s)) {
      EXPECT_TRUE(rect_intersects(r, s));
    }
  }
}

TEST(GeometryProperty, TriangleInequality) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double ac = distance(a, c);
    EXPECT_LE(ac, (distance(a, b) + distance(b, c)) * (1 + 1e-9));
    EXPECT_EQ(distance(a, b), distance(b, a));
  }
}

TEST(GeometryProperty, RayCastingMatchesWindingOnConvexPolygons) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto polygons = gen_polygons(20, {-0.5, -0.5, 0.5, 0.5}, 0.6, 99);
  int mismatches = 0;
  for (const auto& pg : polygons) {
    for (int i = 0; i < 500; ++i) {
      const Point p{u(rng), u(rng)};
      if (point_in_polygon(pg, p) != oracle::winding_inside(pg, p)) ++mismatches;
    }
  }
  EXPECT_EQ(mismatches, 0);
}
