#include <gtest/gtest.h>

#include "populace/geometry.hpp"
#include "support/fixtures.hpp"

using namespace populace;
using populace::testing::Rng;

namespace {

ConvexPolygon square(double x0, double y0, double side) {
  return ConvexPolygon({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

}  // namespace

TEST(Geometry, WrapAngleStaysInHalfOpenRange) {
  for (double a : {-10.0, -kPi, 0.0, kPi, 3 * kPi, 7.5}) {
    const double w = wrap_angle(a);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
  }
}

TEST(Geometry, LocalFrameRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 f = heading_vector(rng.uniform(-kPi, kPi));
    const Vec2 v{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Vec2 back = from_local(to_local(v, f), f);
    EXPECT_NEAR(back.x, v.x, 1e-12);
    EXPECT_NEAR(back.y, v.y, 1e-12);
  }
}

TEST(Geometry, ClockwiseInputIsNormalizedToCounterClockwise) {
  const ConvexPolygon p({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(signed_area(p.vertices()), 0.0);
  EXPECT_DOUBLE_EQ(p.area(), 1.0);
}

TEST(Geometry, OverlappingUnitSquaresClipToQuarter) {
  const auto clipped = clip_convex(square(0, 0, 1), square(0.5, 0.5, 1));
  ASSERT_TRUE(clipped.has_value());
  EXPECT_NEAR(clipped->area(), 0.25, 1e-12);
}

TEST(Geometry, TouchingSquaresHaveNoPositiveAreaOverlap) {
  EXPECT_FALSE(clip_convex(square(0, 0, 1), square(1, 0, 1)).has_value());
  EXPECT_DOUBLE_EQ(convex_distance(square(0, 0, 1), square(1, 0, 1)), 0.0);
}

TEST(Geometry, ConvexDistanceMatchesSampledBoundaryDistance) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ConvexPolygon a = ConvexPolygon::rectangle({rng.uniform(-3, 3), rng.uniform(-3, 3)},
                                                     heading_vector(rng.uniform(-kPi, kPi)), -0.5, 0.7, -0.3, 0.4);
    const ConvexPolygon b = ConvexPolygon::rectangle({rng.uniform(-3, 3), rng.uniform(-3, 3)},
                                                     heading_vector(rng.uniform(-kPi, kPi)), -0.2, 0.2, -0.6, 0.6);
    const double d = convex_distance(a, b);
    if (convex_intersect(a, b)) {
      EXPECT_DOUBLE_EQ(d, 0.0);
      continue;
    }
    // Brute force over densely sampled boundary points.
    auto samples = [](const ConvexPolygon& p) {
      std::vector<Vec2> out;
      const auto& v = p.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a0 = v[i], a1 = v[(i + 1) % v.size()];
        for (int k = 0; k <= 2000; ++k) out.push_back(a0 + (a1 - a0) * (k / 2000.0));
      }
      return out;
    };
    double best = 1e300;
    const auto sa = samples(a);
    for (const Vec2 q : samples(b)) {
      for (std::size_t i = 0; i < sa.size(); i += 7) best = std::min(best, distance(q, sa[i]));
    }
    EXPECT_LE(d, best + 1e-9);
    EXPECT_NEAR(d, best, 5e-3);
  }
}

TEST(Geometry, HullOfRandomPointsContainsThemAll) {
  Rng rng(5);
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform(-1, 3)});
  const ConvexPolygon hull(convex_hull(pts));
  for (const Vec2 p : pts) EXPECT_TRUE(hull.contains(p, 1e-9));
}

TEST(Geometry, SimplePolygonContainsAndBoundaryDistance) {
  // L-shaped room.
  const SimplePolygon room({{0, 0}, {4, 0}, {4, 2}, {2, 2}, {2, 4}, {0, 4}});
  EXPECT_DOUBLE_EQ(room.area(), 12.0);
  EXPECT_TRUE(room.contains({1, 3}));
  EXPECT_FALSE(room.contains({3, 3}));
  EXPECT_NEAR(room.boundary_distance({1, 1}), 1.0, 1e-12);
}
