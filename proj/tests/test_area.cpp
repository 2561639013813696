#include <gtest/gtest.h>

#include "populace/area.hpp"
#include "populace/errors.hpp"
#include "support/fixtures.hpp"

using namespace populace;
using namespace populace::testing;

namespace {

SceneGraph room() {
  auto table = make_box("table_1", "table", {3, 3, 0.375}, {0.6, 0.4, 0.375});
  table.orientation = Vec2{1, 0};
  auto chair = make_box("chair_1", "chair", {1.5, 3, 0.45}, {0.25, 0.25, 0.45});
  chair.attributes.sittable = true;
  chair.orientation = Vec2{1, 0};
  auto tv = make_box("tv_1", "tv", {5.8, 1.0, 0.8}, {0.1, 0.5, 0.3});
  tv.orientation = Vec2{-1, 0};
  return build_scene_graph(SceneGraph("room", rect_floor(6, 6), {table, chair, tv}));
}

ConvexPolygon unit_square(double x0, double y0) {
  return ConvexPolygon({{x0, y0}, {x0 + 1, y0}, {x0 + 1, y0 + 1}, {x0, y0 + 1}});
}

Area explicit_area(std::vector<ConvexPolygon> polys) {
  Area a;
  a.polygons = std::move(polys);
  return a;
}

/// Monte-Carlo area estimate by membership only.
double monte_carlo_area(const Area& a, Aabb2 box, int n, std::uint64_t seed) {
  Rng rng(seed);
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += a.contains({rng.uniform(box.min.x, box.max.x), rng.uniform(box.min.y, box.max.y)});
  return (box.max.x - box.min.x) * (box.max.y - box.min.y) * hits / n;
}

}  // namespace

TEST(Area, SitOnContainsFootprintCenter) {
  const auto g = room();
  const Area a = area_sit_on("chair_1", g);
  EXPECT_TRUE(a.allows_seating);
  EXPECT_TRUE(a.contains(g.at("chair_1").box.center.xy()));
}

TEST(Area, SitOnRejectsNonSittableAndUnknown) {
  const auto g = room();
  EXPECT_THROW(area_sit_on("table_1", g), NotSittable);
  EXPECT_THROW(area_close_to("piano_1", g), UnknownObject);
  EXPECT_THROW(area_between("table_1", "piano_1", g), UnknownObject);
}

TEST(Area, BetweenContainsMidpointOfCenters) {
  const auto g = room();
  const Area a = area_between("chair_1", "tv_1", g);
  const Vec2 mid = (g.at("chair_1").box.center.xy() + g.at("tv_1").box.center.xy()) * 0.5;
  EXPECT_TRUE(a.contains(mid));
}

TEST(Area, InFrontOfLiesBeyondFrontFace) {
  const auto g = room();
  const Area a = area_in_front_of("table_1", g);
  const auto& t = g.at("table_1").box;
  const double front_x = t.center.x + t.half_extents.x;  // yaw 0, facing +x
  Rng rng(4);
  int inside = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{rng.uniform(0, 6), rng.uniform(0, 6)};
    if (!a.contains(p, 0.0)) continue;
    ++inside;
    EXPECT_GE(p.x, front_x - 1e-12);
  }
  EXPECT_GT(inside, 100);
}

TEST(Area, DirectionalAreasPartitionAroundAnchor) {
  const auto g = room();
  const Vec2 c = g.at("table_1").box.center.xy();
  EXPECT_TRUE(area_behind("table_1", g).contains(c + Vec2{-1.0, 0}));
  EXPECT_TRUE(area_left_of("table_1", g).contains(c + Vec2{0, 1.0}));
  EXPECT_TRUE(area_right_of("table_1", g).contains(c + Vec2{0, -1.0}));
  EXPECT_FALSE(area_left_of("table_1", g).contains(c + Vec2{0, -1.0}));
}

TEST(Area, InteractWithIsInsideAdjacentAndFacesFront) {
  const auto g = room();
  const Area inter = area_interact_with("tv_1", g);
  const Area adj = area_adjacent_to("tv_1", g);
  ASSERT_FALSE(inter.empty());
  Rng rng(8);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{rng.uniform(4, 6), rng.uniform(0, 2)};
    if (inter.contains(p, 0.0)) {
      EXPECT_TRUE(adj.contains(p, 1e-9));
      EXPECT_LT(p.x, g.at("tv_1").box.center.x);  // the tv faces -x
    }
  }
}

TEST(Area, AlignedWithExcludesAnchorsAndRunsThroughBoth) {
  const auto g = room();
  const Area a = area_aligned_with("chair_1", "table_1", g);
  EXPECT_FALSE(a.contains(g.at("chair_1").box.center.xy(), 0.0));
  EXPECT_FALSE(a.contains(g.at("table_1").box.center.xy(), 0.0));
  EXPECT_TRUE(a.contains({2.2, 3.0}));  // gap between them on the shared line
  EXPECT_TRUE(a.contains({4.5, 3.0}));  // beyond the table
}

TEST(AreaAlgebra, SelfIntersectionKeepsCoverage) {
  const Area a = area_close_to("table_1", room());
  const Area aa = intersect_areas(a, a);
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 p{rng.uniform(0, 6), rng.uniform(0, 6)};
    EXPECT_EQ(a.contains(p, 0.0), aa.contains(p, 1e-9)) << p.x << "," << p.y;
  }
}

TEST(AreaAlgebra, DisjointIntersectionIsEmpty) {
  EXPECT_TRUE(intersect_areas(explicit_area({unit_square(0, 0)}), explicit_area({unit_square(3, 3)})).empty());
}

TEST(AreaAlgebra, OverlappingSquaresCoverQuarter) {
  const Area i = intersect_areas(explicit_area({unit_square(0, 0)}), explicit_area({unit_square(0.5, 0.5)}));
  EXPECT_NEAR(i.piece_area(), 0.25, 1e-6);
  const double mc = monte_carlo_area(i, {{0, 0}, {2, 2}}, 200000, 7);
  EXPECT_NEAR(mc, 0.25, 0.01);
}

TEST(AreaAlgebra, MembershipIsConjunctionAndDisjunction) {
  Rng rng(31);
  const auto g = room();
  const Area a = area_close_to("table_1", g);
  const Area b = area_in_front_of("chair_1", g);
  const Area i = intersect_areas(a, b);
  const Area u = union_areas(a, b);
  for (int k = 0; k < 20000; ++k) {
    const Vec2 p{rng.uniform(0, 6), rng.uniform(0, 6)};
    const bool in_a = a.contains(p, 0.0), in_b = b.contains(p, 0.0);
    if (in_a && in_b) {
      EXPECT_TRUE(i.contains(p, 1e-9));
    } else {
      EXPECT_FALSE(i.contains(p, -1e-9));
    }
    EXPECT_EQ(u.contains(p, 0.0), in_a || in_b);
  }
}

TEST(Sampling, FullyBlockedAreaRaisesNoFreeSpace) {
  GridMap map({0, 0}, 0.5, 8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 4; ++x) map.set_blocked({x, y});
  }
  EXPECT_THROW(sample_position(explicit_area({ConvexPolygon::rectangle({0, 0}, {1, 0}, 0, 2, 0, 4)}), map, {}, 1),
               NoFreeSpace);
  EXPECT_THROW(sample_position(Area{}, map, {}, 1), NoFreeSpace);
}

TEST(Sampling, OccupiedCellsAreSkipped) {
  GridMap map({0, 0}, 1.0, 2, 1);
  const Area a = explicit_area({ConvexPolygon::rectangle({0, 0}, {1, 0}, 0, 2, 0, 1)});
  const Vec2 p = sample_position(a, map, {Cell{0, 0}}, 99);
  EXPECT_EQ(p, (Vec2{1.5, 0.5}));
  EXPECT_THROW(sample_position(a, map, {Cell{0, 0}, Cell{1, 0}}, 99), NoFreeSpace);
}

TEST(Sampling, HalfFreeAreaSamplesAreMembersAndNavigable) {
  GridMap map({0, 0}, 0.25, 40, 40);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 20; ++x) map.set_blocked({x, y});
  }
  const Area a = explicit_area({ConvexPolygon::rectangle({0, 0}, {1, 0}, 2.5, 7.5, 2.5, 7.5)});
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Vec2 p = sample_position(a, map, {}, s);
    ASSERT_TRUE(a.contains(p, 0.0));
    const auto c = map.cell_at(p);
    ASSERT_TRUE(c.has_value());
    ASSERT_TRUE(map.traversable(*c));
  }
}

TEST(Sampling, SeatCellsOnlyFromSitOnAreas) {
  GridMap map({0, 0}, 1.0, 3, 1);
  map.set_endpoint({0, 0}, "chair_1");
  map.set_endpoint({1, 0}, "chair_1");
  Area a = explicit_area({ConvexPolygon::rectangle({0, 0}, {1, 0}, 0, 3, 0, 1)});
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(sample_position(a, map, {}, s), (Vec2{2.5, 0.5}));
  a.allows_seating = true;
  std::set<double> xs;
  for (std::uint64_t s = 0; s < 50; ++s) xs.insert(sample_position(a, map, {}, s).x);
  EXPECT_EQ(xs.size(), 3u);
}

TEST(Sampling, DeterministicUnderFixedSeed) {
  const auto g = room();
  const GridMap map = build_grid_map(g);
  const Area a = area_close_to("table_1", g);
  EXPECT_EQ(sample_position(a, map, {}, 1234), sample_position(a, map, {}, 1234));
}

TEST(Orientation, ResolveFacingTarget) {
  const auto d = resolve_orientation({0, 0}, Vec2{0, 2}, std::nullopt);
  ASSERT_TRUE(d);
  EXPECT_NEAR(d->x, 0.0, 1e-15);
  EXPECT_NEAR(d->y, 1.0, 1e-15);
}

TEST(Orientation, ResolveFallsBackToFinalHeading) {
  const auto d = resolve_orientation({0, 0}, std::nullopt, Vec2{1, 0});
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, (Vec2{1, 0}));
  EXPECT_FALSE(resolve_orientation({0, 0}, std::nullopt, std::nullopt));
}

TEST(Orientation, ResolveDegenerate) {
  EXPECT_THROW(resolve_orientation({1, 1}, Vec2{1, 1}, std::nullopt), DegenerateDirection);
}

TEST(AreaExport, ListsPolygons) {
  const auto text = area_to_structured_text(area_sit_on("chair_1", room()));
  EXPECT_NE(text.find("\"kind\":\"sit_on\""), std::string::npos);
  EXPECT_NE(text.find("\"anchor\":\"chair_1\""), std::string::npos);
}
