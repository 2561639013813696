#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "populace/geometry.hpp"
#include "populace/nav_grid.hpp"
#include "populace/scene.hpp"

namespace populace {

enum class AreaKind : std::uint8_t {
  InteractWith,
  SitOn,
  AdjacentTo,
  CloseTo,
  InFrontOf,
  Behind,
  LeftOf,
  RightOf,
  Between,
  AlignedWith,
  Intersection,
  Union,
  Explicit,
};

const char* to_string(AreaKind kind);
std::optional<AreaKind> area_kind_from_string(std::string_view text);

/// Semantic 2D region: a union of convex polygons. An empty union is a valid (empty) area.
struct Area {
  std::vector<ConvexPolygon> polygons;
  std::optional<std::string> anchor_id;
  AreaKind kind = AreaKind::Explicit;
  /// Seat cells are samplable only in areas derived from sit_on.
  bool allows_seating = false;

  bool empty() const { return polygons.empty(); }
  bool contains(Vec2 p, double eps = 1e-9) const;
  Aabb2 bounds() const;
  /// Sum of piece areas; overlapping pieces count twice.
  double piece_area() const;
};

/// Sizes of the semantic areas, in meters.
struct AreaParams {
  double adjacent_ring = 0.6;
  double close_ring = 1.2;
  double directional_depth = 1.5;
  double aligned_half_width = 0.4;
  double interact_cone = kPi / 4.0;  // half-angle of the front cone
  /// Clip extent for unbounded areas when the floor is unknown.
  double unbounded_extent = 50.0;
  SceneGraphParams graph{};
};

/// One constructor per area tool. Throws UnknownObject, or NotSittable for sit_on.
Area make_area(AreaKind kind, const std::string& anchor, const SceneGraph& graph,
               const AreaParams& params = {});
/// Two-anchor constructors (Between, AlignedWith).
Area make_area(AreaKind kind, const std::string& anchor, const std::string& anchor2,
               const SceneGraph& graph, const AreaParams& params = {});

Area area_interact_with(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_sit_on(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_adjacent_to(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_close_to(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_in_front_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_behind(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_left_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_right_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params = {});
Area area_between(const std::string& a, const std::string& b, const SceneGraph& graph,
                  const AreaParams& params = {});
Area area_aligned_with(const std::string& a, const std::string& b, const SceneGraph& graph,
                       const AreaParams& params = {});

/// Piecewise convex clipping; membership equals the conjunction of memberships.
Area intersect_areas(const Area& a, const Area& b);
Area union_areas(const Area& a, const Area& b);

/// Picks a permitted, unoccupied grid cell whose center lies in `area`, uniformly by a seeded
/// hash, and returns that center. Throws NoFreeSpace.
Vec2 sample_position(const Area& area, const GridMap& nav, const std::set<Cell>& occupancy,
                     std::uint64_t seed);

/// Unit direction toward `face_target`, else `final_heading`, else nullopt.
/// Throws DegenerateDirection when `p` coincides with the target.
std::optional<Vec2> resolve_orientation(Vec2 p, std::optional<Vec2> face_target,
                                        std::optional<Vec2> final_heading);

struct PlacementTarget {
  Vec2 position{};
  std::optional<Vec2> orientation;
  std::optional<std::string> overlaps_object;
};

/// JSON polygon listing for UI rendering.
std::string area_to_structured_text(const Area& area);

}  // namespace populace
