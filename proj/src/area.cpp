#include "populace/area.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "populace/errors.hpp"
#include "populace/nav_grid.hpp"

namespace populace {

namespace {

constexpr const char* kAreaNames[] = {
    "interact_with", "sit_on", "adjacent_to", "close_to",     "in_front_of", "behind",   "left_of",
    "right_of",      "between", "aligned_with", "intersection", "union",      "explicit",
};

/// Anchor footprint expressed in its facing frame.
struct AnchorFrame {
  Vec2 origin;
  Vec2 forward;
  double f_min, f_max, l_min, l_max;

  ConvexPolygon rect(double f0, double f1, double l0, double l1) const {
    return ConvexPolygon::rectangle(origin, forward, f0, f1, l0, l1);
  }
};

AnchorFrame frame_of(const SceneObject& obj, const SceneGraph& graph, const AreaParams& params) {
  AnchorFrame frame{obj.box.center.xy(), estimate_orientation(obj, graph, params.graph), 1e300, -1e300,
                    1e300, -1e300};
  for (const auto& v : obj.box.footprint().vertices()) {
    const Vec2 local = to_local(v - frame.origin, frame.forward);
    frame.f_min = std::min(frame.f_min, local.x);
    frame.f_max = std::max(frame.f_max, local.x);
    frame.l_min = std::min(frame.l_min, local.y);
    frame.l_max = std::max(frame.l_max, local.y);
  }
  return frame;
}

/// Band of width `w` around the anchor's frame-aligned footprint, in four convex pieces.
std::vector<ConvexPolygon> ring(const AnchorFrame& a, double w) {
  return {
      a.rect(a.f_max, a.f_max + w, a.l_min - w, a.l_max + w),
      a.rect(a.f_min - w, a.f_min, a.l_min - w, a.l_max + w),
      a.rect(a.f_min, a.f_max, a.l_max, a.l_max + w),
      a.rect(a.f_min, a.f_max, a.l_min - w, a.l_min),
  };
}

Area single_anchor(AreaKind kind, const SceneObject& obj, std::vector<ConvexPolygon> pieces) {
  Area area;
  area.kind = kind;
  area.anchor_id = obj.id;
  for (auto& p : pieces) {
    if (!p.degenerate()) area.polygons.push_back(std::move(p));
  }
  return area;
}

}  // namespace

const char* to_string(AreaKind kind) { return kAreaNames[static_cast<int>(kind)]; }

std::optional<AreaKind> area_kind_from_string(std::string_view text) {
  for (int k = 0; k <= static_cast<int>(AreaKind::Explicit); ++k) {
    if (text == kAreaNames[k]) return static_cast<AreaKind>(k);
  }
  return std::nullopt;
}

bool Area::contains(Vec2 p, double eps) const {
  return std::any_of(polygons.begin(), polygons.end(),
                     [&](const ConvexPolygon& poly) { return poly.contains(p, eps); });
}

Aabb2 Area::bounds() const {
  Aabb2 box = Aabb2::none();
  for (const auto& poly : polygons) {
    for (const auto& v : poly.vertices()) box.expand(v);
  }
  return box;
}

double Area::piece_area() const {
  double total = 0.0;
  for (const auto& poly : polygons) total += poly.area();
  return total;
}

Area area_interact_with(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  const AnchorFrame frame = frame_of(obj, graph, params);
  const double reach = 100.0;
  const ConvexPolygon cone({frame.origin,
                            frame.origin + rotate(frame.forward, -params.interact_cone) * reach,
                            frame.origin + rotate(frame.forward, params.interact_cone) * reach});
  std::vector<ConvexPolygon> pieces;
  for (const auto& piece : ring(frame, params.adjacent_ring)) {
    if (auto clipped = clip_convex(piece, cone)) pieces.push_back(std::move(*clipped));
  }
  return single_anchor(AreaKind::InteractWith, obj, std::move(pieces));
}

Area area_sit_on(const std::string& anchor, const SceneGraph& graph, const AreaParams&) {
  const auto& obj = graph.at(anchor);
  if (!obj.attributes.sittable) throw NotSittable(anchor);
  Area area = single_anchor(AreaKind::SitOn, obj, {obj.box.footprint()});
  area.allows_seating = true;
  return area;
}

Area area_adjacent_to(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  return single_anchor(AreaKind::AdjacentTo, obj, ring(frame_of(obj, graph, params), params.adjacent_ring));
}

Area area_close_to(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  return single_anchor(AreaKind::CloseTo, obj, ring(frame_of(obj, graph, params), params.close_ring));
}

Area area_in_front_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  const auto a = frame_of(obj, graph, params);
  return single_anchor(AreaKind::InFrontOf, obj,
                       {a.rect(a.f_max, a.f_max + params.directional_depth, a.l_min, a.l_max)});
}

Area area_behind(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  const auto a = frame_of(obj, graph, params);
  return single_anchor(AreaKind::Behind, obj,
                       {a.rect(a.f_min - params.directional_depth, a.f_min, a.l_min, a.l_max)});
}

Area area_left_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  const auto a = frame_of(obj, graph, params);
  return single_anchor(AreaKind::LeftOf, obj,
                       {a.rect(a.f_min, a.f_max, a.l_max, a.l_max + params.directional_depth)});
}

Area area_right_of(const std::string& anchor, const SceneGraph& graph, const AreaParams& params) {
  const auto& obj = graph.at(anchor);
  const auto a = frame_of(obj, graph, params);
  return single_anchor(AreaKind::RightOf, obj,
                       {a.rect(a.f_min, a.f_max, a.l_min - params.directional_depth, a.l_min)});
}

Area area_between(const std::string& a, const std::string& b, const SceneGraph& graph,
                  const AreaParams&) {
  const auto& oa = graph.at(a);
  const auto& ob = graph.at(b);
  std::vector<Vec2> corners = oa.box.footprint().vertices();
  const ConvexPolygon fb = ob.box.footprint();
  const auto& more = fb.vertices();
  corners.insert(corners.end(), more.begin(), more.end());
  Area area;
  area.kind = AreaKind::Between;
  area.anchor_id = oa.id;
  ConvexPolygon hull(convex_hull(std::move(corners)));
  if (!hull.degenerate()) area.polygons.push_back(std::move(hull));
  return area;
}

Area area_aligned_with(const std::string& a, const std::string& b, const SceneGraph& graph,
                       const AreaParams& params) {
  const auto& oa = graph.at(a);
  const auto& ob = graph.at(b);
  Area area;
  area.kind = AreaKind::AlignedWith;
  area.anchor_id = oa.id;
  const Vec2 origin = oa.box.center.xy();
  const auto dir = normalized(ob.box.center.xy() - origin);
  if (!dir) return area;

  auto project = [&](const ConvexPolygon& poly) {
    std::pair<double, double> range{1e300, -1e300};
    for (const auto& v : poly.vertices()) {
      const double t = dot(v - origin, *dir);
      range.first = std::min(range.first, t);
      range.second = std::max(range.second, t);
    }
    return range;
  };

  double t_lo = -params.unbounded_extent, t_hi = params.unbounded_extent;
  if (graph.floor().vertices().size() >= 3) {
    t_lo = 1e300;
    t_hi = -1e300;
    for (const auto& v : graph.floor().vertices()) {
      const double t = dot(v - origin, *dir);
      t_lo = std::min(t_lo, t);
      t_hi = std::max(t_hi, t);
    }
  }
  std::vector<std::pair<double, double>> excluded = {project(oa.box.footprint()),
                                                     project(ob.box.footprint())};
  std::sort(excluded.begin(), excluded.end());
  double cursor = t_lo;
  const double hw = params.aligned_half_width;
  for (const auto& [lo, hi] : excluded) {
    if (lo > cursor) {
      area.polygons.push_back(ConvexPolygon::rectangle(origin, *dir, cursor, std::min(lo, t_hi), -hw, hw));
    }
    cursor = std::max(cursor, hi);
  }
  if (cursor < t_hi) area.polygons.push_back(ConvexPolygon::rectangle(origin, *dir, cursor, t_hi, -hw, hw));
  std::erase_if(area.polygons, [](const ConvexPolygon& p) { return p.degenerate(); });
  return area;
}

Area make_area(AreaKind kind, const std::string& anchor, const SceneGraph& graph,
               const AreaParams& params) {
  switch (kind) {
    case AreaKind::InteractWith: return area_interact_with(anchor, graph, params);
    case AreaKind::SitOn: return area_sit_on(anchor, graph, params);
    case AreaKind::AdjacentTo: return area_adjacent_to(anchor, graph, params);
    case AreaKind::CloseTo: return area_close_to(anchor, graph, params);
    case AreaKind::InFrontOf: return area_in_front_of(anchor, graph, params);
    case AreaKind::Behind: return area_behind(anchor, graph, params);
    case AreaKind::LeftOf: return area_left_of(anchor, graph, params);
    case AreaKind::RightOf: return area_right_of(anchor, graph, params);
    default: throw ValidationError(std::string(to_string(kind)) + " is not a single-anchor area");
  }
}

Area make_area(AreaKind kind, const std::string& anchor, const std::string& anchor2,
               const SceneGraph& graph, const AreaParams& params) {
  switch (kind) {
    case AreaKind::Between: return area_between(anchor, anchor2, graph, params);
    case AreaKind::AlignedWith: return area_aligned_with(anchor, anchor2, graph, params);
    default: throw ValidationError(std::string(to_string(kind)) + " is not a two-anchor area");
  }
}

Area intersect_areas(const Area& a, const Area& b) {
  Area out;
  out.kind = AreaKind::Intersection;
  for (const auto& pa : a.polygons) {
    for (const auto& pb : b.polygons) {
      if (!convex_intersect(pa, pb)) continue;
      if (auto clipped = clip_convex(pa, pb)) out.polygons.push_back(std::move(*clipped));
    }
  }
  out.allows_seating = a.allows_seating || b.allows_seating;
  if (a.allows_seating) out.anchor_id = a.anchor_id;
  else if (b.allows_seating) out.anchor_id = b.anchor_id;
  return out;
}

Area union_areas(const Area& a, const Area& b) {
  Area out;
  out.kind = AreaKind::Union;
  out.polygons = a.polygons;
  out.polygons.insert(out.polygons.end(), b.polygons.begin(), b.polygons.end());
  out.allows_seating = a.allows_seating || b.allows_seating;
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}


}  // namespace

Vec2 sample_position(const Area& area, const GridMap& nav, const std::set<Cell>& occupancy,
                     std::uint64_t seed) {
  std::vector<Cell> candidates;
  if (!area.empty()) {
    const Aabb2 box = area.bounds();
    const double cs = nav.cell_size();
    const int x0 = std::max(0, static_cast<int>(std::floor((box.min.x - nav.origin().x) / cs)));
    const int y0 = std::max(0, static_cast<int>(std::floor((box.min.y - nav.origin().y) / cs)));
    const int x1 = std::min(nav.width() - 1, static_cast<int>(std::floor((box.max.x - nav.origin().x) / cs)));
    const int y1 = std::min(nav.height() - 1, static_cast<int>(std::floor((box.max.y - nav.origin().y) / cs)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Cell c{x, y};
        if (!nav.standable(c) || occupancy.contains(c)) continue;
        if (!area.contains(nav.center(c), 0.0)) continue;
        if (nav.endpoint_only(c) && !area.allows_seating) continue;
        candidates.push_back(c);
      }
    }
  }
  if (candidates.empty()) {
    throw NoFreeSpace(std::string("no free cell inside area ") + to_string(area.kind) +
                      (area.anchor_id ? " of " + *area.anchor_id : std::string{}));
  }
  const auto pick = splitmix64(seed) % candidates.size();
  return nav.center(candidates[pick]);
}

std::optional<Vec2> resolve_orientation(Vec2 p, std::optional<Vec2> face_target,
                                        std::optional<Vec2> final_heading) {
  if (face_target) {
    const Vec2 delta = *face_target - p;
    if (norm(delta) < 1e-6) throw DegenerateDirection("position coincides with the facing target");
    return delta / norm(delta);
  }
  if (final_heading) {
    if (auto unit = normalized(*final_heading)) return unit;
  }
  return std::nullopt;
}

std::string area_to_structured_text(const Area& area) {
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& poly : area.polygons) {
    nlohmann::json ring = nlohmann::json::array();
    for (const auto& v : poly.vertices()) ring.push_back({v.x, v.y});
    polys.push_back(std::move(ring));
  }
  nlohmann::json doc = {{"kind", to_string(area.kind)}, {"polygons", polys}};
  if (area.anchor_id) doc["anchor"] = *area.anchor_id;
  return doc.dump();
}

}  // namespace populace
