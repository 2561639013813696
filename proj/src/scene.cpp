#include "populace/scene.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "populace/errors.hpp"

namespace populace {

using json = nlohmann::json;

ConvexPolygon OrientedBox::footprint() const {
  return ConvexPolygon::rectangle(center.xy(), axis_x(), -half_extents.x, half_extents.x,
                                  -half_extents.y, half_extents.y);
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  // Both boxes are prisms over their footprints, so the gap separates into planar and vertical
  // components.
  const double planar = convex_distance(a.footprint(), b.footprint());
  const double vertical = std::max({0.0, a.z_min() - b.z_max(), b.z_min() - a.z_max()});
  return std::hypot(planar, vertical);
}

const char* to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Supports: return "Supports";
    case RelationKind::Above: return "Above";
    case RelationKind::Below: return "Below";
    case RelationKind::InFrontOf: return "InFrontOf";
    case RelationKind::Behind: return "Behind";
    case RelationKind::LeftOf: return "LeftOf";
    case RelationKind::RightOf: return "RightOf";
    case RelationKind::CloseTo: return "CloseTo";
  }
  return "?";
}

std::optional<RelationKind> relation_from_string(std::string_view text) {
  for (int k = 0; k <= static_cast<int>(RelationKind::CloseTo); ++k) {
    const auto kind = static_cast<RelationKind>(k);
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

RelationKind inverse(RelationKind kind) {
  switch (kind) {
    case RelationKind::Above: return RelationKind::Below;
    case RelationKind::Below: return RelationKind::Above;
    case RelationKind::InFrontOf: return RelationKind::Behind;
    case RelationKind::Behind: return RelationKind::InFrontOf;
    case RelationKind::LeftOf: return RelationKind::RightOf;
    case RelationKind::RightOf: return RelationKind::LeftOf;
    default: return kind;
  }
}

bool is_horizontal(RelationKind kind) {
  return kind == RelationKind::InFrontOf || kind == RelationKind::Behind ||
         kind == RelationKind::LeftOf || kind == RelationKind::RightOf ||
         kind == RelationKind::CloseTo;
}

bool is_directional(RelationKind kind) {
  return is_horizontal(kind) && kind != RelationKind::CloseTo;
}

// --- SceneGraph ---------------------------------------------------------------------------

SceneGraph::SceneGraph(std::string name, SimplePolygon floor, std::vector<SceneObject> objects,
                       std::vector<std::string> actions)
    : name_(std::move(name)),
      floor_(std::move(floor)),
      objects_(std::move(objects)),
      actions_(std::move(actions)) {
  reindex();
}

void SceneGraph::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    if (!index_.emplace(objects_[i].id, i).second) throw DuplicateId(objects_[i].id);
  }
}

const SceneObject* SceneGraph::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &objects_[it->second];
}

const SceneObject& SceneGraph::at(std::string_view id) const {
  if (const auto* obj = find(id)) return *obj;
  throw UnknownObject(std::string(id));
}

std::size_t SceneGraph::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) throw UnknownObject(std::string(id));
  return it->second;
}

bool SceneGraph::has_edge(std::string_view source, std::string_view target,
                          RelationKind kind) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const RelationEdge& e) {
    return e.kind == kind && e.source == source && e.target == target;
  });
}

std::vector<std::string> SceneGraph::sources_of(std::string_view target, RelationKind kind) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.kind == kind && e.target == target) out.push_back(e.source);
  }
  return out;
}

std::vector<std::string> SceneGraph::targets_of(std::string_view source, RelationKind kind) const {
  std::vector<std::string> out;
  for (const auto& e : edges_) {
    if (e.kind == kind && e.source == source) out.push_back(e.target);
  }
  return out;
}

void SceneGraph::set_edges(std::vector<RelationEdge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

void SceneGraph::add_edges(std::vector<RelationEdge> edges) {
  edges.insert(edges.end(), edges_.begin(), edges_.end());
  set_edges(std::move(edges));
}

// --- loading ------------------------------------------------------------------------------

namespace {

double number_at(const json& node, const char* what) {
  if (!node.is_number()) throw SchemaError(std::string("expected a number for ") + what);
  return node.get<double>();
}

Vec2 vec2_at(const json& node, const char* what) {
  if (!node.is_array() || node.size() != 2) throw SchemaError(std::string(what) + ": expected [x, y]");
  return {number_at(node[0], what), number_at(node[1], what)};
}

Vec3 vec3_at(const json& node, const char* what) {
  if (!node.is_array() || node.size() != 3) {
    throw SchemaError(std::string(what) + ": expected [x, y, z]");
  }
  return {number_at(node[0], what), number_at(node[1], what), number_at(node[2], what)};
}

SceneObject parse_object(const json& node) {
  if (!node.is_object()) throw SchemaError("object entry must be a mapping");
  SceneObject obj;
  if (!node.contains("id") || !node["id"].is_string()) throw SchemaError("object without string id");
  obj.id = node["id"].get<std::string>();
  if (obj.id.empty()) throw SchemaError("object with empty id");
  if (!node.contains("label") || !node["label"].is_string()) {
    throw SchemaError("object " + obj.id + ": missing label");
  }
  obj.label = node["label"].get<std::string>();
  if (!node.contains("center") || !node.contains("half_extents")) {
    throw SchemaError("object " + obj.id + ": missing center or half_extents");
  }
  obj.box.center = vec3_at(node["center"], "center");
  obj.box.half_extents = vec3_at(node["half_extents"], "half_extents");
  const auto& he = obj.box.half_extents;
  if (!(he.x > 0 && he.y > 0 && he.z > 0)) {
    throw SchemaError("object " + obj.id + ": half_extents must be positive");
  }
  obj.box.yaw = node.contains("yaw") ? wrap_angle(number_at(node["yaw"], "yaw")) : 0.0;
  if (node.contains("orientation") && !node["orientation"].is_null()) {
    const auto dir = normalized(vec2_at(node["orientation"], "orientation"));
    if (!dir) throw SchemaError("object " + obj.id + ": zero orientation vector");
    obj.orientation = *dir;
  }
  if (node.contains("attributes")) {
    if (!node["attributes"].is_array()) throw SchemaError("object " + obj.id + ": attributes must be a list");
    for (const auto& a : node["attributes"]) {
      const auto name = a.is_string() ? a.get<std::string>() : std::string{};
      if (name == "sittable") obj.attributes.sittable = true;
      else if (name == "lieable") obj.attributes.lieable = true;
      else if (name == "interactable") obj.attributes.interactable = true;
      else throw SchemaError("object " + obj.id + ": unknown attribute '" + name + "'");
    }
  }
  return obj;
}

}  // namespace

SceneGraph parse_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("scene document must be a mapping");
  if (!doc.contains("floor") || !doc["floor"].is_array()) throw SchemaError("scene: missing floor polygon");
  std::vector<Vec2> floor;
  for (const auto& v : doc["floor"]) floor.push_back(vec2_at(v, "floor vertex"));
  if (floor.size() < 3) throw SchemaError("scene: floor polygon needs at least 3 vertices");
  if (!doc.contains("objects") || !doc["objects"].is_array()) throw SchemaError("scene: missing objects list");
  std::vector<SceneObject> objects;
  for (const auto& node : doc["objects"]) objects.push_back(parse_object(node));
  std::vector<std::string> actions;
  if (doc.contains("actions")) {
    for (const auto& a : doc["actions"]) {
      if (!a.is_string()) throw SchemaError("scene: actions must be strings");
      actions.push_back(a.get<std::string>());
    }
  }
  std::string name = doc.value("name", std::string{});
  return SceneGraph(std::move(name), SimplePolygon(std::move(floor)), std::move(objects),
                    std::move(actions));
}

SceneGraph load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scene file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  SceneGraph graph = parse_scene(buffer.str());
  if (graph.name().empty()) {
    return SceneGraph(path.stem().string(), graph.floor(), graph.objects(), graph.actions());
  }
  return graph;
}

// --- orientation --------------------------------------------------------------------------

namespace {

bool overlaps_with_area(const ConvexPolygon& a, const ConvexPolygon& b, double min_area = 1e-6) {
  if (!convex_intersect(a, b)) return false;
  const auto clipped = clip_convex(a, b);
  return clipped && clipped->area() > min_area;
}

ConvexPolygon translated(const ConvexPolygon& poly, Vec2 offset) {
  std::vector<Vec2> v = poly.vertices();
  for (auto& p : v) p += offset;
  return ConvexPolygon(std::move(v));
}

bool vertical_overlap(const OrientedBox& a, const OrientedBox& b, double margin) {
  return a.z_min() + margin < b.z_max() && b.z_min() + margin < a.z_max();
}

}  // namespace

Vec2 estimate_orientation(const SceneObject& object, const SceneGraph& graph,
                          const SceneGraphParams& params) {
  if (object.orientation) return *object.orientation;

  const ConvexPolygon base = object.box.footprint();
  std::vector<ConvexPolygon> blockers;
  for (const auto& other : graph.objects()) {
    if (other.id == object.id) continue;
    if (!vertical_overlap(object.box, other.box, params.support_eps_z)) continue;
    const ConvexPolygon fp = other.box.footprint();
    if (overlaps_with_area(base, fp)) continue;
    blockers.push_back(fp);
  }
  const bool check_floor = graph.floor().vertices().size() >= 3;

  const Vec2 ax = object.box.axis_x(), ay = object.box.axis_y();
  const Vec2 candidates[4] = {ax, ay, -ax, -ay};
  double best_clearance = -1.0;
  Vec2 best = ax;
  for (const Vec2 dir : candidates) {
    double clearance = 0.0;
    for (double s = params.orientation_probe_step; s <= params.orientation_probe_max + 1e-9;
         s += params.orientation_probe_step) {
      const ConvexPolygon moved = translated(base, dir * s);
      bool blocked = false;
      if (check_floor) {
        for (const auto& v : moved.vertices()) {
          if (!graph.floor().contains(v)) {
            blocked = true;
            break;
          }
        }
      }
      for (std::size_t i = 0; !blocked && i < blockers.size(); ++i) {
        blocked = overlaps_with_area(moved, blockers[i]);
      }
      if (blocked) break;
      clearance = s;
    }
    if (clearance > best_clearance + 1e-9) {
      best_clearance = clearance;
      best = dir;
    }
  }
  return best;
}

// --- support ------------------------------------------------------------------------------

SceneGraph compute_support(SceneGraph graph, const SceneGraphParams& params) {
  const auto& objects = graph.objects();
  const std::size_t n = objects.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> supporter(n, kNone);
  std::vector<bool> on_floor(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& child = objects[i].box;
    if (child.z_min() <= params.support_eps_z) {
      on_floor[i] = true;
      continue;
    }
    const ConvexPolygon child_fp = child.footprint();
    const double child_area = child_fp.area();
    double best_containment = -1.0;
    double best_top = -1e300;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto& cand = objects[j].box;
      if (std::abs(cand.z_max() - child.z_min()) > params.support_eps_z) continue;
      const auto overlap = clip_convex(child_fp, cand.footprint());
      if (!overlap) continue;
      const double containment = overlap->area() / child_area;
      if (containment + 1e-12 < params.support_containment) continue;
      // Prefer the most containing supporter, then the highest top face; index order breaks ties.
      if (containment > best_containment + 1e-12 ||
          (std::abs(containment - best_containment) <= 1e-12 && cand.z_max() > best_top + 1e-12)) {
        best_containment = containment;
        best_top = cand.z_max();
        supporter[i] = j;
      }
    }
  }

  enum class Mark : std::uint8_t { Unvisited, Visiting, Done };
  std::vector<Mark> mark(n, Mark::Unvisited);
  std::vector<SupportLevel> level(n);
  std::vector<RelationEdge> edges;

  for (std::size_t start = 0; start < n; ++start) {
    if (mark[start] == Mark::Done) continue;
    std::vector<std::size_t> chain;
    std::size_t cur = start;
    while (true) {
      if (mark[cur] == Mark::Done) break;
      if (mark[cur] == Mark::Visiting) {
        throw CyclicSupport("support cycle through object " + objects[cur].id);
      }
      mark[cur] = Mark::Visiting;
      chain.push_back(cur);
      if (on_floor[cur] || supporter[cur] == kNone) break;
      cur = supporter[cur];
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const std::size_t i = *it;
      if (on_floor[i]) {
        level[i] = SupportLevel::at(0);
      } else if (supporter[i] == kNone) {
        level[i] = SupportLevel::hangable();
      } else {
        const auto parent = level[supporter[i]];
        // Objects resting on hangable objects inherit the hangable marker.
        level[i] = parent.is_level() ? SupportLevel::at(parent.level() + 1) : SupportLevel::hangable();
        if (parent.is_level()) {
          edges.push_back({objects[supporter[i]].id, objects[i].id, RelationKind::Supports});
        }
      }
      mark[i] = Mark::Done;
    }
  }

  for (std::size_t i = 0; i < n; ++i) graph.mutable_object(i).support = level[i];
  graph.add_edges(std::move(edges));
  return graph;
}

// --- horizontal and vertical relations ----------------------------------------------------

SceneGraph compute_relations(SceneGraph graph, const SceneGraphParams& params) {
  const auto& objects = graph.objects();
  const std::size_t n = objects.size();
  std::vector<Vec2> facing(n);
  std::vector<ConvexPolygon> footprints(n);
  for (std::size_t i = 0; i < n; ++i) {
    facing[i] = estimate_orientation(objects[i], graph, params);
    footprints[i] = objects[i].box.footprint();
  }

  std::vector<RelationEdge> edges;
  auto emit = [&edges](const std::string& src, const std::string& dst, RelationKind kind) {
    edges.push_back({src, dst, kind});
    edges.push_back({dst, src, inverse(kind)});
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = objects[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = objects[j];
      if (!a.support.is_level() || !b.support.is_level()) continue;
      if (a.support.level() != b.support.level()) continue;
      const double gap = box_distance(a.box, b.box);
      if (gap <= params.close_threshold) emit(a.id, b.id, RelationKind::CloseTo);
      if (gap > params.directional_gap) continue;

      // One frame per pair: the larger footprint anchors, ties go to the smaller id.
      const double area_a = footprints[i].area(), area_b = footprints[j].area();
      bool a_anchors = area_a > area_b + 1e-9 || (std::abs(area_a - area_b) <= 1e-9 && a.id < b.id);
      const std::size_t anchor = a_anchors ? i : j;
      const std::size_t other = a_anchors ? j : i;
      const Vec2 offset = objects[other].box.center.xy() - objects[anchor].box.center.xy();
      if (norm(offset) < 1e-9) continue;
      const Vec2 local = to_local(offset, facing[anchor]);
      const double angle = std::atan2(local.y, local.x);
      const double cone = params.directional_cone;
      RelationKind kind;
      if (std::abs(angle) <= cone) kind = RelationKind::InFrontOf;
      else if (std::abs(angle) >= kPi - cone) kind = RelationKind::Behind;
      else if (angle > 0) kind = RelationKind::LeftOf;
      else kind = RelationKind::RightOf;
      emit(objects[other].id, objects[anchor].id, kind);
    }
  }

  for (std::size_t h = 0; h < n; ++h) {
    if (!objects[h].support.is_hangable()) continue;
    for (std::size_t o = 0; o < n; ++o) {
      if (o == h) continue;
      if (objects[o].support.is_hangable() && objects[o].box.center.z >= objects[h].box.center.z) {
        continue;  // the higher of two hangable objects emits the pair
      }
      if (objects[h].box.center.z <= objects[o].box.center.z) continue;
      if (!overlaps_with_area(footprints[h], footprints[o], 1e-9)) continue;
      emit(objects[h].id, objects[o].id, RelationKind::Above);
    }
  }

  graph.add_edges(std::move(edges));
  return graph;
}

SceneGraph build_scene_graph(SceneGraph graph, const SceneGraphParams& params) {
  return compute_relations(compute_support(std::move(graph), params), params);
}

// --- DBSCAN -------------------------------------------------------------------------------

std::vector<Region> cluster_regions(const SceneGraph& graph, double eps, int min_pts) {
  const auto& objects = graph.objects();
  const std::size_t n = objects.size();
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i].push_back(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (box_distance(objects[i].box, objects[j].box) <= eps) {
        neighbors[i].push_back(j);
        neighbors[j].push_back(i);
      }
    }
  }
  for (auto& list : neighbors) std::sort(list.begin(), list.end());

  constexpr int kUnlabeled = -2;
  constexpr int kNoise = -1;
  std::vector<int> label(n, kUnlabeled);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnlabeled) continue;
    if (static_cast<int>(neighbors[i].size()) < min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int cluster = next++;
    label[i] = cluster;
    std::vector<std::size_t> frontier(neighbors[i].begin(), neighbors[i].end());
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const std::size_t q = frontier[k];
      if (label[q] == kNoise) label[q] = cluster;  // border point
      if (label[q] != kUnlabeled) continue;
      label[q] = cluster;
      if (static_cast<int>(neighbors[q].size()) >= min_pts) {
        frontier.insert(frontier.end(), neighbors[q].begin(), neighbors[q].end());
      }
    }
  }

  std::vector<Region> regions(static_cast<std::size_t>(next));
  for (int r = 0; r < next; ++r) regions[r].id = r;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] < 0) continue;
    regions[label[i]].member_ids.push_back(objects[i].id);
    regions[label[i]].centroid += objects[i].box.center.xy();
  }
  for (auto& region : regions) {
    region.centroid = region.centroid / static_cast<double>(region.member_ids.size());
  }
  return regions;
}

// --- export -------------------------------------------------------------------------------

namespace {

double tidy(double v) { return std::round(v * 1000.0) / 1000.0 + 0.0; }

}  // namespace

std::string graph_to_structured_text(const SceneGraph& graph, const std::vector<Region>& regions,
                                     const SceneGraphParams& params) {
  std::vector<const SceneObject*> sorted;
  for (const auto& obj : graph.objects()) sorted.push_back(&obj);
  std::sort(sorted.begin(), sorted.end(),
            [](const SceneObject* a, const SceneObject* b) { return a->id < b->id; });

  json objects = json::array();
  for (const auto* obj : sorted) {
    json attrs = json::array();
    if (obj->attributes.interactable) attrs.push_back("interactable");
    if (obj->attributes.lieable) attrs.push_back("lieable");
    if (obj->attributes.sittable) attrs.push_back("sittable");
    const Vec2 facing = estimate_orientation(*obj, graph, params);
    const auto& b = obj->box;
    json node = {
        {"id", obj->id},
        {"label", obj->label},
        {"center", {tidy(b.center.x), tidy(b.center.y), tidy(b.center.z)}},
        {"size", {tidy(2 * b.half_extents.x), tidy(2 * b.half_extents.y), tidy(2 * b.half_extents.z)}},
        {"facing", {tidy(facing.x), tidy(facing.y)}},
        {"attributes", attrs},
    };
    if (obj->support.is_level()) node["support_level"] = obj->support.level();
    else if (obj->support.is_hangable()) node["support_level"] = "hangable";
    objects.push_back(std::move(node));
  }

  json edges = json::array();
  auto sorted_edges = graph.edges();
  std::sort(sorted_edges.begin(), sorted_edges.end(), [](const RelationEdge& a, const RelationEdge& b) {
    return std::tie(a.source, a.target, a.kind) < std::tie(b.source, b.target, b.kind);
  });
  for (const auto& e : sorted_edges) {
    edges.push_back({{"source", e.source}, {"target", e.target}, {"kind", to_string(e.kind)}});
  }

  auto sorted_regions = regions;
  std::sort(sorted_regions.begin(), sorted_regions.end(),
            [](const Region& a, const Region& b) { return a.id < b.id; });
  json region_nodes = json::array();
  for (const auto& r : sorted_regions) {
    auto members = r.member_ids;
    std::sort(members.begin(), members.end());
    region_nodes.push_back(
        {{"id", r.id}, {"members", members}, {"centroid", {tidy(r.centroid.x), tidy(r.centroid.y)}}});
  }

  json doc = {{"objects", objects}, {"edges", edges}, {"regions", region_nodes}};
  return doc.dump(2);
}

// --- label generalization -----------------------------------------------------------------

SceneGraph generalize_labels(const SceneGraph& graph,
                             const std::map<std::string, std::string>& general_labels,
                             std::uint64_t seed) {
  std::vector<SceneObject> objects = graph.objects();
  for (auto& obj : objects) {
    if (const auto it = general_labels.find(obj.label); it != general_labels.end()) {
      obj.label = it->second;
    }
  }
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < objects.size(); ++i) by_label[objects[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  std::map<std::string, std::string> renamed;
  for (auto& [label, members] : by_label) {
    std::vector<int> indices(members.size());
    std::iota(indices.begin(), indices.end(), 1);
    std::shuffle(indices.begin(), indices.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& obj = objects[members[k]];
      const std::string fresh = label + "_" + std::to_string(indices[k]);
      renamed[obj.id] = fresh;
      obj.id = fresh;
    }
  }
  SceneGraph out(graph.name(), graph.floor(), std::move(objects), graph.actions());
  std::vector<RelationEdge> edges;
  for (const auto& e : graph.edges()) edges.push_back({renamed.at(e.source), renamed.at(e.target), e.kind});
  out.set_edges(std::move(edges));
  return out;
}

}  // namespace populace
