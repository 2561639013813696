#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "populace/geometry.hpp"

namespace populace {

/// Box whose vertical axis is aligned with world z and is rotated by `yaw` about it.
struct OrientedBox {
  Vec3 center{};
  Vec3 half_extents{0.5, 0.5, 0.5};
  double yaw = 0.0;

  double z_min() const { return center.z - half_extents.z; }
  double z_max() const { return center.z + half_extents.z; }
  /// Local +x axis in world coordinates.
  Vec2 axis_x() const { return heading_vector(yaw); }
  Vec2 axis_y() const { return perp(axis_x()); }
  ConvexPolygon footprint() const;
};

/// Minimum gap between two boxes in 3D; 0 when they touch or overlap.
double box_distance(const OrientedBox& a, const OrientedBox& b);

struct ObjectAttributes {
  bool sittable = false;
  bool lieable = false;
  bool interactable = false;

  bool operator==(const ObjectAttributes&) const = default;
};

/// Depth in the support hierarchy, or the hangable marker for unsupported objects.
class SupportLevel {
 public:
  constexpr SupportLevel() = default;
  static constexpr SupportLevel at(int level) { return SupportLevel(level); }
  static constexpr SupportLevel hangable() { return SupportLevel(kHangable); }

  constexpr bool assigned() const { return value_ != kUnassigned; }
  constexpr bool is_hangable() const { return value_ == kHangable; }
  constexpr bool is_level() const { return value_ >= 0; }
  constexpr int level() const { return value_; }
  constexpr bool operator==(const SupportLevel&) const = default;

 private:
  static constexpr int kUnassigned = -2;
  static constexpr int kHangable = -1;
  constexpr explicit SupportLevel(int v) : value_(v) {}
  int value_ = kUnassigned;
};

struct SceneObject {
  std::string id;
  std::string label;
  OrientedBox box;
  std::optional<Vec2> orientation;
  ObjectAttributes attributes;
  SupportLevel support;
};

enum class RelationKind : std::uint8_t {
  Supports,
  Above,
  Below,
  InFrontOf,
  Behind,
  LeftOf,
  RightOf,
  CloseTo,
};

const char* to_string(RelationKind kind);
std::optional<RelationKind> relation_from_string(std::string_view text);
RelationKind inverse(RelationKind kind);
bool is_horizontal(RelationKind kind);
bool is_directional(RelationKind kind);

/// `source` stands in relation `kind` to `target` ("cup InFrontOf table").
struct RelationEdge {
  std::string source;
  std::string target;
  RelationKind kind{};

  auto operator<=>(const RelationEdge&) const = default;
};

/// Tunables for graph construction. Defaults are room-scale.
struct SceneGraphParams {
  double support_eps_z = 0.05;
  double support_containment = 0.6;
  double close_threshold = 1.0;
  double directional_gap = 2.5;
  double directional_cone = kPi / 4.0;  // half-angle
  double orientation_probe_max = 5.0;
  double orientation_probe_step = 0.05;
};

class SceneGraph {
 public:
  SceneGraph() = default;
  /// Throws DuplicateId when two objects share an id.
  SceneGraph(std::string name, SimplePolygon floor, std::vector<SceneObject> objects,
             std::vector<std::string> actions = {});

  const std::string& name() const { return name_; }
  const SimplePolygon& floor() const { return floor_; }
  const std::vector<SceneObject>& objects() const { return objects_; }
  const std::vector<RelationEdge>& edges() const { return edges_; }
  /// Permissible action labels for characters in this scene.
  const std::vector<std::string>& actions() const { return actions_; }

  const SceneObject* find(std::string_view id) const;
  /// Throws UnknownObject.
  const SceneObject& at(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  bool has_edge(std::string_view source, std::string_view target, RelationKind kind) const;
  /// Ids of objects `x` such that `x kind target` holds.
  std::vector<std::string> sources_of(std::string_view target, RelationKind kind) const;
  std::vector<std::string> targets_of(std::string_view source, RelationKind kind) const;

  SceneObject& mutable_object(std::size_t index) { return objects_[index]; }
  void set_edges(std::vector<RelationEdge> edges);
  void add_edges(std::vector<RelationEdge> edges);
  void set_actions(std::vector<std::string> actions) { actions_ = std::move(actions); }

 private:
  void reindex();

  std::string name_;
  SimplePolygon floor_;
  std::vector<SceneObject> objects_;
  std::vector<RelationEdge> edges_;
  std::vector<std::string> actions_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Region {
  int id = 0;
  std::vector<std::string> member_ids;
  Vec2 centroid{};
};

/// Reads a scene document. Throws SchemaError or DuplicateId.
SceneGraph load_scene(const std::filesystem::path& path);
SceneGraph parse_scene(std::string_view text);

/// The object's explicit orientation, or the horizontal box axis with the most free space in
/// front of it (ties resolve to the box's local +x).
Vec2 estimate_orientation(const SceneObject& object, const SceneGraph& graph,
                          const SceneGraphParams& params = {});

/// Adds Supports edges and assigns a support level or the hangable marker to every object.
/// Throws CyclicSupport.
SceneGraph compute_support(SceneGraph graph, const SceneGraphParams& params = {});

/// Adds horizontal relations between same-level objects and Above/Below for hangable objects.
SceneGraph compute_relations(SceneGraph graph, const SceneGraphParams& params = {});

/// compute_support followed by compute_relations.
SceneGraph build_scene_graph(SceneGraph graph, const SceneGraphParams& params = {});

/// DBSCAN over box_distance. Noise objects belong to no region.
std::vector<Region> cluster_regions(const SceneGraph& graph, double eps = 1.0, int min_pts = 2);

/// Deterministic JSON export (objects sorted by id, edges sorted, regions by id).
std::string graph_to_structured_text(const SceneGraph& graph, const std::vector<Region>& regions,
                                     const SceneGraphParams& params = {});

/// Replaces labels using `general_labels` (specific -> general) and reassigns per-label id
/// indices in a seeded random order, removing index-based arrangement cues.
SceneGraph generalize_labels(const SceneGraph& graph,
                             const std::map<std::string, std::string>& general_labels,
                             std::uint64_t seed);

}  // namespace populace
