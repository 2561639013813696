#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "populace/geometry.hpp"

namespace populace {

class SceneGraph;

struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

/// Navigable raster over the floor. Sittable furniture is marked endpoint-only: a path may end
/// on such a cell (or start from it) but never pass through.
class GridMap {
 public:
  GridMap() = default;
  GridMap(Vec2 origin, double cell_size, int width, int height);

  Vec2 origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t cell_count() const { return blocked_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell_of_index(std::size_t i) const {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }
  bool blocked(Cell c) const { return !in_bounds(c) || blocked_[index(c)]; }
  bool endpoint_only(Cell c) const { return in_bounds(c) && endpoint_[index(c)]; }
  /// Object whose footprint made this cell endpoint-only, if any.
  const std::string* endpoint_owner(Cell c) const;
  /// Free for pass-through.
  bool traversable(Cell c) const { return in_bounds(c) && !blocked_[index(c)] && !endpoint_[index(c)]; }
  /// Free to stand on (traversable or endpoint-only).
  bool standable(Cell c) const { return in_bounds(c) && !blocked_[index(c)]; }

  Vec2 center(Cell c) const;
  std::optional<Cell> cell_at(Vec2 p) const;

  void set_blocked(Cell c, bool value = true);
  /// Ignored on blocked cells.
  void set_endpoint(Cell c, std::string owner);

  /// One character per cell, top row first: '.' free, '#' blocked, 'e' endpoint.
  std::string to_text() const;
  /// Inverse of to_text; owners of 'e' cells are set to `owner`.
  static GridMap from_text(std::string_view text, double cell_size = 1.0, Vec2 origin = {},
                           std::string_view owner = "seat");

 private:
  Vec2 origin_{};
  double cell_size_ = 0.25;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::uint8_t> endpoint_;
  std::vector<std::string> owners_;
};

struct GridParams {
  double cell_size = 0.25;
  /// Objects whose vertical span meets this band block walking.
  double walk_band_min = 0.1;
  double walk_band_max = 1.8;
};

/// Throws EmptyFloor.
GridMap build_grid_map(const SceneGraph& graph, const GridParams& params = {});

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Whether a path toward `goal` may pass through `c`. Endpoint-only cells are passable when they
/// belong to the same object as the goal cell or the start cell, so an agent can reach a seat
/// cell deep inside a sofa and leave it again, but never walks across unrelated furniture.
bool may_cross(const GridMap& map, Cell c, Cell goal, std::optional<Cell> start = std::nullopt);

/// Exact 4-neighbor shortest-path lengths to `goal`; kUnreachable where no path exists.
/// Foreign endpoint-only cells receive a distance but are never passed through (see may_cross).
/// Throws BlockedGoal.
std::vector<int> true_distance_heuristic(const GridMap& map, Cell goal,
                                         std::optional<Cell> start = std::nullopt);

struct TimedCell {
  Cell cell;
  int tick = 0;

  bool operator==(const TimedCell&) const = default;
};

struct TimedPath {
  std::string agent;
  std::vector<TimedCell> cells;  // window + 1 entries, ticks consecutive
  Cell goal{};
  /// The agent could not leave its start this window while its goal lies elsewhere.
  bool stuck = false;

  Cell cell_at_tick(int tick) const;
  bool operator==(const TimedPath&) const = default;
};

class ReservationTable {
 public:
  void reserve_vertex(Cell c, int tick);
  void reserve_edge(Cell from, Cell to, int tick);
  /// One vertex reservation per tick and one edge reservation per move.
  void reserve_path(const TimedPath& path);
  /// Holds `c` for ticks [from, to].
  void reserve_stationary(Cell c, int from, int to);

  bool vertex_reserved(Cell c, int tick) const;
  bool edge_reserved(Cell from, Cell to, int tick) const;
  /// Whether moving from -> to between tick and tick + 1 collides with a reservation.
  bool move_blocked(Cell from, Cell to, int tick) const;

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  void clear();

 private:
  static std::uint64_t vertex_key(Cell c, int tick);
  struct EdgeKey {
    std::uint32_t from;
    std::uint32_t to;
    std::int32_t tick;
    bool operator==(const EdgeKey&) const = default;
  };
  struct EdgeHash {
    std::size_t operator()(const EdgeKey& k) const;
  };
  std::unordered_set<std::uint64_t> vertices_;
  std::unordered_set<EdgeKey, EdgeHash> edges_;
};

struct AgentRequest {
  std::string id;
  Cell start;
  Cell goal;
  int priority = 0;  // lower plans first
};

/// Windowed cooperative A*: agents are planned in priority order through (cell, tick) space,
/// each respecting what is already reserved and then reserving its own path. Every returned path
/// has exactly `window` steps. Should an agent find no feasible path, the window is replanned
/// with that agent promoted; as a last resort unplanned agents' cells are treated as obstacles,
/// which always admits a conflict-free answer.
std::vector<TimedPath> plan_window(std::span<const AgentRequest> agents, const GridMap& map,
                                   ReservationTable& reservations, int window, int start_tick = 0);

struct Conflict {
  enum class Type { Vertex, Edge };
  Type type = Type::Vertex;
  std::string agent_a;
  std::string agent_b;
  Cell cell{};
  Cell other_cell{};
  int tick = 0;
};

/// First vertex (same cell, same tick) or swap conflict (a->b while b->a on the same tick).
std::optional<Conflict> validate_no_conflicts(std::span<const TimedPath> paths);

}  // namespace populace
