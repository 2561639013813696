#pragma once

// Seeded generators and reference oracles shared by the unit tests and the acceptance binary.
// The oracles are written independently of the library code they check: plain textbook loops,
// no shared helpers beyond the public types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "populace/nav_grid.hpp"
#include "populace/scene.hpp"

namespace populace::testing {

inline std::filesystem::path data_dir() { return POPULACE_DATA_DIR; }
inline std::filesystem::path golden_dir() { return POPULACE_GOLDEN_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline SceneObject make_box(std::string id, std::string label, Vec3 center, Vec3 half, double yaw = 0.0) {
  SceneObject o;
  o.id = std::move(id);
  o.label = std::move(label);
  o.box.center = center;
  o.box.half_extents = half;
  o.box.yaw = yaw;
  return o;
}

inline SimplePolygon rect_floor(double w, double h) { return SimplePolygon({{0, 0}, {w, 0}, {w, h}, {0, h}}); }

/// Random furniture scene: floor-standing boxes, items stacked on them (sometimes two high), and
/// a few wall-mounted objects with nothing below.
inline SceneGraph random_scene(Rng& rng, int min_objects = 4, int max_objects = 24) {
  const double w = 10.0, h = 10.0;
  const int n = rng.integer(min_objects, max_objects);
  std::vector<SceneObject> objs;
  std::map<std::string, int> counts;
  auto next_id = [&counts](const std::string& label) { return label + "_" + std::to_string(++counts[label]); };
  static const char* kFloorLabels[] = {"table", "chair", "sofa", "cabinet", "desk", "bed"};
  static const char* kSmallLabels[] = {"cup", "plate", "lamp", "book"};
  std::vector<std::size_t> stackable;
  while (static_cast<int>(objs.size()) < n) {
    const double roll = rng.uniform(0, 1);
    if (roll < 0.3 && !stackable.empty()) {
      const SceneObject& parent = objs[stackable[rng.integer(0, static_cast<int>(stackable.size()) - 1)]];
      const double hx = std::max(0.03, parent.box.half_extents.x * rng.uniform(0.15, 0.45));
      const double hy = std::max(0.03, parent.box.half_extents.y * rng.uniform(0.15, 0.45));
      const double hz = rng.uniform(0.03, 0.2);
      const Vec2 local{rng.uniform(-0.4, 0.4) * parent.box.half_extents.x,
                       rng.uniform(-0.4, 0.4) * parent.box.half_extents.y};
      const Vec2 xy = parent.box.center.xy() + from_local(local, parent.box.axis_x());
      const std::string label = kSmallLabels[rng.integer(0, 3)];
      objs.push_back(make_box(next_id(label), label, {xy.x, xy.y, parent.box.z_max() + hz}, {hx, hy, hz},
                              parent.box.yaw));
      if (rng.chance(0.3)) stackable.push_back(objs.size() - 1);
    } else if (roll < 0.4) {
      const double hz = rng.uniform(0.1, 0.4);
      objs.push_back(make_box(next_id("clock"), "clock",
                              {rng.uniform(0.5, w - 0.5), rng.uniform(0.5, h - 0.5), rng.uniform(1.9, 2.4) + hz},
                              {rng.uniform(0.1, 0.4), rng.uniform(0.05, 0.3), hz}));
    } else {
      const double hx = rng.uniform(0.2, 0.9), hy = rng.uniform(0.2, 0.9), hz = rng.uniform(0.2, 0.6);
      const std::string label = kFloorLabels[rng.integer(0, 5)];
      objs.push_back(make_box(next_id(label), label, {rng.uniform(1.0, w - 1.0), rng.uniform(1.0, h - 1.0), hz},
                              {hx, hy, hz}, rng.chance(0.3) ? rng.uniform(-kPi, kPi) : 0.0));
      if (label == "chair" || label == "sofa") objs.back().attributes.sittable = true;
      stackable.push_back(objs.size() - 1);
    }
  }
  return SceneGraph("random", rect_floor(w, h), std::move(objs));
}

/// Random points as tiny boxes, for clustering checks where gaps equal center distances minus a
/// known constant.
inline SceneGraph random_point_scene(Rng& rng, int n, double extent) {
  std::vector<SceneObject> objs;
  for (int i = 0; i < n; ++i) {
    objs.push_back(make_box("p_" + std::to_string(i), "p",
                            {rng.uniform(0, extent), rng.uniform(0, extent), 0.5}, {0.05, 0.05, 0.5}));
  }
  return SceneGraph("points", rect_floor(extent, extent), std::move(objs));
}

/// Textbook DBSCAN (Ester et al. formulation) over the pairwise metric `dist`. Returns one label per
/// point, -1 for noise. Cluster ids follow discovery order over point index.
template <class Dist>
std::vector<int> reference_dbscan(std::size_t n, Dist dist, double eps, int min_pts) {
  std::vector<int> label(n, -2);
  auto region_query = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q) {
      if (dist(p, q) <= eps) out.push_back(q);
    }
    return out;
  };
  int cluster = -1;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != -2) continue;
    auto seeds = region_query(p);
    if (static_cast<int>(seeds.size()) < min_pts) {
      label[p] = -1;
      continue;
    }
    ++cluster;
    label[p] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (label[q] == -1) label[q] = cluster;
      if (label[q] != -2) continue;
      label[q] = cluster;
      auto more = region_query(q);
      if (static_cast<int>(more.size()) >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
    }
  }
  return label;
}

/// Partition as a set of member sets, for label-order-free comparison.
inline std::set<std::set<std::string>> partition_of(const std::vector<Region>& regions) {
  std::set<std::set<std::string>> out;
  for (const auto& r : regions) out.insert(std::set<std::string>(r.member_ids.begin(), r.member_ids.end()));
  return out;
}

inline std::set<std::set<std::string>> partition_of(const std::vector<int>& labels, const SceneGraph& graph) {
  std::map<int, std::set<std::string>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) by[labels[i]].insert(graph.objects()[i].id);
  }
  std::set<std::set<std::string>> out;
  for (auto& [k, v] : by) out.insert(v);
  return out;
}

/// Random map: blocked cells with the given density, some endpoint-only cells, and an outer wall
/// with probability one half.
inline GridMap random_map(Rng& rng, int w, int h, double blocked, double endpoint = 0.0) {
  GridMap map({0, 0}, 1.0, w, h);
  const bool wall = rng.chance(0.5);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool edge = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      if ((wall && edge) || rng.chance(blocked)) map.set_blocked({x, y});
      else if (rng.chance(endpoint)) map.set_endpoint({x, y}, "seat_" + std::to_string(rng.integer(0, 3)));
    }
  }
  return map;
}

/// Breadth-first distances to `goal` over 4-neighbors. A cell relays the search only when it is
/// free for pass-through, the goal itself, or an endpoint cell of the goal's or start's object.
inline std::vector<int> bfs_oracle(const GridMap& map, Cell goal, std::optional<Cell> start = std::nullopt) {
  std::vector<int> dist(map.cell_count(), kUnreachable);
  auto owner = [&](Cell c) -> std::string {
    const std::string* o = map.endpoint_owner(c);
    return o ? *o : std::string();
  };
  const std::string goal_owner = owner(goal);
  const std::string start_owner = start ? owner(*start) : std::string();
  auto relays = [&](Cell c) {
    if (c == goal || map.traversable(c)) return true;
    const std::string o = owner(c);
    return !o.empty() && (o == goal_owner || o == start_owner);
  };
  if (!map.standable(goal)) return dist;
  std::deque<Cell> q{goal};
  dist[map.index(goal)] = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    if (!relays(c)) continue;
    const Cell nbrs[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const Cell n : nbrs) {
      if (!map.standable(n) || dist[map.index(n)] != kUnreachable) continue;
      dist[map.index(n)] = dist[map.index(c)] + 1;
      q.push_back(n);
    }
  }
  return dist;
}

/// Exhaustive pairwise scan: any two agents in one cell at one tick, or swapping cells between
/// consecutive ticks. Written without the library's validator.
inline int count_conflicts(const std::vector<TimedPath>& paths) {
  int conflicts = 0;
  for (std::size_t a = 0; a < paths.size(); ++a) {
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      const auto& pa = paths[a].cells;
      const auto& pb = paths[b].cells;
      for (const auto& ta : pa) {
        for (const auto& tb : pb) {
          if (ta.tick == tb.tick && ta.cell == tb.cell) ++conflicts;
        }
      }
      for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
        for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
          if (pa[i].tick != pb[j].tick) continue;
          if (pa[i].cell == pb[j + 1].cell && pa[i + 1].cell == pb[j].cell && !(pa[i].cell == pa[i + 1].cell)) {
            ++conflicts;
          }
        }
      }
    }
  }
  return conflicts;
}

/// Path cells that are blocked, or endpoint cells passed through (not the last cell of the path,
/// not the start, and owned by neither the goal's object nor the start's).
inline int count_cell_violations(const GridMap& map, const TimedPath& path) {
  int bad = 0;
  auto owner = [&](Cell c) -> std::string {
    const std::string* o = map.endpoint_owner(c);
    return o ? *o : std::string();
  };
  const Cell start = path.cells.front().cell;
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const Cell c = path.cells[i].cell;
    if (!map.standable(c)) {
      ++bad;
      continue;
    }
    if (!map.endpoint_only(c) || c == path.goal || c == start) continue;
    const std::string o = owner(c);
    if (o != owner(path.goal) && o != owner(start)) ++bad;
  }
  for (std::size_t i = 0; i + 1 < path.cells.size(); ++i) {
    if (manhattan(path.cells[i].cell, path.cells[i + 1].cell) > 1) ++bad;
    if (path.cells[i + 1].tick != path.cells[i].tick + 1) ++bad;
  }
  return bad;
}

}  // namespace populace::testing
