#include "populace/nav_grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <sstream>
#include <tuple>

#include "populace/errors.hpp"
#include "populace/scene.hpp"

namespace populace {

// --- GridMap ------------------------------------------------------------------------------

GridMap::GridMap(Vec2 origin, double cell_size, int width, int height)
    : origin_(origin),
      cell_size_(cell_size),
      width_(width),
      height_(height),
      blocked_(static_cast<std::size_t>(width) * height, 0),
      endpoint_(static_cast<std::size_t>(width) * height, 0),
      owners_(static_cast<std::size_t>(width) * height) {}

const std::string* GridMap::endpoint_owner(Cell c) const {
  if (!endpoint_only(c)) return nullptr;
  return &owners_[index(c)];
}

Vec2 GridMap::center(Cell c) const {
  return {origin_.x + (c.x + 0.5) * cell_size_, origin_.y + (c.y + 0.5) * cell_size_};
}

std::optional<Cell> GridMap::cell_at(Vec2 p) const {
  const Cell c{static_cast<int>(std::floor((p.x - origin_.x) / cell_size_)),
               static_cast<int>(std::floor((p.y - origin_.y) / cell_size_))};
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

void GridMap::set_blocked(Cell c, bool value) {
  const auto i = index(c);
  blocked_[i] = value ? 1 : 0;
  if (value) {
    endpoint_[i] = 0;
    owners_[i].clear();
  }
}

void GridMap::set_endpoint(Cell c, std::string owner) {
  const auto i = index(c);
  if (blocked_[i] || endpoint_[i]) return;
  endpoint_[i] = 1;
  owners_[i] = std::move(owner);
}

std::string GridMap::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(width_ + 1) * height_);
  for (int y = height_ - 1; y >= 0; --y) {
    for (int x = 0; x < width_; ++x) {
      const Cell c{x, y};
      out += blocked(c) ? '#' : endpoint_only(c) ? 'e' : '.';
    }
    out += '\n';
  }
  return out;
}

GridMap GridMap::from_text(std::string_view text, double cell_size, Vec2 origin,
                           std::string_view owner) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(line);
  }
  const int height = static_cast<int>(rows.size());
  const int width = height ? static_cast<int>(rows.front().size()) : 0;
  GridMap map(origin, cell_size, width, height);
  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[r].size()) != width) throw SchemaError("ragged grid raster");
    const int y = height - 1 - r;
    for (int x = 0; x < width; ++x) {
      switch (rows[r][x]) {
        case '#': map.set_blocked({x, y}); break;
        case 'e': map.set_endpoint({x, y}, std::string(owner)); break;
        case '.': break;
        default: throw SchemaError(std::string("unknown raster character '") + rows[r][x] + "'");
      }
    }
  }
  return map;
}

GridMap build_grid_map(const SceneGraph& graph, const GridParams& params) {
  const auto& floor = graph.floor();
  if (floor.vertices().size() < 3 || floor.area() <= 1e-9) throw EmptyFloor("floor polygon has no area");
  if (!(params.cell_size > 0)) throw ValidationError("cell_size must be positive");
  const Aabb2 bounds = floor.bounds();
  const double cs = params.cell_size;
  const int width = std::max(1, static_cast<int>(std::ceil((bounds.max.x - bounds.min.x) / cs - 1e-9)));
  const int height = std::max(1, static_cast<int>(std::ceil((bounds.max.y - bounds.min.y) / cs - 1e-9)));
  GridMap map(bounds.min, cs, width, height);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!floor.contains(map.center({x, y}))) map.set_blocked({x, y});
    }
  }

  auto covered_cells = [&](const ConvexPolygon& fp, auto&& visit) {
    const Aabb2 box = fp.bounds();
    const int x0 = std::max(0, static_cast<int>(std::floor((box.min.x - bounds.min.x) / cs)));
    const int y0 = std::max(0, static_cast<int>(std::floor((box.min.y - bounds.min.y) / cs)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor((box.max.x - bounds.min.x) / cs)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor((box.max.y - bounds.min.y) / cs)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 lo{bounds.min.x + x * cs, bounds.min.y + y * cs};
        const ConvexPolygon square({lo, lo + Vec2{cs, 0}, lo + Vec2{cs, cs}, lo + Vec2{0, cs}});
        const auto overlap = clip_convex(square, fp);
        if (overlap && overlap->area() > 1e-9) visit(Cell{x, y});
      }
    }
  };

  auto in_walk_band = [&](const SceneObject& obj) {
    return obj.box.z_max() > params.walk_band_min && obj.box.z_min() < params.walk_band_max;
  };

  for (const auto& obj : graph.objects()) {
    if (obj.attributes.sittable || !in_walk_band(obj)) continue;
    covered_cells(obj.box.footprint(), [&](Cell c) { map.set_blocked(c); });
  }
  for (const auto& obj : graph.objects()) {
    if (!obj.attributes.sittable || !in_walk_band(obj)) continue;
    covered_cells(obj.box.footprint(), [&](Cell c) { map.set_endpoint(c, obj.id); });
  }
  return map;
}

// --- distance field -----------------------------------------------------------------------

namespace {

constexpr Cell kSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Cell step(Cell c, Cell d) { return {c.x + d.x, c.y + d.y}; }

bool same_owner(const GridMap& map, Cell a, Cell b) {
  const std::string* oa = map.endpoint_owner(a);
  const std::string* ob = map.endpoint_owner(b);
  return oa && ob && *oa == *ob;
}

}  // namespace

bool may_cross(const GridMap& map, Cell c, Cell goal, std::optional<Cell> start) {
  if (map.traversable(c) || c == goal) return true;
  return same_owner(map, c, goal) || (start && same_owner(map, c, *start));
}

std::vector<int> true_distance_heuristic(const GridMap& map, Cell goal, std::optional<Cell> start) {
  if (!map.standable(goal)) throw BlockedGoal("goal cell is blocked");
  std::vector<int> dist(map.cell_count(), kUnreachable);
  std::deque<Cell> queue;
  dist[map.index(goal)] = 0;
  queue.push_back(goal);
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    // Foreign endpoint cells can start a path but not relay one.
    if (!may_cross(map, c, goal, start)) continue;
    for (const Cell d : kSteps) {
      const Cell n = step(c, d);
      if (!map.standable(n)) continue;
      auto& slot = dist[map.index(n)];
      if (slot != kUnreachable) continue;
      slot = dist[map.index(c)] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

// --- reservations -------------------------------------------------------------------------

Cell TimedPath::cell_at_tick(int tick) const {
  if (cells.empty()) return goal;
  if (tick <= cells.front().tick) return cells.front().cell;
  if (tick >= cells.back().tick) return cells.back().cell;
  return cells[static_cast<std::size_t>(tick - cells.front().tick)].cell;
}

std::uint64_t ReservationTable::vertex_key(Cell c, int tick) {
  return (static_cast<std::uint64_t>(static_cast<std::uint16_t>(c.x)) << 48) |
         (static_cast<std::uint64_t>(static_cast<std::uint16_t>(c.y)) << 32) |
         static_cast<std::uint32_t>(tick);
}

std::size_t ReservationTable::EdgeHash::operator()(const EdgeKey& k) const {
  std::uint64_t h = (static_cast<std::uint64_t>(k.from) << 32) ^ k.to;
  h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.tick)) * 0x9E3779B97F4A7C15ULL;
  h ^= h >> 29;
  return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
}

namespace {

std::uint32_t pack(Cell c) {
  return (static_cast<std::uint32_t>(static_cast<std::uint16_t>(c.x)) << 16) |
         static_cast<std::uint16_t>(c.y);
}

}  // namespace

void ReservationTable::reserve_vertex(Cell c, int tick) { vertices_.insert(vertex_key(c, tick)); }

void ReservationTable::reserve_edge(Cell from, Cell to, int tick) {
  edges_.insert({pack(from), pack(to), tick});
}

void ReservationTable::reserve_path(const TimedPath& path) {
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    reserve_vertex(path.cells[i].cell, path.cells[i].tick);
    if (i + 1 < path.cells.size() && !(path.cells[i].cell == path.cells[i + 1].cell)) {
      reserve_edge(path.cells[i].cell, path.cells[i + 1].cell, path.cells[i].tick);
    }
  }
}

void ReservationTable::reserve_stationary(Cell c, int from, int to) {
  for (int t = from; t <= to; ++t) reserve_vertex(c, t);
}

bool ReservationTable::vertex_reserved(Cell c, int tick) const {
  return vertices_.contains(vertex_key(c, tick));
}

bool ReservationTable::edge_reserved(Cell from, Cell to, int tick) const {
  return edges_.contains({pack(from), pack(to), tick});
}

bool ReservationTable::move_blocked(Cell from, Cell to, int tick) const {
  if (vertex_reserved(to, tick + 1)) return true;
  return !(from == to) && edge_reserved(to, from, tick);
}

void ReservationTable::clear() {
  vertices_.clear();
  edges_.clear();
}

// --- windowed cooperative A* --------------------------------------------------------------

namespace {

struct SearchContext {
  const GridMap& map;
  const ReservationTable& reservations;
  /// Cells held by agents not planned yet (conservative pass only).
  const std::vector<Cell>& held;
  int window;
  int start_tick;
};

bool held_cell(const std::vector<Cell>& held, Cell c) {
  return std::find(held.begin(), held.end(), c) != held.end();
}

/// Space-time A* over one window. Step cost is 1 except waiting on the goal, which is free; the
/// terminal cost adds the distance field at the window's last cell.
std::optional<TimedPath> search_agent(const AgentRequest& agent, const SearchContext& ctx) {
  const GridMap& map = ctx.map;
  const int layers = ctx.window + 1;
  const std::size_t ncells = map.cell_count();

  std::vector<int> h = map.standable(agent.goal) ? true_distance_heuristic(map, agent.goal, agent.start)
                                                 : std::vector<int>(ncells, kUnreachable);
  if (h[map.index(agent.start)] == kUnreachable) {
    // Goal unreachable: head for the cell nearest to it by Manhattan distance.
    for (std::size_t i = 0; i < ncells; ++i) h[i] = manhattan(map.cell_of_index(i), agent.goal);
  }

  const std::size_t states = static_cast<std::size_t>(layers) * ncells;
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> g(states, kInf);
  std::vector<std::uint32_t> parent(states, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint8_t> closed(states, 0);

  using Entry = std::tuple<int, int, int, std::uint32_t>;  // f, h, -layer, state
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto state_of = [ncells](int layer, std::size_t cell) {
    return static_cast<std::uint32_t>(static_cast<std::size_t>(layer) * ncells + cell);
  };

  const std::size_t start_index = map.index(agent.start);
  if (ctx.reservations.vertex_reserved(agent.start, ctx.start_tick)) return std::nullopt;
  const auto s0 = state_of(0, start_index);
  g[s0] = 0;
  open.emplace(h[start_index], h[start_index], 0, s0);

  std::optional<std::uint32_t> terminal;
  while (!open.empty()) {
    const auto [f, hv, neg_layer, state] = open.top();
    open.pop();
    if (closed[state]) continue;
    closed[state] = 1;
    const int layer = -neg_layer;
    if (layer == ctx.window) {
      terminal = state;
      break;
    }
    const std::size_t ci = state % ncells;
    const Cell c = map.cell_of_index(ci);
    const int tick = ctx.start_tick + layer;
    for (int k = 0; k < 5; ++k) {
      const Cell n = k == 4 ? c : step(c, kSteps[k]);
      if (!map.standable(n)) continue;
      if (!(n == c) && !may_cross(map, n, agent.goal, agent.start)) continue;
      const std::size_t ni = map.index(n);
      if (h[ni] == kUnreachable) continue;
      if (ctx.reservations.move_blocked(c, n, tick)) continue;
      if (!ctx.held.empty() && held_cell(ctx.held, n)) continue;
      const int cost = (n == c && c == agent.goal) ? 0 : 1;
      const auto ns = state_of(layer + 1, ni);
      const int ng = g[state] + cost;
      if (ng < g[ns]) {
        g[ns] = ng;
        parent[ns] = state;
        open.emplace(ng + h[ni], h[ni], -(layer + 1), ns);
      }
    }
  }
  if (!terminal) return std::nullopt;

  TimedPath path;
  path.agent = agent.id;
  path.goal = agent.goal;
  path.cells.resize(static_cast<std::size_t>(layers));
  std::uint32_t s = *terminal;
  for (int layer = ctx.window; layer >= 0; --layer) {
    path.cells[layer] = {map.cell_of_index(s % ncells), ctx.start_tick + layer};
    s = parent[s];
  }
  const bool moved = std::any_of(path.cells.begin(), path.cells.end(),
                                 [&](const TimedCell& tc) { return !(tc.cell == agent.start); });
  path.stuck = !moved && !(agent.start == agent.goal);
  return path;
}

struct AttemptResult {
  std::vector<TimedPath> paths;  // in planning order
  std::optional<std::size_t> failed;  // position in order
};

AttemptResult plan_in_order(const std::vector<const AgentRequest*>& order, const GridMap& map,
                            ReservationTable& table, int window, int start_tick, bool conservative) {
  AttemptResult result;
  std::vector<Cell> held;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (conservative) {
      held.clear();
      for (std::size_t j = i + 1; j < order.size(); ++j) held.push_back(order[j]->start);
    }
    const SearchContext ctx{map, table, held, window, start_tick};
    auto path = search_agent(*order[i], ctx);
    if (!path) {
      result.failed = i;
      if (!conservative) return result;
      // Only reachable when an external reservation sits on the agent's own cell.
      TimedPath wait;
      wait.agent = order[i]->id;
      wait.goal = order[i]->goal;
      for (int t = 0; t <= window; ++t) wait.cells.push_back({order[i]->start, start_tick + t});
      wait.stuck = true;
      path = std::move(wait);
    }
    table.reserve_path(*path);
    result.paths.push_back(std::move(*path));
  }
  return result;
}

}  // namespace

std::vector<TimedPath> plan_window(std::span<const AgentRequest> agents, const GridMap& map,
                                   ReservationTable& reservations, int window, int start_tick) {
  if (window < 1) throw ValidationError("window must be at least 1");
  for (const auto& a : agents) {
    if (!map.standable(a.start)) throw ValidationError("agent " + a.id + " starts on a blocked cell");
  }
  std::vector<const AgentRequest*> order;
  for (const auto& a : agents) order.push_back(&a);
  std::stable_sort(order.begin(), order.end(), [](const AgentRequest* a, const AgentRequest* b) {
    return a->priority < b->priority;
  });

  auto to_input_order = [&](std::vector<TimedPath> planned) {
    std::vector<TimedPath> out;
    out.reserve(planned.size());
    for (const auto& a : agents) {
      for (auto& p : planned) {
        if (p.agent == a.id && !p.cells.empty()) {
          out.push_back(std::move(p));
          p.cells.clear();
          break;
        }
      }
    }
    return out;
  };

  for (std::size_t attempt = 0; attempt <= order.size(); ++attempt) {
    ReservationTable table = reservations;
    auto result = plan_in_order(order, map, table, window, start_tick, false);
    if (!result.failed) {
      reservations = std::move(table);
      return to_input_order(std::move(result.paths));
    }
    const auto* failing = order[*result.failed];
    if (*result.failed == 0) break;  // already first; promotion cannot help
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(*result.failed));
    order.insert(order.begin(), failing);
  }

  std::stable_sort(order.begin(), order.end(), [](const AgentRequest* a, const AgentRequest* b) {
    return a->priority < b->priority;
  });
  ReservationTable table = reservations;
  auto result = plan_in_order(order, map, table, window, start_tick, true);
  reservations = std::move(table);
  return to_input_order(std::move(result.paths));
}

std::optional<Conflict> validate_no_conflicts(std::span<const TimedPath> paths) {
  std::optional<Conflict> first;
  auto consider = [&first](Conflict c) {
    if (!first || c.tick < first->tick) first = std::move(c);
  };
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      const auto& a = paths[i];
      const auto& b = paths[j];
      if (a.cells.empty() || b.cells.empty()) continue;
      const int lo = std::max(a.cells.front().tick, b.cells.front().tick);
      const int hi = std::min(a.cells.back().tick, b.cells.back().tick);
      for (int t = lo; t <= hi; ++t) {
        const Cell ca = a.cell_at_tick(t), cb = b.cell_at_tick(t);
        if (ca == cb) {
          consider({Conflict::Type::Vertex, a.agent, b.agent, ca, cb, t});
          break;
        }
        if (t < hi) {
          const Cell na = a.cell_at_tick(t + 1), nb = b.cell_at_tick(t + 1);
          if (na == cb && nb == ca && !(ca == na)) {
            consider({Conflict::Type::Edge, a.agent, b.agent, ca, cb, t});
            break;
          }
        }
      }
    }
  }
  return first;
}

}  // namespace populace
