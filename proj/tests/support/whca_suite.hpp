#pragma once

// Closed-loop randomized WHCA* run shared by the nav-grid tests and the acceptance binary.
// Agents execute the first `period` ticks of each window, then everyone replans with a fresh
// reservation table, which is how the simulation drives the planner.

#include <chrono>
#include <string>
#include <vector>

#include "support/fixtures.hpp"

namespace populace::testing {

struct WhcaSuiteResult {
  int maps = 0;
  int windows = 0;
  int conflicting_windows = 0;    // library validator or the exhaustive oracle found a conflict
  int cell_violations = 0;        // blocked cells, foreign seats, jumps, tick gaps
  int reachable_agents = 0;
  int reached_agents = 0;
  double seconds = 0.0;
  std::vector<std::string> failures;  // first few diagnostics
};

inline WhcaSuiteResult run_whca_suite(std::uint64_t seed, int maps = 100, int size = 32, int window = 16,
                                      int period = 8) {
  WhcaSuiteResult r;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  for (int m = 0; m < maps; ++m) {
    ++r.maps;
    const GridMap map = random_map(rng, size, size, 0.2, 0.02);
    std::vector<Cell> free;
    for (std::size_t i = 0; i < map.cell_count(); ++i) {
      if (map.traversable(map.cell_of_index(i))) free.push_back(map.cell_of_index(i));
    }
    const int n = rng.integer(2, 8);
    std::shuffle(free.begin(), free.end(), rng.engine());
    if (static_cast<int>(free.size()) < 2 * n) continue;
    std::vector<AgentRequest> agents;
    std::vector<bool> reachable;
    for (int a = 0; a < n; ++a) {
      AgentRequest req{"a" + std::to_string(a), free[2 * a], free[2 * a + 1], a};
      const auto d = bfs_oracle(map, req.goal, req.start);
      reachable.push_back(d[map.index(req.start)] != kUnreachable);
      agents.push_back(req);
    }
    const int budget = (map.width() + map.height()) * n;
    std::vector<bool> reached(n, false);
    for (int tick = 0; tick < budget; tick += period) {
      ReservationTable table;
      const auto paths = plan_window(agents, map, table, window, tick);
      ++r.windows;
      const bool lib_conflict = validate_no_conflicts(paths).has_value();
      const int oracle_conflicts = count_conflicts(paths);
      if (lib_conflict || oracle_conflicts > 0) {
        ++r.conflicting_windows;
        if (r.failures.size() < 5) {
          r.failures.push_back("map " + std::to_string(m) + " tick " + std::to_string(tick) + ": " +
                               std::to_string(oracle_conflicts) + " conflicts");
        }
      }
      for (const auto& p : paths) {
        const int v = count_cell_violations(map, p);
        r.cell_violations += v;
        if (v > 0 && r.failures.size() < 5) r.failures.push_back("map " + std::to_string(m) + ": " + p.agent + " violation");
      }
      bool all = true;
      for (int a = 0; a < n; ++a) {
        agents[a].start = paths[a].cell_at_tick(tick + period);
        // Reaching the goal at any executed tick counts, even if the agent later steps aside.
        for (int t = tick; t <= tick + period; ++t) {
          if (paths[a].cell_at_tick(t) == agents[a].goal) reached[a] = true;
        }
        if (reachable[a] && !reached[a]) all = false;
      }
      if (all) break;
    }
    for (int a = 0; a < n; ++a) {
      if (!reachable[a]) continue;
      ++r.reachable_agents;
      if (reached[a]) {
        ++r.reached_agents;
      } else if (r.failures.size() < 5) {
        r.failures.push_back("map " + std::to_string(m) + ": " + agents[a].id + " never reached its goal");
      }
    }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace populace::testing
