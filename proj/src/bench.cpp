#include "populace/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "populace/errors.hpp"

namespace populace::bench {

namespace {

bool two_anchor(AreaKind k) { return k == AreaKind::Between || k == AreaKind::AlignedWith; }

std::vector<std::string> string_list(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const auto& v = doc.at(key);
  if (!v.is_array()) throw SchemaError(std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw SchemaError(std::string(key) + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::optional<Vec2> point(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) return std::nullopt;
  const auto& v = doc.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw SchemaError(std::string(key) + " must be [x, y]");
  }
  return Vec2{v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

AreaExpr AreaExpr::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("area expression must be an object");
  AreaExpr e;
  for (auto [key, op] : {std::pair{"union", Op::Union}, std::pair{"intersection", Op::Intersection}}) {
    if (!doc.contains(key)) continue;
    const auto& args = doc.at(key);
    if (!args.is_array() || args.empty()) throw SchemaError(std::string(key) + " needs a nonempty array");
    e.op = op;
    for (const auto& a : args) e.args.push_back(from_json(a));
    return e;
  }
  if (!doc.contains("area") || !doc["area"].is_string()) throw SchemaError("area expression needs \"area\"");
  const auto kind = area_kind_from_string(doc["area"].get<std::string>());
  if (!kind || *kind == AreaKind::Intersection || *kind == AreaKind::Union || *kind == AreaKind::Explicit) {
    throw SchemaError("unknown area constructor: " + doc["area"].get<std::string>());
  }
  e.kind = *kind;
  if (doc.contains("anchor")) {
    if (!doc["anchor"].is_string()) throw SchemaError("anchor must be a string");
    e.anchors.push_back(doc["anchor"].get<std::string>());
  }
  for (auto& a : string_list(doc, "anchors")) e.anchors.push_back(std::move(a));
  if (e.anchors.size() != (two_anchor(e.kind) ? 2u : 1u)) {
    throw SchemaError(std::string("wrong number of anchors for ") + to_string(e.kind));
  }
  return e;
}

nlohmann::json AreaExpr::to_json() const {
  if (op != Op::Leaf) {
    nlohmann::json args_json = nlohmann::json::array();
    for (const auto& a : args) args_json.push_back(a.to_json());
    return {{op == Op::Union ? "union" : "intersection", args_json}};
  }
  if (anchors.size() == 1) return {{"area", to_string(kind)}, {"anchor", anchors[0]}};
  return {{"area", to_string(kind)}, {"anchors", anchors}};
}

Area AreaExpr::evaluate(const SceneGraph& graph, const AreaParams& params) const {
  switch (op) {
    case Op::Leaf:
      return anchors.size() == 1 ? make_area(kind, anchors[0], graph, params)
                                 : make_area(kind, anchors[0], anchors[1], graph, params);
    case Op::Union:
    case Op::Intersection: {
      Area acc = args.at(0).evaluate(graph, params);
      for (std::size_t i = 1; i < args.size(); ++i) {
        const Area next = args[i].evaluate(graph, params);
        acc = op == Op::Union ? union_areas(acc, next) : intersect_areas(acc, next);
      }
      return acc;
    }
  }
  return {};
}

TestCase TestCase::from_json(const nlohmann::json& doc) {
  try {
    TestCase tc;
    tc.id = doc.at("id").get<std::string>();
    tc.scene = doc.at("scene").get<std::string>();
    tc.characters = string_list(doc, "characters");
    if (tc.characters.empty()) throw SchemaError("case " + tc.id + " has no characters");
    tc.scenario = doc.value("scenario", std::string());
    if (doc.contains("history")) {
      for (const auto& h : doc.at("history")) {
        HistoryRecord r;
        r.description = h.at("description").get<std::string>();
        r.status = h.at("status").get<std::string>();
        if (r.status != "ongoing" && r.status != "completed") {
          throw SchemaError("history status must be \"ongoing\" or \"completed\"");
        }
        r.participants = string_list(h, "participants");
        if (h.contains("grounding")) {
          for (const auto& g : h.at("grounding")) {
            HistoryGrounding hg;
            hg.character = g.at("character").get<std::string>();
            hg.action = g.at("action").get<std::string>();
            hg.position = point(g, "position");
            if (g.contains("area")) hg.area = AreaExpr::from_json(g.at("area"));
            r.grounding.push_back(std::move(hg));
          }
        }
        tc.history.push_back(std::move(r));
      }
    }
    const auto& expected = doc.at("expected");
    tc.expected_actions = string_list(expected, "actions");
    tc.expected_area = AreaExpr::from_json(expected.at("area"));
    for (const auto& t : string_list(doc, "tags")) {
      const auto tag = llm::tag_from_string(t);
      if (!tag) throw SchemaError("unknown tag: " + t);
      tc.tags.push_back(*tag);
    }
    tc.coordinate_level = doc.value("coordinate_level", false);
    tc.mock = doc.value("mock", tc.id + ".json");
    return tc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed test case: ") + e.what());
  }
}

TestCase load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open test case: " + path.string());
  try {
    return TestCase::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::vector<TestCase> load_cases(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TestCase> out;
  for (const auto& f : files) out.push_back(load_case(f));
  return out;
}

const char* to_string(Failure f) {
  switch (f) {
    case Failure::NoPlan: return "NoPlan";
    case Failure::BadAction: return "BadAction";
    case Failure::BadPosition: return "BadPosition";
    case Failure::RuntimeError: return "RuntimeError";
  }
  return "?";
}

bool area_subset(const Area& inner, const Area& outer, double step) {
  if (step <= 0) throw ValidationError("probe step must be positive");
  // Probes on inner may sit on a shared clipped edge; the outer test is a hair more lenient.
  constexpr double kInnerEps = 0.0;
  constexpr double kOuterEps = 1e-7;
  for (const auto& poly : inner.polygons) {
    if (!outer.contains(poly.centroid(), kOuterEps)) return false;
  }
  if (inner.empty()) return true;
  const Aabb2 box = inner.bounds();
  const auto nx = static_cast<long>(std::ceil((box.max.x - box.min.x) / step));
  const auto ny = static_cast<long>(std::ceil((box.max.y - box.min.y) / step));
  for (long j = 0; j < std::max(ny, 1L); ++j) {
    for (long i = 0; i < std::max(nx, 1L); ++i) {
      const Vec2 p{box.min.x + (i + 0.5) * step, box.min.y + (j + 0.5) * step};
      if (inner.contains(p, kInnerEps) && !outer.contains(p, kOuterEps)) return false;
    }
  }
  return true;
}

RunResult judge(const std::optional<GeneratedPlan>& plan, const std::vector<std::string>& expected_actions,
                const Area& expected_area, const std::vector<std::string>& scene_actions, bool coordinate_level,
                double probe_step) {
  RunResult r;
  r.executed = true;
  r.plan = plan;
  if (!plan) {
    r.failure = Failure::NoPlan;
    r.detail = "no plan for the target character";
    return r;
  }
  const auto in = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  if (!in(scene_actions, plan->action) || !in(expected_actions, plan->action)) {
    r.failure = Failure::BadAction;
    r.detail = "action " + plan->action + " is not expected or not available";
    return r;
  }
  bool inside = false;
  if (const auto* p = std::get_if<Vec2>(&plan->position)) {
    inside = expected_area.contains(*p, 1e-7);
  } else {
    const auto& area = std::get<Area>(plan->position);
    inside = coordinate_level ? false : area_subset(area, expected_area, probe_step);
  }
  if (!inside) {
    r.failure = Failure::BadPosition;
    r.detail = "position outside the expected area";
    return r;
  }
  r.passed = true;
  return r;
}

std::vector<std::string> load_descriptions(const std::filesystem::path& dir, const std::string& scene) {
  std::vector<std::string> out;
  for (int k = 0;; ++k) {
    std::ifstream in(dir / (scene + "_" + std::to_string(k) + ".txt"));
    if (!in) break;
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(ss.str());
  }
  if (out.empty()) throw SchemaError("no pre-generated description for scene " + scene);
  return out;
}

namespace {

RunResult run_trial(const TestCase& tc, CaseContext& ctx, int trial) {
  const SceneGraph& graph = *ctx.graph;
  sim::SimConfig config = ctx.sim;
  config.seed = static_cast<std::uint64_t>(trial) + 1;
  auto spawns = sim::default_spawns(graph, config.grid, tc.characters, config.seed);
  sim::World world(graph, std::move(spawns), config);

  // Ongoing history events put their participants to work before planning starts.
  std::vector<llm::HistoryEntry> history;
  for (const auto& h : tc.history) {
    history.push_back({h.description, h.status, h.participants});
    if (h.status != "ongoing") continue;
    std::set<Cell> taken;
    for (const auto& c : world.characters()) taken.insert(c.cell);
    std::vector<sim::Grounding> grounding;
    for (const auto& g : h.grounding) {
      sim::Grounding sg;
      sg.character = g.character;
      sg.action = g.action;
      if (g.area) {
        sg.target.position = sample_position(g.area->evaluate(graph, config.area), world.grid(), taken, 0);
      } else if (g.position) {
        sg.target.position = *g.position;
      } else {
        sg.target.position = world.grid().center(world.character(g.character).cell);
      }
      const auto cell = world.grid().cell_at(sg.target.position);
      if (!cell) throw ValidationError("history position outside the map in case " + tc.id);
      taken.insert(*cell);
      if (const auto* owner = world.grid().endpoint_owner(*cell)) sg.target.overlaps_object = *owner;
      grounding.push_back(std::move(sg));
    }
    for (const auto& p : h.participants) {
      const bool placed = std::any_of(grounding.begin(), grounding.end(),
                                      [&](const sim::Grounding& g) { return g.character == p; });
      if (!placed) {
        sim::Grounding sg{p, {world.grid().center(world.character(p).cell), std::nullopt, std::nullopt}, "idle"};
        if (!graph.actions().empty()) sg.action = graph.actions().front();
        grounding.push_back(std::move(sg));
      }
    }
    world.assign_event(h.description, grounding);
  }

  llm::PromptBundle bundle;
  bundle.description = ctx.descriptions.at(static_cast<std::size_t>(trial) % ctx.descriptions.size());
  bundle.history = std::move(history);
  bundle.idle = world.needs_new_event();
  for (const auto& c : world.characters()) {
    bundle.characters.push_back({c.name, c.motion.pose().root_pos, c.event_id.has_value()});
  }
  if (!tc.scenario.empty()) bundle.instructions.push_back(tc.scenario);
  bundle.example_tags = tc.tags;

  const std::string& target = tc.characters.front();
  const llm::NarrationResult narration = llm::narrate(bundle, *ctx.backend, ctx.examples, ctx.planning);
  if (std::find(narration.participants.begin(), narration.participants.end(), target) ==
      narration.participants.end()) {
    RunResult r = judge(std::nullopt, {}, {}, {}, false, 1.0);
    r.detail = "first generated event does not involve " + target;
    return r;
  }
  std::vector<sim::Grounding> grounding;
  const auto parsed = llm::parse_event(
      bundle, narration.event, world.script_world(), *ctx.backend,
      [&](const script::ExecOutcome& o) { grounding = world.ground(o, config.seed); }, ctx.examples, ctx.planning);

  std::optional<GeneratedPlan> plan;
  for (std::size_t i = 0; i < parsed.outcome.plans.size(); ++i) {
    const auto& p = parsed.outcome.plans[i];
    if (p.character != target) continue;
    if (tc.coordinate_level) {
      plan = GeneratedPlan{p.action, grounding.at(i).target.position};
    } else if (const auto* area = std::get_if<Area>(&p.position)) {
      plan = GeneratedPlan{p.action, *area};
    } else {
      plan = GeneratedPlan{p.action, std::get<Vec2>(p.position)};
    }
  }
  const Area expected = tc.expected_area.evaluate(graph, config.area);
  return judge(plan, tc.expected_actions, expected, graph.actions(), tc.coordinate_level,
               config.grid.cell_size / 2.0);
}

}  // namespace

std::vector<RunResult> run_case(const TestCase& tc, CaseContext& ctx, int repeats) {
  if (!ctx.graph || !ctx.backend) throw ValidationError("case context needs a scene and a backend");
  if (ctx.descriptions.empty()) throw ValidationError("case context needs at least one description");
  std::vector<RunResult> out;
  for (int k = 0; k < repeats; ++k) {
    ctx.backend->begin_trial(k);
    RunResult r;
    try {
      r = run_trial(tc, ctx, k);
    } catch (const PlanningError& e) {
      r = RunResult{};
      r.executed = true;
      r.failure = Failure::NoPlan;
      r.detail = e.what();
    } catch (const Error& e) {
      // Script failures, grounding failures and backend failures all count as not executed.
      r = RunResult{};
      r.failure = Failure::RuntimeError;
      r.detail = e.what();
    }
    r.trial = k;
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, Tally> tally(const std::vector<CaseResult>& results) {
  std::map<std::string, Tally> out;
  for (const auto& cr : results) {
    Tally t;
    for (const auto& r : cr.runs) {
      ++t.runs;
      t.passed += r.passed ? 1 : 0;
      t.executed += r.executed ? 1 : 0;
    }
    out["Total"] += t;
    std::set<llm::Tag> seen(cr.tags.begin(), cr.tags.end());
    for (llm::Tag tag : seen) out[llm::to_string(tag)] += t;
  }
  return out;
}

std::string format_rate(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "-";
  const std::uint64_t hundredths = (200 * num + den) / (2 * den);
  const std::uint64_t whole = hundredths / 100;
  const std::uint64_t frac = hundredths % 100;
  std::string out = std::to_string(whole) + ".";
  if (frac % 10 == 0) return out + std::to_string(frac / 10);
  return out + (frac < 10 ? "0" : "") + std::to_string(frac);
}

std::string format_cell(const Tally& t) {
  return format_rate(t.passed, t.runs) + " (" + format_rate(t.executed, t.runs) + ")";
}

std::string report_table(const std::vector<CaseResult>& results, const std::string& label) {
  static const char* kColumns[] = {"Total", "OA", "RC", "SS", "PI"};
  std::ostringstream out;
  out << "Metrics";
  for (const char* c : kColumns) out << " | " << c;
  out << '\n';
  if (results.empty()) return out.str();
  const auto t = tally(results);
  out << label;
  for (const char* c : kColumns) {
    const auto it = t.find(c);
    out << " | " << (it == t.end() ? std::string("-") : format_cell(it->second));
  }
  out << '\n';
  return out.str();
}

std::string report_rows(const std::vector<CaseResult>& results) {
  std::string out;
  for (const auto& cr : results) {
    nlohmann::json tags = nlohmann::json::array();
    for (auto t : cr.tags) tags.push_back(llm::to_string(t));
    for (const auto& r : cr.runs) {
      nlohmann::json row = {{"case", cr.id},     {"tags", tags},         {"trial", r.trial},
                            {"executed", r.executed}, {"passed", r.passed}, {"detail", r.detail}};
      row["failure"] = r.failure ? nlohmann::json(to_string(*r.failure)) : nlohmann::json(nullptr);
      if (r.plan) {
        row["action"] = r.plan->action;
        if (const auto* p = std::get_if<Vec2>(&r.plan->position)) row["position"] = {p->x, p->y};
      }
      out += row.dump() + "\n";
    }
  }
  return out;
}

std::vector<CaseResult> run_benchmark(const std::vector<TestCase>& cases, const BenchConfig& config) {
  std::map<std::string, SceneGraph> scenes;
  std::map<std::string, std::vector<std::string>> descriptions;
  std::vector<CaseResult> out;
  for (const auto& tc : cases) {
    if (!scenes.contains(tc.scene)) {
      scenes.emplace(tc.scene, build_scene_graph(load_scene(config.data_dir / "scenes" / (tc.scene + ".json"))));
      descriptions.emplace(tc.scene, load_descriptions(config.data_dir / "descriptions", tc.scene));
    }
    std::unique_ptr<llm::ChatBackend> backend;
    if (config.backend == BackendKind::Mock) {
      backend = std::make_unique<llm::MockBackend>(llm::MockBackend::load(config.data_dir / "mocks" / tc.mock));
    } else {
      backend = std::make_unique<llm::RemoteBackend>(config.remote);
    }
    CaseContext ctx;
    ctx.graph = &scenes.at(tc.scene);
    ctx.descriptions = descriptions.at(tc.scene);
    ctx.backend = backend.get();
    out.push_back({tc.id, tc.tags, run_case(tc, ctx, config.repeats)});
  }
  return out;
}

}  // namespace populace::bench
