#include "populace/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "populace/errors.hpp"

namespace populace::sim {

const char* to_string(Fsm state) {
  switch (state) {
    case Fsm::Idle: return "idle";
    case Fsm::Approaching: return "approaching";
    case Fsm::TransitionIn: return "transition_in";
    case Fsm::Interacting: return "interacting";
    case Fsm::TransitionOut: return "transition_out";
  }
  return "?";
}

const char* to_string(EventStatus status) { return status == EventStatus::Ongoing ? "ongoing" : "completed"; }

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  x ^= x >> 31;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 29;
  return x;
}

Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }

bool needs_build(const SceneGraph& g) {
  return std::any_of(g.objects().begin(), g.objects().end(),
                     [](const SceneObject& o) { return !o.support.assigned(); });
}

}  // namespace

World::World(SceneGraph graph, std::vector<CharacterSpawn> spawns, SimConfig config,
             std::shared_ptr<const motion::MotionLibrary> library)
    : graph_(needs_build(graph) ? build_scene_graph(std::move(graph), config.area.graph) : std::move(graph)),
      config_(std::move(config)),
      regions_(cluster_regions(graph_, 1.0, 2)),
      grid_(build_grid_map(graph_, config_.grid)),
      library_(std::move(library)) {
  if (config_.frames_per_grid_tick < 1 || config_.window < 1 || config_.replan_period < 1) {
    throw ValidationError("grid tick, window, and replan period must be positive");
  }
  if (!library_) {
    library_ = std::make_shared<motion::MotionLibrary>(
        motion::build_library(motion::generate_synthetic_clips(graph_.actions(), config_.seed)));
  }
  const auto idle = library_->find(motion::kIdle);
  std::set<Cell> taken;
  for (const auto& spawn : spawns) {
    const auto cell = grid_.cell_at(spawn.position);
    if (!cell || !grid_.traversable(*cell)) {
      throw ValidationError("spawn of " + spawn.name + " is not on a free cell");
    }
    if (!taken.insert(*cell).second) throw ValidationError("spawn of " + spawn.name + " shares a cell");
    for (const auto& other : characters_) {
      if (other.name == spawn.name) throw ValidationError("duplicate character name: " + spawn.name);
    }
    motion::Pose pose;
    if (idle != library_->end() && !idle->second.clips().empty()) pose = idle->second.clips()[0].frames[0];
    pose.root_pos = grid_.center(*cell);
    pose.heading = normalized(spawn.heading).value_or(Vec2{1.0, 0.0});
    Character c;
    c.name = spawn.name;
    c.motion = motion::MotionController(pose);
    c.cell = *cell;
    characters_.push_back(std::move(c));
  }
}

const Character& World::character(const std::string& name) const {
  for (const auto& c : characters_) {
    if (c.name == name) return c;
  }
  throw ValidationError("unknown character: " + name);
}

Character& World::mutable_character(const std::string& name) {
  return const_cast<Character&>(std::as_const(*this).character(name));
}

const Event& World::event(int id) const {
  if (id < 1 || static_cast<std::size_t>(id) > events_.size()) throw ValidationError("unknown event id");
  return events_[static_cast<std::size_t>(id - 1)];
}

Event& World::mutable_event(int id) { return const_cast<Event&>(std::as_const(*this).event(id)); }

std::vector<std::string> World::needs_new_event() const {
  std::vector<std::string> out;
  for (const auto& c : characters_) {
    if (!c.event_id) out.push_back(c.name);
  }
  return out;
}

int World::action_frames(const std::string& action) const {
  const auto it = config_.action_frames.find(action);
  return it == config_.action_frames.end() ? config_.default_action_frames : it->second;
}

script::ScriptWorld World::script_world() const {
  script::ScriptWorld sw;
  sw.graph = &graph_;
  for (const auto& c : characters_) sw.characters.push_back({c.name, c.motion.pose().root_pos});
  for (const auto& [object, who] : occupancy_) sw.occupied_objects.insert(object);
  sw.area_params = config_.area;
  return sw;
}

std::vector<Grounding> World::ground(const script::ExecOutcome& outcome, std::uint64_t seed) const {
  const auto& actions = graph_.actions();
  std::set<Cell> occupied;
  auto occupy_seat = [&](const std::string& owner) {
    for (std::size_t i = 0; i < grid_.cell_count(); ++i) {
      const Cell c = grid_.cell_of_index(i);
      if (const auto* o = grid_.endpoint_owner(c); o && *o == owner) occupied.insert(c);
    }
  };
  for (const auto& c : characters_) {
    occupied.insert(c.cell);
    if (c.event_id) occupied.insert(grid_.cell_at(grounding_of(c).target.position).value_or(c.cell));
  }
  for (const auto& [object, who] : occupancy_) occupy_seat(object);

  std::vector<Grounding> out;
  for (std::size_t i = 0; i < outcome.plans.size(); ++i) {
    const auto& plan = outcome.plans[i];
    const Character& who = character(plan.character);
    if (who.event_id) throw CharacterBusy(plan.character);
    if (!actions.empty() && std::find(actions.begin(), actions.end(), plan.action) == actions.end()) {
      throw UnknownAction(plan.action);
    }
    for (const auto& g : out) {
      if (g.character == plan.character) throw ValidationError("character appears twice: " + plan.character);
    }

    std::set<Cell> occ = occupied;
    occ.erase(who.cell);
    Grounding g;
    g.character = plan.character;
    g.action = plan.action;
    const Area* area = std::get_if<Area>(&plan.position);
    if (area) {
      g.target.position = sample_position(*area, grid_, occ, mix(seed, i));
    } else {
      const Vec2 p = std::get<Vec2>(plan.position);
      const auto cell = grid_.cell_at(p);
      if (!cell || !grid_.standable(*cell) || occ.contains(*cell)) {
        throw NoFreeSpace("explicit position is not a free cell");
      }
      g.target.position = p;
    }
    const Cell cell = *grid_.cell_at(g.target.position);
    occupied.insert(cell);
    if (const auto* owner = grid_.endpoint_owner(cell)) {
      g.target.overlaps_object = *owner;
      occupy_seat(*owner);
    }

    std::optional<Vec2> face;
    if (plan.orientation) {
      switch (plan.orientation->kind) {
        case script::OrientationRequest::Kind::Object:
          face = graph_.at(plan.orientation->ref).box.center.xy();
          break;
        case script::OrientationRequest::Kind::Character: {
          const auto mate = std::find_if(out.begin(), out.end(),
                                         [&](const Grounding& m) { return m.character == plan.orientation->ref; });
          const bool later = std::any_of(outcome.plans.begin() + static_cast<long>(i) + 1, outcome.plans.end(),
                                         [&](const auto& p) { return p.character == plan.orientation->ref; });
          if (mate != out.end()) {
            face = mate->target.position;
          } else if (!later) {
            face = character(plan.orientation->ref).motion.pose().root_pos;
          }
          // A partner planned later is resolved in the second pass below.
          break;
        }
        case script::OrientationRequest::Kind::Point: face = plan.orientation->point; break;
      }
      if (face) g.target.orientation = resolve_orientation(g.target.position, face, std::nullopt);
    } else if (g.target.overlaps_object) {
      g.target.orientation = estimate_orientation(graph_.at(*g.target.overlaps_object), graph_, config_.area.graph);
    } else if (area && area->kind == AreaKind::InteractWith && area->anchor_id) {
      const Vec2 anchor = graph_.at(*area->anchor_id).box.center.xy();
      if (norm(anchor - g.target.position) > 1e-6) {
        g.target.orientation = resolve_orientation(g.target.position, anchor, std::nullopt);
      }
    }
    out.push_back(std::move(g));
  }
  // Facing a partner whose target was sampled after ours.
  for (std::size_t i = 0; i < outcome.plans.size(); ++i) {
    const auto& req = outcome.plans[i].orientation;
    if (!req || req->kind != script::OrientationRequest::Kind::Character || out[i].target.orientation) continue;
    for (const auto& m : out) {
      if (m.character == req->ref) {
        out[i].target.orientation = resolve_orientation(out[i].target.position, m.target.position, std::nullopt);
      }
    }
  }
  return out;
}

const Event& World::assign_event(const std::string& description, const std::vector<Grounding>& grounding) {
  if (description.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ValidationError("event description is empty");
  }
  if (grounding.empty()) throw ValidationError("event has no participants");
  const auto& actions = graph_.actions();
  std::set<std::string> seen;
  for (const auto& g : grounding) {
    const Character& c = character(g.character);
    if (c.event_id) throw CharacterBusy(g.character);
    if (!seen.insert(g.character).second) throw ValidationError("character appears twice: " + g.character);
    if (!actions.empty() && std::find(actions.begin(), actions.end(), g.action) == actions.end()) {
      throw UnknownAction(g.action);
    }
    if (g.target.overlaps_object && occupancy_.contains(*g.target.overlaps_object)) {
      throw NoFreeSpace("seat already claimed: " + *g.target.overlaps_object);
    }
    const auto cell = grid_.cell_at(g.target.position);
    if (!cell || !grid_.standable(*cell)) throw NoFreeSpace("target of " + g.character + " is not standable");
  }

  Event e;
  e.id = static_cast<int>(events_.size()) + 1;
  e.description = description;
  e.grounding = grounding;
  e.done.assign(grounding.size(), false);
  e.created_frame = frame_;
  for (const auto& g : grounding) {
    e.participants.push_back(g.character);
    Character& c = mutable_character(g.character);
    c.event_id = e.id;
    c.arrived = false;
    c.arrival_frame.reset();
    c.path.reset();
    c.stuck = false;
    c.priority_boost = 0;
    c.last_goal_distance = kUnreachable;
    if (g.target.overlaps_object) {
      occupancy_[*g.target.overlaps_object] = g.character;
      c.claimed = g.target.overlaps_object;
    }
    set_state(c, Fsm::Approaching);
  }
  events_.push_back(e);
  replan_needed_ = true;

  nlohmann::json parts = nlohmann::json::array();
  for (const auto& g : grounding) {
    nlohmann::json p = {{"character", g.character},
                        {"action", g.action},
                        {"position", {round4(g.target.position.x), round4(g.target.position.y)}}};
    if (g.target.orientation) p["orientation"] = {round4(g.target.orientation->x), round4(g.target.orientation->y)};
    if (g.target.overlaps_object) p["seat"] = *g.target.overlaps_object;
    parts.push_back(std::move(p));
  }
  trace({{"type", "event"},
         {"frame", frame_},
         {"event", e.id},
         {"status", "ongoing"},
         {"description", description},
         {"participants", e.participants},
         {"grounding", parts}});
  return events_.back();
}

void World::inject_instruction(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("instruction is empty");
  instructions_.push_back(text);
  trace({{"type", "instruction"}, {"frame", frame_}, {"text", text}});
}

std::vector<std::string> World::take_instructions() {
  std::vector<std::string> out(instructions_.begin(), instructions_.end());
  instructions_.clear();
  return out;
}

void World::trace(nlohmann::json record) {
  trace_.push_back(record.dump());
  if (sink_) *sink_ << trace_.back() << '\n';
}

void World::set_state(Character& c, Fsm next) {
  if (c.fsm == next) return;
  nlohmann::json rec = {{"type", "state"},
                        {"frame", frame_},
                        {"character", c.name},
                        {"from", to_string(c.fsm)},
                        {"to", to_string(next)}};
  if (c.event_id) rec["event"] = *c.event_id;
  c.fsm = next;
  trace(std::move(rec));
}

const Grounding& World::grounding_of(const Character& c) const {
  const Event& e = event(*c.event_id);
  for (const auto& g : e.grounding) {
    if (g.character == c.name) return g;
  }
  throw ValidationError("character missing from its event");
}

void World::replan() {
  const int fpt = config_.frames_per_grid_tick;
  const std::uint64_t tick_now = frame_ / static_cast<std::uint64_t>(fpt);
  ReservationTable table;
  std::vector<AgentRequest> agents;
  std::vector<std::size_t> who;
  for (std::size_t i = 0; i < characters_.size(); ++i) {
    Character& c = characters_[i];
    if (c.fsm != Fsm::Approaching) {
      table.reserve_stationary(c.cell, 0, config_.window);
      continue;
    }
    const Cell goal = *grid_.cell_at(grounding_of(c).target.position);
    const int dist = manhattan(c.cell, goal);
    // Characters that made no headway since the last plan go earlier this time.
    c.priority_boost = dist > 0 && dist >= c.last_goal_distance ? c.priority_boost + 1 : 0;
    c.last_goal_distance = dist;
    agents.push_back({c.name, c.cell, goal, static_cast<int>(i) - 1000 * c.priority_boost});
    who.push_back(i);
  }
  if (agents.empty()) return;
  const auto paths = plan_window(agents, grid_, table, config_.window, 0);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    Character& c = characters_[who[k]];
    c.path = paths[k];
    c.path_start_tick = tick_now;
    if (paths[k].stuck && !c.stuck) {
      trace({{"type", "stuck"}, {"frame", frame_}, {"character", c.name}});
    }
    c.stuck = paths[k].stuck;
  }
}

void World::advance_character(Character& c, std::size_t) {
  const int fpt = config_.frames_per_grid_tick;
  motion::MotionInput in;
  in.desired_root = c.motion.pose().root_pos;
  const Grounding* g = c.event_id ? &grounding_of(c) : nullptr;
  const bool seated = c.claimed && c.arrived;

  switch (c.fsm) {
    case Fsm::Approaching: {
      in.action = motion::kWalk;
      in.mode = motion::MatchMode::Locomotion;
      const Cell goal = *grid_.cell_at(g->target.position);
      if (c.path) {
        const double t = static_cast<double>(frame_) / fpt - static_cast<double>(c.path_start_tick);
        const int k = static_cast<int>(std::floor(t));
        const Vec2 a = grid_.center(c.path->cell_at_tick(k));
        const Vec2 b = grid_.center(c.path->cell_at_tick(k + 1));
        in.desired_root = lerp(a, b, t - k);
        motion::FutureTrajectory fut{};
        for (std::size_t j = 0; j < fut.size(); ++j) {
          const double tf = t + motion::kFutureOffsets[j] / static_cast<double>(fpt);
          const int kf = static_cast<int>(std::floor(tf));
          const Vec2 fa = grid_.center(c.path->cell_at_tick(kf));
          const Vec2 fb = grid_.center(c.path->cell_at_tick(kf + 1));
          fut[j].position = lerp(fa, fb, tf - kf);
          fut[j].direction = normalized(fb - fa).value_or(c.motion.pose().heading);
        }
        in.future = fut;
        if (c.path->cell_at_tick(k) == goal && c.path->cell_at_tick(k + 1) == goal) {
          in.desired_root = g->target.position;
          in.desired_heading = g->target.orientation;
        }
      }
      const motion::Pose& pose = c.motion.advance(*library_, in);
      const bool in_place = c.cell == goal && norm(pose.root_pos - g->target.position) <= 0.5 * grid_.cell_size();
      const bool facing = !g->target.orientation ||
                          angle_between(pose.heading, *g->target.orientation) <= config_.arrival_angle;
      if (in_place && facing) {
        c.arrived = true;
        c.arrival_frame = frame_;
        c.path.reset();
        trace({{"type", "arrival"}, {"frame", frame_}, {"character", c.name}, {"event", *c.event_id}});
        if (g->target.overlaps_object) {
          c.state_frames_left = config_.transition_frames;
          set_state(c, Fsm::TransitionIn);
        } else {
          set_state(c, Fsm::Idle);
        }
      }
      return;
    }
    case Fsm::TransitionIn:
      in.action = motion::kSitDown;
      in.mode = motion::MatchMode::Interaction;
      in.sitting = true;
      in.desired_root = g->target.position;
      in.desired_heading = g->target.orientation;
      in.target = motion::MotionTarget{g->target.position, g->target.orientation.value_or(c.motion.pose().heading),
                                       motion::kSeatedHeight};
      c.motion.advance(*library_, in);
      if (--c.state_frames_left <= 0) set_state(c, Fsm::Idle);
      return;
    case Fsm::TransitionOut:
      in.action = motion::kStandUp;
      in.mode = motion::MatchMode::Interaction;
      in.sitting = true;
      in.target = motion::MotionTarget{c.motion.pose().root_pos, c.motion.pose().heading, motion::kStandingHeight};
      c.motion.advance(*library_, in);
      if (--c.state_frames_left <= 0) {
        occupancy_.erase(*c.claimed);
        c.claimed.reset();
        Event& e = mutable_event(*c.event_id);
        for (std::size_t k = 0; k < e.participants.size(); ++k) {
          if (e.participants[k] == c.name) e.done[k] = true;
        }
        set_state(c, Fsm::Idle);
      }
      return;
    case Fsm::Interacting:
      in.action = g->action;
      in.mode = motion::MatchMode::InPlace;
      c.motion.advance(*library_, in);
      if (--c.state_frames_left <= 0) {
        if (seated) {
          c.state_frames_left = config_.transition_frames;
          set_state(c, Fsm::TransitionOut);
        } else {
          Event& e = mutable_event(*c.event_id);
          for (std::size_t k = 0; k < e.participants.size(); ++k) {
            if (e.participants[k] == c.name) e.done[k] = true;
          }
          set_state(c, Fsm::Idle);
        }
      }
      return;
    case Fsm::Idle:
      in.action = motion::kIdle;
      in.mode = motion::MatchMode::InPlace;
      if (g && c.arrived) in.desired_heading = g->target.orientation;
      c.motion.advance(*library_, in);
      return;
  }
}

void World::update_event(Event& e) {
  if (e.status != EventStatus::Ongoing) return;
  if (!e.interaction_frame) {
    // Group barrier: the shared clock starts once the last participant is in place.
    const bool ready = std::all_of(e.participants.begin(), e.participants.end(), [&](const std::string& n) {
      const Character& c = character(n);
      return c.arrived && c.fsm == Fsm::Idle;
    });
    if (!ready) return;
    int frames = 1;
    for (const auto& g : e.grounding) frames = std::max(frames, action_frames(g.action));
    e.interaction_frame = frame_;
    for (const auto& n : e.participants) {
      Character& c = mutable_character(n);
      c.state_frames_left = frames;
      set_state(c, Fsm::Interacting);
    }
    trace({{"type", "interaction"}, {"frame", frame_}, {"event", e.id}, {"frames", frames}});
    return;
  }
  if (!std::all_of(e.done.begin(), e.done.end(), [](bool d) { return d; })) return;
  e.status = EventStatus::Completed;
  e.completed_frame = frame_;
  for (const auto& n : e.participants) {
    Character& c = mutable_character(n);
    c.event_id.reset();
    c.arrived = false;
    c.path.reset();
  }
  trace({{"type", "event"}, {"frame", frame_}, {"event", e.id}, {"status", "completed"}});
}

void World::tick() {
  const auto fpt = static_cast<std::uint64_t>(config_.frames_per_grid_tick);
  if (frame_ % fpt == 0) {
    const std::uint64_t tick_now = frame_ / fpt;
    for (auto& c : characters_) {
      if (c.fsm == Fsm::Approaching && c.path) {
        c.cell = c.path->cell_at_tick(static_cast<int>(tick_now - c.path_start_tick));
      }
    }
    if (replan_needed_ || tick_now - last_replan_tick_ >= static_cast<std::uint64_t>(config_.replan_period)) {
      replan();
      last_replan_tick_ = tick_now;
      replan_needed_ = false;
    }
  }
  for (std::size_t i = 0; i < characters_.size(); ++i) advance_character(characters_[i], i);
  for (auto& e : events_) update_event(e);

  if (config_.trace_every > 0 && frame_ % static_cast<std::uint64_t>(config_.trace_every) == 0) {
    nlohmann::json chars = nlohmann::json::array();
    for (const auto& c : characters_) {
      const auto& p = c.motion.pose();
      nlohmann::json rec = {{"name", c.name},
                            {"position", {round4(p.root_pos.x), round4(p.root_pos.y)}},
                            {"heading", {round4(p.heading.x), round4(p.heading.y)}},
                            {"height", round4(p.root_height)},
                            {"fsm", to_string(c.fsm)},
                            {"clip", c.motion.action()}};
      rec["event"] = c.event_id ? nlohmann::json(*c.event_id) : nlohmann::json(nullptr);
      chars.push_back(std::move(rec));
    }
    trace({{"type", "frame"}, {"frame", frame_}, {"characters", std::move(chars)}});
  }
  ++frame_;
}

Snapshot World::snapshot() const {
  Snapshot s;
  s.frame = frame_;
  for (const auto& c : characters_) {
    const auto& p = c.motion.pose();
    s.characters.push_back({c.name, p.root_pos, p.heading, p.root_height, to_string(c.fsm), c.event_id, c.stuck});
  }
  for (const auto& e : events_) s.events.push_back({e.id, e.description, to_string(e.status), e.participants});
  s.regions = regions_;
  s.map = {{"origin", {grid_.origin().x, grid_.origin().y}},
           {"cell_size", grid_.cell_size()},
           {"width", grid_.width()},
           {"height", grid_.height()},
           {"cells", grid_.to_text()}};
  return s;
}

nlohmann::json to_json(const Snapshot& s) {
  nlohmann::json chars = nlohmann::json::array();
  for (const auto& c : s.characters) {
    chars.push_back({{"name", c.name},
                     {"position", {c.position.x, c.position.y}},
                     {"heading", {c.heading.x, c.heading.y}},
                     {"height", c.root_height},
                     {"fsm", c.fsm},
                     {"event", c.event_id ? nlohmann::json(*c.event_id) : nlohmann::json(nullptr)},
                     {"stuck", c.stuck}});
  }
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) {
    events.push_back(
        {{"id", e.id}, {"description", e.description}, {"status", e.status}, {"participants", e.participants}});
  }
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : s.regions) {
    regions.push_back({{"id", r.id}, {"members", r.member_ids}, {"centroid", {r.centroid.x, r.centroid.y}}});
  }
  return {{"frame", s.frame}, {"characters", chars}, {"events", events}, {"regions", regions}, {"map", s.map}};
}

std::optional<PlannedEvent> ScriptedPlanner::plan(World& world, const std::vector<std::string>& idle) {
  if (next_ >= entries_.size() || idle.empty()) return std::nullopt;
  const Entry& entry = entries_[next_];
  const auto parsed = script::parse(entry.script);
  const auto outcome = script::execute(parsed, world.script_world());
  for (const auto& p : outcome.plans) {
    if (std::find(idle.begin(), idle.end(), p.character) == idle.end()) return std::nullopt;  // wait for them
  }
  PlannedEvent ev{entry.description, world.ground(outcome, mix(world.config().seed, next_))};
  ++next_;
  return ev;
}

void Simulation::step() {
  if (planner_ && world_.frame() >= backoff_until_) {
    const auto idle = world_.needs_new_event();
    if (!idle.empty()) {
      try {
        if (auto ev = planner_->plan(world_, idle)) world_.assign_event(ev->description, ev->grounding);
      } catch (const Error& err) {
        world_.trace({{"type", "planner_error"}, {"frame", world_.frame()}, {"error", err.what()}});
        backoff_until_ = world_.frame() + static_cast<std::uint64_t>(world_.config().planner_backoff_frames);
      }
    }
  }
  world_.tick();
}

void Simulation::run(std::uint64_t frames) {
  for (std::uint64_t i = 0; i < frames; ++i) step();
}

std::vector<CharacterSpawn> default_spawns(const SceneGraph& graph, const GridParams& grid,
                                           const std::vector<std::string>& names, std::uint64_t seed) {
  const SceneGraph built = needs_build(graph) ? build_scene_graph(graph) : graph;
  const GridMap map = build_grid_map(built, grid);
  std::vector<Cell> free;
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Cell c = map.cell_of_index(i);
    // Interior cells only, so nobody spawns wedged against furniture.
    bool open = map.traversable(c);
    for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      open = open && map.traversable({c.x + d.x, c.y + d.y});
    }
    if (open) free.push_back(c);
  }
  if (free.size() < names.size()) throw NoFreeSpace("not enough free cells to spawn every character");
  std::mt19937_64 rng(seed);
  std::shuffle(free.begin(), free.end(), rng);
  std::vector<CharacterSpawn> out;
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], map.center(free[i]), {1.0, 0.0}});
  return out;
}

}  // namespace populace::sim
