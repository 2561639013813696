#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "populace/area.hpp"
#include "populace/motion.hpp"
#include "populace/nav_grid.hpp"
#include "populace/scene.hpp"
#include "populace/script.hpp"

namespace populace::sim {

enum class Fsm { Idle, Approaching, TransitionIn, Interacting, TransitionOut };
const char* to_string(Fsm state);

enum class EventStatus { Ongoing, Completed };
const char* to_string(EventStatus status);

/// Where one participant goes and what it does there.
struct Grounding {
  std::string character;
  PlacementTarget target;
  std::string action;
};

struct Event {
  int id = 0;
  std::string description;
  EventStatus status = EventStatus::Ongoing;
  std::vector<std::string> participants;
  std::vector<Grounding> grounding;
  std::vector<bool> done;
  std::uint64_t created_frame = 0;
  std::optional<std::uint64_t> completed_frame;
  /// Frame at which every participant was in place and the shared action clock started.
  std::optional<std::uint64_t> interaction_frame;
};

struct CharacterSpawn {
  std::string name;
  Vec2 position{};
  Vec2 heading{1.0, 0.0};
};

struct Character {
  std::string name;
  motion::MotionController motion;
  Fsm fsm = Fsm::Idle;
  std::optional<int> event_id;
  std::optional<TimedPath> path;
  std::uint64_t path_start_tick = 0;  // grid tick of path.cells[0]
  std::optional<std::string> claimed;
  Cell cell{};  // logical grid cell, updated at grid-tick boundaries
  bool arrived = false;
  std::optional<std::uint64_t> arrival_frame;
  int state_frames_left = 0;
  bool stuck = false;
  int priority_boost = 0;
  int last_goal_distance = kUnreachable;
};

struct SimConfig {
  GridParams grid{};
  AreaParams area{};
  int frames_per_grid_tick = 10;
  int window = 16;
  int replan_period = 8;
  int default_action_frames = 150;
  std::map<std::string, int> action_frames;
  int transition_frames = 30;
  double arrival_angle = 15.0 * kPi / 180.0;
  int planner_backoff_frames = 300;
  /// Frame records are written every this many frames; state changes are always recorded.
  int trace_every = 10;
  std::uint64_t seed = 1;
};

struct CharacterSnapshot {
  std::string name;
  Vec2 position{};
  Vec2 heading{};
  double root_height = 0.0;
  std::string fsm;
  std::optional<int> event_id;
  bool stuck = false;
};

struct EventSnapshot {
  int id = 0;
  std::string description;
  std::string status;
  std::vector<std::string> participants;
};

/// Immutable view published at frame boundaries.
struct Snapshot {
  std::uint64_t frame = 0;
  std::vector<CharacterSnapshot> characters;
  std::vector<EventSnapshot> events;
  std::vector<Region> regions;
  nlohmann::json map;
};

nlohmann::json to_json(const Snapshot& snapshot);

/// Owns the world and advances it one frame at a time.
class World {
 public:
  World(SceneGraph graph, std::vector<CharacterSpawn> spawns, SimConfig config = {},
        std::shared_ptr<const motion::MotionLibrary> library = nullptr);

  const SceneGraph& graph() const { return graph_; }
  const std::vector<Region>& regions() const { return regions_; }
  const GridMap& grid() const { return grid_; }
  const SimConfig& config() const { return config_; }
  const std::vector<Character>& characters() const { return characters_; }
  const Character& character(const std::string& name) const;
  const std::vector<Event>& events() const { return events_; }
  const Event& event(int id) const;
  const std::map<std::string, std::string>& occupancy() const { return occupancy_; }
  std::uint64_t frame() const { return frame_; }
  const motion::MotionLibrary& motion_library() const { return *library_; }

  /// Characters with no ongoing event.
  std::vector<std::string> needs_new_event() const;

  /// The world as a read-only script environment.
  script::ScriptWorld script_world() const;

  /// Samples coordinates for every plan. Throws NoFreeSpace, CharacterBusy, UnknownAction,
  /// DegenerateDirection.
  std::vector<Grounding> ground(const script::ExecOutcome& outcome, std::uint64_t seed) const;

  /// Registers an ongoing event. Throws CharacterBusy, UnknownAction, ValidationError.
  const Event& assign_event(const std::string& description, const std::vector<Grounding>& grounding);

  /// Throws ValidationError on blank text.
  void inject_instruction(const std::string& text);
  /// Pending instructions, removed from the queue.
  std::vector<std::string> take_instructions();
  const std::deque<std::string>& pending_instructions() const { return instructions_; }

  /// Advances one frame (1/30 s).
  void tick();

  Snapshot snapshot() const;

  void trace(nlohmann::json record);
  const std::vector<std::string>& trace_lines() const { return trace_; }
  /// Also stream every trace line to `out`.
  void set_trace_sink(std::ostream* out) { sink_ = out; }

  int action_frames(const std::string& action) const;

 private:
  Character& mutable_character(const std::string& name);
  void set_state(Character& c, Fsm next);
  void replan();
  void advance_character(Character& c, std::size_t index);
  void update_event(Event& e);
  const Grounding& grounding_of(const Character& c) const;
  Event& mutable_event(int id);

  SceneGraph graph_;
  SimConfig config_;
  std::vector<Region> regions_;
  GridMap grid_;
  std::shared_ptr<const motion::MotionLibrary> library_;
  std::vector<Character> characters_;
  std::vector<Event> events_;
  std::map<std::string, std::string> occupancy_;  // object id -> character
  std::deque<std::string> instructions_;
  std::uint64_t frame_ = 0;
  std::uint64_t last_replan_tick_ = 0;
  bool replan_needed_ = false;
  std::vector<std::string> trace_;
  std::ostream* sink_ = nullptr;
};

/// A planned but not yet registered event.
struct PlannedEvent {
  std::string description;
  std::vector<Grounding> grounding;
};

/// Turns idle characters into events. Implementations may consume the world's instructions and
/// write to its trace.
class EventPlanner {
 public:
  virtual ~EventPlanner() = default;
  /// nullopt when no event could be produced right now.
  virtual std::optional<PlannedEvent> plan(World& world, const std::vector<std::string>& idle) = 0;
};

/// Replays fixed event scripts in order, grounding each against the live world.
class ScriptedPlanner : public EventPlanner {
 public:
  struct Entry {
    std::string description;
    std::string script;
  };
  explicit ScriptedPlanner(std::vector<Entry> entries) : entries_(std::move(entries)) {}
  std::optional<PlannedEvent> plan(World& world, const std::vector<std::string>& idle) override;

 private:
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
};

/// The runtime loop: ask the planner for events whenever a character is free, then tick.
class Simulation {
 public:
  Simulation(World world, EventPlanner* planner) : world_(std::move(world)), planner_(planner) {}

  World& world() { return world_; }
  const World& world() const { return world_; }

  void step();
  void run(std::uint64_t frames);

 private:
  World world_;
  EventPlanner* planner_;
  std::uint64_t backoff_until_ = 0;
};

/// Spawn points on distinct free cells, chosen deterministically from the seed.
std::vector<CharacterSpawn> default_spawns(const SceneGraph& graph, const GridParams& grid,
                                           const std::vector<std::string>& names, std::uint64_t seed);

}  // namespace populace::sim
