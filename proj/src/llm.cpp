#include "populace/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "httplib.h"
#include "populace/errors.hpp"

namespace populace::llm {

const char* to_string(Role role) {
  switch (role) {
    case Role::Describer: return "describer";
    case Role::Narrator: return "narrator";
    case Role::Parser: return "parser";
  }
  return "?";
}

std::optional<Role> role_from_string(std::string_view text) {
  for (Role r : {Role::Describer, Role::Narrator, Role::Parser}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

const char* to_string(Tag tag) {
  switch (tag) {
    case Tag::OA: return "OA";
    case Tag::RC: return "RC";
    case Tag::SS: return "SS";
    case Tag::PI: return "PI";
  }
  return "?";
}

std::optional<Tag> tag_from_string(std::string_view text) {
  for (Tag t : {Tag::OA, Tag::RC, Tag::SS, Tag::PI}) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- mock backend

MockBackend::MockBackend(std::vector<Reply> replies, bool cycle, std::string model)
    : trials_{std::move(replies)}, cycle_(cycle), model_(std::move(model)) {}

namespace {

std::vector<MockBackend::Reply> parse_replies(const nlohmann::json& list) {
  if (!list.is_array()) throw SchemaError("mock replies must be an array");
  std::vector<MockBackend::Reply> out;
  for (const auto& r : list) {
    if (!r.is_object() || !r.contains("role") || !r.contains("text") || !r["role"].is_string() ||
        !r["text"].is_string()) {
      throw SchemaError("mock reply needs string fields role and text");
    }
    const auto role = role_from_string(r["role"].get<std::string>());
    if (!role) throw SchemaError("unknown mock role: " + r["role"].get<std::string>());
    MockBackend::Reply reply{*role, r["text"].get<std::string>(), std::nullopt};
    if (r.contains("match")) {
      if (!r["match"].is_string()) throw SchemaError("mock match must be a string");
      reply.match = r["match"].get<std::string>();
      try {
        std::regex check(*reply.match);
      } catch (const std::regex_error& e) {
        throw SchemaError("bad mock match pattern " + *reply.match + ": " + e.what());
      }
    }
    out.push_back(std::move(reply));
  }
  return out;
}

}  // namespace

MockBackend MockBackend::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("mock document must be an object");
  const std::string model = doc.value("model", std::string("mock"));
  if (doc.contains("trials")) {
    if (!doc["trials"].is_array() || doc["trials"].empty()) throw SchemaError("mock trials must be a nonempty array");
    MockBackend m({}, false, model);
    m.trials_.clear();
    for (const auto& t : doc["trials"]) m.trials_.push_back(parse_replies(t));
    return m;
  }
  if (!doc.contains("replies")) throw SchemaError("mock document needs replies or trials");
  return MockBackend(parse_replies(doc["replies"]), doc.value("cycle", false), model);
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open mock file: " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void MockBackend::begin_trial(int trial) {
  if (trial < 0) throw ValidationError("trial index must be nonnegative");
  trial_ = static_cast<std::size_t>(trial) % trials_.size();
  next_ = 0;
  role_next_.fill(0);
}

std::string MockBackend::send(const ChatRequest& request) {
  requests_.push_back(request);
  const auto& replies = trials_[trial_];
  if (cycle_) {
    // Live runs cannot predict which role is asked next, so a cycling mock keeps one cursor per
    // role and skips ahead to the next reply for the requested role.
    std::size_t& cursor = role_next_[static_cast<std::size_t>(request.role)];
    std::string last_user;
    for (const auto& m : request.messages) {
      if (m.role == "user") last_user = m.content;
    }
    for (std::size_t k = 0; k < replies.size(); ++k) {
      const std::size_t i = (cursor + k) % replies.size();
      if (replies[i].role != request.role) continue;
      if (!replies[i].match || std::regex_search(last_user, std::regex(*replies[i].match))) {
        cursor = i + 1;
        ++next_;
        return replies[i].text;
      }
    }
    throw BackendError("mock backend has no " + std::string(to_string(request.role)) + " reply", 1);
  }
  if (next_ >= replies.size()) {
    throw BackendError("mock backend has no reply left for the " + std::string(to_string(request.role)), 1);
  }
  const Reply& r = replies[next_];
  if (r.role != request.role) {
    throw BackendError("mock backend expected a " + std::string(to_string(r.role)) + " request, got " +
                           to_string(request.role),
                       1);
  }
  ++next_;
  return r.text;
}

// ---------------------------------------------------------------- remote backend

RemoteConfig RemoteConfig::from_env(RemoteConfig base) {
  if (const char* v = std::getenv("POPULACE_LLM_URL")) base.url = v;
  if (const char* v = std::getenv("POPULACE_LLM_MODEL")) base.model = v;
  if (const char* v = std::getenv("POPULACE_LLM_KEY")) {
    base.api_key = v;
  } else if (const char* k = std::getenv("OPENAI_API_KEY")) {
    base.api_key = k;
  }
  return base;
}

nlohmann::json RemoteBackend::request_body(const RemoteConfig& config, const ChatRequest& request) {
  return {{"model", config.model},
          {"messages", messages_to_json(request.messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string RemoteBackend::reply_text(const std::string& body) {
  try {
    const auto doc = nlohmann::json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion: ") + e.what(), 1);
  }
}

std::string RemoteBackend::send(const ChatRequest& request) {
  httplib::Client client(config_.url);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const std::string body = request_body(config_, request).dump();

  std::string last = "no attempt made";
  const int attempts = std::max(1, config_.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
      last = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return reply_text(res->body);
    last = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (res->status != 429 && res->status < 500) throw BackendError(last, attempt);
  }
  throw BackendError(last, attempts);
}

// ---------------------------------------------------------------- examples

ExampleLibrary ExampleLibrary::builtin() {
  ExampleLibrary lib;
  lib.describer["default"] = {
      R"({"objects": [{"id": "stove_0", "label": "stove", "position": [0.6, 0.4, 0.45]}, {"id": "fridge_0", "label": "fridge", "position": [1.5, 0.4, 0.9]}, {"id": "bed_0", "label": "bed", "position": [4.2, 2.8, 0.25]}, {"id": "nightstand_0", "label": "nightstand", "position": [5.3, 3.4, 0.3]}], "regions": [{"id": 0, "members": ["stove_0", "fridge_0"]}, {"id": 1, "members": ["bed_0", "nightstand_0"]}]})",
      "The studio has two functional areas. Along the south wall a compact kitchen is formed by stove_0 and "
      "fridge_0, where characters can cook or fetch food. In the opposite corner bed_0 and nightstand_0 form a "
      "sleeping area suited to resting and reading."};

  lib.narrator["default"] = {
      "Idle characters: Ana, Ben. Ongoing: none.",
      "Reasoning: Nobody is busy yet and the morning has just begun, so Ana can start breakfast while Ben "
      "wakes up.\nEvent: Ana cooks breakfast at the stove while Ben stretches next to the bed.\n"
      "Participants: Ana, Ben"};
  lib.narrator["OA"] = {
      "Idle characters: Ana. Ongoing: none. Instruction: Ana wants to read far from the door.",
      "Reasoning: Ana needs a seat, and the armchair by the window is the one farthest from the door.\n"
      "Event: Ana reads a book on the armchair farthest from the door.\nParticipants: Ana"};
  lib.narrator["RC"] = {
      "Idle characters: Ben. Ongoing: none. Instruction: Ben is hungry.",
      "Reasoning: Food belongs in the kitchen area, so Ben should cook there rather than in the bedroom.\n"
      "Event: Ben cooks a snack at the kitchen stove.\nParticipants: Ben"};
  lib.narrator["SS"] = {
      "Idle characters: Ben. Ongoing: Ana uses the coffee machine.",
      "Reasoning: Ana is still at the coffee machine, so Ben waits beside the counter instead of taking it.\n"
      "Event: Ben waits next to the counter until the coffee machine is free.\nParticipants: Ben"};
  lib.narrator["PI"] = {
      "Idle characters: Ana. Ongoing: none. Instruction: Ana stands between the two lamps.",
      "Reasoning: The exact target is the gap between both lamps.\n"
      "Event: Ana stands halfway between the two floor lamps.\nParticipants: Ana"};

  const std::string parser_default =
      "```python\n"
      "def plan():\n"
      "    \"\"\"Ana cooks breakfast at the stove while Ben stretches next to the bed.\"\"\"\n"
      "    ana = get_character(\"Ana\")\n"
      "    ana.set_position(get_area_to_interact_with(\"stove_0\"))\n"
      "    ana.set_orientation(\"stove_0\")\n"
      "    ana.set_target_action(\"cook\")\n"
      "    ben = get_character(\"Ben\")\n"
      "    ben.set_position(get_area_adjacent_to(\"bed_0\"))\n"
      "    ben.set_target_action(\"stretch\")\n"
      "    return [ana, ben]\n"
      "```";
  lib.parser["default"] = {"Event: Ana cooks breakfast at the stove while Ben stretches next to the bed.",
                           parser_default};
  lib.parser["OA"] = {
      "Event: Ana reads a book on the armchair farthest from the door.",
      "```python\n"
      "def plan():\n"
      "    ana = get_character(\"Ana\")\n"
      "    chairs = get_objects_close_to(\"window_0\")\n"
      "    best = None\n"
      "    best_distance = -1\n"
      "    for chair in chairs:\n"
      "        if is_object_of_label(chair, \"armchair\") and not is_object_occupied(chair):\n"
      "            d = get_distance_between(chair, \"door_0\")\n"
      "            if d > best_distance:\n"
      "                best = chair\n"
      "                best_distance = d\n"
      "    ana.set_position(get_area_to_sit_on(best))\n"
      "    ana.set_target_action(\"read\")\n"
      "    return [ana]\n"
      "```"};
  lib.parser["RC"] = {"Event: Ben cooks a snack at the kitchen stove.",
                      "```python\n"
                      "def plan():\n"
                      "    ben = get_character(\"Ben\")\n"
                      "    ben.set_position(get_area_to_interact_with(\"stove_0\"))\n"
                      "    ben.set_orientation(\"stove_0\")\n"
                      "    ben.set_target_action(\"cook\")\n"
                      "    return [ben]\n"
                      "```"};
  lib.parser["SS"] = {"Event: Ben waits next to the counter until the coffee machine is free.",
                      "```python\n"
                      "def plan():\n"
                      "    ben = get_character(\"Ben\")\n"
                      "    counter = get_object_supporting(\"coffee_machine_0\")\n"
                      "    ben.set_position(get_area_adjacent_to(counter))\n"
                      "    ben.set_target_action(\"wait\")\n"
                      "    return [ben]\n"
                      "```"};
  lib.parser["PI"] = {"Event: Ana stands halfway between the two floor lamps.",
                      "```python\n"
                      "def plan():\n"
                      "    ana = get_character(\"Ana\")\n"
                      "    ana.set_position(get_area_between(\"lamp_0\", \"lamp_1\"))\n"
                      "    ana.set_target_action(\"stand\")\n"
                      "    return [ana]\n"
                      "```"};
  return lib;
}

std::vector<std::string> ExampleLibrary::keys_for(const std::vector<Tag>& tags) {
  std::vector<std::string> keys;
  for (Tag t : tags) {
    if (std::find(keys.begin(), keys.end(), to_string(t)) == keys.end()) keys.emplace_back(to_string(t));
  }
  if (keys.empty()) keys.emplace_back("default");
  return keys;
}

// ---------------------------------------------------------------- prompts

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

const ExampleLibrary::Example* pick(const std::map<std::string, ExampleLibrary::Example>& table,
                                    const std::string& key) {
  if (auto it = table.find(key); it != table.end()) return &it->second;
  if (auto it = table.find("default"); it != table.end()) return &it->second;
  return nullptr;
}

void append_examples(std::vector<ChatMessage>& out, const std::map<std::string, ExampleLibrary::Example>& table,
                     const std::vector<Tag>& tags) {
  std::set<const ExampleLibrary::Example*> used;
  for (const auto& key : ExampleLibrary::keys_for(tags)) {
    const auto* ex = pick(table, key);
    if (!ex || !used.insert(ex).second) continue;
    out.push_back({"user", "Example input:\n" + ex->input});
    out.push_back({"assistant", ex->output});
  }
}

std::string history_text(const std::vector<HistoryEntry>& history) {
  if (history.empty()) return "(no events yet)";
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    out += std::to_string(i + 1) + ". [" + h.status + "] " + h.description + " (participants: " +
           join(h.participants, ", ") + ")\n";
  }
  out.pop_back();
  return out;
}

std::string character_text(const PromptBundle& b) {
  std::string out;
  for (const auto& c : b.characters) {
    out += "- " + c.name + " at (" + fmt2(c.position.x) + ", " + fmt2(c.position.y) + "): " +
           (c.busy ? "busy with an ongoing event" : "idle") + "\n";
  }
  if (out.empty()) {
    for (const auto& n : b.idle) out += "- " + n + ": idle\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace

std::vector<ChatMessage> describer_messages(const SceneGraph& graph, const std::vector<Region>& regions,
                                            const ExampleLibrary& examples) {
  std::vector<ChatMessage> out;
  out.push_back({"system",
                 "You describe 3D indoor scenes for a behavior planner. You receive the scene graph as JSON, "
                 "including clusters of nearby objects. Identify the functional areas (for example a dining area "
                 "or a study zone), name the objects that form each one by id, and say what characters could do "
                 "there. Answer in plain prose."});
  append_examples(out, examples.describer, {});
  out.push_back({"user", "Scene graph with regional clusters:\n" + graph_to_structured_text(graph, regions)});
  return out;
}

std::vector<ChatMessage> narrator_messages(const PromptBundle& b, const ExampleLibrary& examples) {
  std::vector<ChatMessage> out;
  std::string system =
      "You are the narrator of a living scene populated by several characters. You plan the scene one event at "
      "a time. An event is a short description of what one or more characters do next and roughly where. Only "
      "idle characters may take part in a new event; characters in an ongoing event must not appear in it.\n"
      "End your answer with exactly two lines:\nEvent: <one sentence>\nParticipants: <comma-separated names>";
  if (b.chain_of_thought) {
    system += "\nBefore the event, write one line starting with \"Reasoning:\" in which you consider the current "
              "planning state and what every other character is doing.";
  }
  out.push_back({"system", system});
  append_examples(out, examples.narrator, b.example_tags);

  std::string user = "Scene description:\n" + b.description + "\n\nEvent history:\n" + history_text(b.history) +
                     "\n\nCharacters:\n" + character_text(b) + "\n\nIdle characters: " + join(b.idle, ", ");
  if (!b.instructions.empty()) {
    user += "\n\nUser instructions:";
    for (const auto& t : b.instructions) user += "\n- " + t;
  }
  user += "\n\nGenerate the next event.";
  out.push_back({"user", user});
  return out;
}

std::vector<ChatMessage> parser_messages(const PromptBundle& b, const std::string& event,
                                         const std::vector<std::string>& occupied, const ExampleLibrary& examples) {
  std::vector<ChatMessage> out;
  std::string system =
      "You turn an event into a Python program that places every participating character. Write exactly one "
      "function `def plan():` in a single ```python code block. Use only the tools below, for loops, if "
      "statements and arithmetic; imports, classes, while loops and comprehensions are not available. For each "
      "character call get_character(name), then set_position with an area from a get_area_* tool, optionally "
      "set_orientation, and set_target_action with an action label. Return the list of characters.\n\nTools:\n" +
      script::tool_signatures();
  if (b.chain_of_thought) {
    system += "\nThink step by step in comments: find the relevant objects with the query tools first, then pick "
              "the area.";
  }
  out.push_back({"system", system});
  append_examples(out, examples.parser, b.example_tags);

  std::string user = "Scene description:\n" + b.description + "\n\nCharacters:\n" + character_text(b) +
                     "\n\nOccupied objects: " + (occupied.empty() ? std::string("none") : join(occupied, ", ")) +
                     "\n\nEvent: " + event;
  out.push_back({"user", user});
  return out;
}

std::string render_messages(const std::vector<ChatMessage>& messages) {
  std::string out;
  for (const auto& m : messages) out += "### " + m.role + "\n" + m.content + "\n";
  return out;
}

nlohmann::json messages_to_json(const std::vector<ChatMessage>& messages) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

// ---------------------------------------------------------------- roles

namespace {

std::string exchange(ChatBackend& backend, Role role, const std::vector<ChatMessage>& messages,
                     const PlanningOptions& options) {
  const std::string reply = backend.send({role, messages, options.temperature, options.max_tokens});
  if (options.log) options.log(role, messages, reply);
  return reply;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r*");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r*");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> after_prefix(const std::string& line, std::string_view prefix) {
  const std::string t = trim(line);
  if (t.size() < prefix.size()) return std::nullopt;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(t[i])) != std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return std::nullopt;
    }
  }
  return trim(std::string_view(t).substr(prefix.size()));
}

}  // namespace

std::string describe_scene(const SceneGraph& graph, const std::vector<Region>& regions, ChatBackend& backend,
                           const ExampleLibrary& examples, const PlanningOptions& options) {
  return exchange(backend, Role::Describer, describer_messages(graph, regions, examples), options);
}

std::optional<NarrationResult> parse_narration(const std::string& reply) {
  std::optional<std::string> event;
  std::optional<std::string> parts;
  std::istringstream in(reply);
  for (std::string line; std::getline(in, line);) {
    if (auto v = after_prefix(line, "event:")) event = *v;
    if (auto v = after_prefix(line, "participants:")) parts = *v;
  }
  if (!event || event->empty() || !parts) return std::nullopt;
  NarrationResult r;
  r.event = *event;
  std::string cur;
  std::istringstream ps(*parts);
  while (std::getline(ps, cur, ',')) {
    std::string name = trim(cur);
    while (!name.empty() && (name.back() == '.' || name.back() == ';')) name.pop_back();
    if (!name.empty() && std::find(r.participants.begin(), r.participants.end(), name) == r.participants.end()) {
      r.participants.push_back(name);
    }
  }
  if (r.participants.empty()) return std::nullopt;
  return r;
}

NarrationResult narrate(const PromptBundle& bundle, ChatBackend& backend, const ExampleLibrary& examples,
                        const PlanningOptions& options) {
  if (bundle.idle.empty()) throw ValidationError("narration needs at least one idle character");
  auto messages = narrator_messages(bundle, examples);
  std::vector<std::string> feedback;
  std::set<std::string> known(bundle.idle.begin(), bundle.idle.end());
  for (const auto& c : bundle.characters) known.insert(c.name);

  const int attempts = std::max(1, options.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const std::string reply = exchange(backend, Role::Narrator, messages, options);
    std::string note;
    auto result = parse_narration(reply);
    if (!result) {
      note = "Your answer must end with an \"Event:\" line and a \"Participants:\" line naming at least one "
             "character. Please regenerate the event.";
    } else {
      std::vector<std::string> busy;
      std::vector<std::string> unknown;
      for (const auto& p : result->participants) {
        if (!known.contains(p)) {
          unknown.push_back(p);
        } else if (std::find(bundle.idle.begin(), bundle.idle.end(), p) == bundle.idle.end()) {
          busy.push_back(p);
        }
      }
      if (busy.empty() && unknown.empty()) {
        result->attempts = attempt;
        result->feedback = feedback;
        return *result;
      }
      if (!busy.empty()) {
        note = "These characters are in an ongoing event and must not be included: " + join(busy, ", ") + ".";
      }
      if (!unknown.empty()) {
        note += std::string(note.empty() ? "" : " ") + "These characters do not exist: " + join(unknown, ", ") + ".";
      }
      note += " Only use idle characters: " + join(bundle.idle, ", ") + ". Please regenerate the event.";
    }
    feedback.push_back(note);
    messages.push_back({"assistant", reply});
    messages.push_back({"user", note});
  }
  throw PlanningError("narrator produced no valid event in " + std::to_string(attempts) +
                      " attempts: " + feedback.back());
}

ParseResult parse_event(const PromptBundle& bundle, const std::string& event, const script::ScriptWorld& world,
                        ChatBackend& backend, const OutcomeValidator& validate, const ExampleLibrary& examples,
                        const PlanningOptions& options) {
  if (event.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("event text is empty");
  std::vector<std::string> occupied(world.occupied_objects.begin(), world.occupied_objects.end());
  auto messages = parser_messages(bundle, event, occupied, examples);
  std::vector<std::string> feedback;
  ExecutionFailure last = ExecutionFailure::NoScript;
  std::string last_msg;

  const int attempts = std::max(1, options.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const std::string reply = exchange(backend, Role::Parser, messages, options);
    std::string note;
    const auto code = script::extract_code_block(reply);
    if (!code) {
      last = ExecutionFailure::NoScript;
      last_msg = "reply contains no code block";
      note = "Your reply did not contain a ```python code block. Reply with the program only.";
    } else {
      try {
        script::Script parsed = script::parse(*code);
        ParseResult r;
        r.outcome = script::execute(parsed, world);
        if (validate) validate(r.outcome);
        r.source = *code;
        r.attempts = attempt;
        r.feedback = feedback;
        return r;
      } catch (const script::SyntaxError& e) {
        last = ExecutionFailure::Syntax;
        last_msg = e.what();
      } catch (const script::ScriptRuntimeError& e) {
        last = ExecutionFailure::Runtime;
        last_msg = e.what();
      } catch (const Error& e) {
        last = ExecutionFailure::Grounding;
        last_msg = e.what();
      }
      note = std::string("Running your program failed with ") + to_string(last) + ": " + last_msg +
             ". Fix the program and reply with the corrected code block.";
    }
    feedback.push_back(note);
    messages.push_back({"assistant", reply});
    messages.push_back({"user", note});
  }
  throw ExecutionError(last, std::string(to_string(last)) + ": " + last_msg);
}

// ---------------------------------------------------------------- live planner

std::vector<HistoryEntry> history_of(const sim::World& world) {
  std::vector<HistoryEntry> out;
  for (const auto& e : world.events()) out.push_back({e.description, sim::to_string(e.status), e.participants});
  return out;
}

LlmPlanner::LlmPlanner(ChatBackend& backend, std::string description, ExampleLibrary examples,
                       PlanningOptions options)
    : backend_(backend), description_(std::move(description)), examples_(std::move(examples)),
      options_(std::move(options)) {}

std::optional<sim::PlannedEvent> LlmPlanner::plan(sim::World& world, const std::vector<std::string>& idle) {
  if (idle.empty()) return std::nullopt;
  PromptBundle bundle;
  bundle.description = description_;
  bundle.history = history_of(world);
  bundle.idle = idle;
  for (const auto& c : world.characters()) {
    bundle.characters.push_back({c.name, c.motion.pose().root_pos, c.event_id.has_value()});
  }
  bundle.instructions = world.take_instructions();

  PlanningOptions opts = options_;
  opts.log = [&](Role role, const std::vector<ChatMessage>& messages, const std::string& reply) {
    world.trace({{"type", "llm"},
                 {"frame", world.frame()},
                 {"role", to_string(role)},
                 {"messages", messages_to_json(messages)},
                 {"reply", reply}});
    if (options_.log) options_.log(role, messages, reply);
  };

  const NarrationResult narration = narrate(bundle, backend_, examples_, opts);
  const std::uint64_t seed = world.config().seed * 0x9E3779B97F4A7C15ULL + (++calls_);
  std::vector<sim::Grounding> grounding;
  parse_event(bundle, narration.event, world.script_world(), backend_,
              [&](const script::ExecOutcome& outcome) { grounding = world.ground(outcome, seed); }, examples_, opts);
  return sim::PlannedEvent{narration.event, std::move(grounding)};
}

}  // namespace populace::llm
