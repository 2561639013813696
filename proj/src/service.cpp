#include "populace/service.hpp"

#include <chrono>

#include "httplib.h"
#include "populace/errors.hpp"

namespace populace::service {

using nlohmann::json;

json scene_json(const sim::World& world) {
  const auto& g = world.graph();
  json objects = json::array();
  for (const auto& o : g.objects()) {
    json footprint = json::array();
    for (const auto& v : o.box.footprint().vertices()) footprint.push_back({v.x, v.y});
    objects.push_back({{"id", o.id},
                       {"label", o.label},
                       {"center", {o.box.center.x, o.box.center.y, o.box.center.z}},
                       {"size", {2 * o.box.half_extents.x, 2 * o.box.half_extents.y, 2 * o.box.half_extents.z}},
                       {"yaw", o.box.yaw},
                       {"footprint", footprint},
                       {"sittable", o.attributes.sittable}});
  }
  json floor = json::array();
  for (const auto& v : g.floor().vertices()) floor.push_back({v.x, v.y});
  const auto snap = sim::to_json(world.snapshot());
  return {{"name", g.name()},
          {"floor", floor},
          {"objects", objects},
          {"actions", g.actions()},
          {"regions", snap["regions"]},
          {"map", snap["map"]}};
}

Service::Service(sim::Simulation& simulation, ServiceConfig config)
    : sim_(simulation), config_(std::move(config)), scene_(scene_json(simulation.world())) {
  std::lock_guard lock(sim_mutex_);
  publish_locked();
}

Service::~Service() { stop(); }

void Service::publish_locked() {
  auto snap = std::make_shared<const json>(sim::to_json(sim_.world().snapshot()));
  const auto& lines = sim_.world().trace_lines();
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snap);
  for (std::size_t i = trace_.size(); i < lines.size(); ++i) trace_.push_back(lines[i]);
}

void Service::drain_instructions_locked() {
  std::deque<std::string> pending;
  {
    std::lock_guard lock(queue_mutex_);
    pending.swap(queue_);
  }
  for (const auto& text : pending) sim_.world().inject_instruction(text);
}

std::uint64_t Service::published_frame() const {
  std::lock_guard lock(snapshot_mutex_);
  return (*snapshot_)["frame"].get<std::uint64_t>();
}

Service::Response Service::get_state() const {
  std::shared_ptr<const json> snap;
  {
    std::lock_guard lock(snapshot_mutex_);
    snap = snapshot_;
  }
  return {200, snap->dump()};
}

Service::Response Service::get_events() const {
  std::shared_ptr<const json> snap;
  {
    std::lock_guard lock(snapshot_mutex_);
    snap = snapshot_;
  }
  return {200, json{{"frame", (*snap)["frame"]}, {"events", (*snap)["events"]}}.dump()};
}

Service::Response Service::get_scene() const { return {200, scene_.dump()}; }

Service::Response Service::get_trace(const std::string& from, const std::string& to) const {
  std::lock_guard lock(snapshot_mutex_);
  const std::size_t total = trace_.size();
  std::size_t a = 0;
  std::size_t b = total;
  try {
    if (!from.empty()) a = std::stoull(from);
    if (!to.empty()) b = std::stoull(to);
  } catch (const std::exception&) {
    return {400, json{{"error", "from and to must be nonnegative integers"}}.dump()};
  }
  if (from.find('-') != std::string::npos || to.find('-') != std::string::npos) {
    return {400, json{{"error", "from and to must be nonnegative integers"}}.dump()};
  }
  b = std::min(b, total);
  a = std::min(a, b);
  json records = json::array();
  for (std::size_t i = a; i < b; ++i) records.push_back(json::parse(trace_[i]));
  return {200, json{{"from", a}, {"to", b}, {"total", total}, {"records", records}}.dump()};
}

Service::Response Service::post_instruction(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception&) {
    return {400, json{{"error", "body must be JSON"}}.dump()};
  }
  if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
    return {400, json{{"error", "body must be {\"text\": string}"}}.dump()};
  }
  const std::string text = doc["text"].get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return {400, json{{"error", "instruction text is empty"}}.dump()};
  }
  std::size_t position = 0;
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(text);
    position = queue_.size();
  }
  return {202, json{{"queued", true}, {"position", position}}.dump()};
}

Service::Response Service::post_step(const std::string& body) {
  if (config_.mode == TickMode::Realtime) {
    return {409, json{{"error", "stepping is only available in stepped mode"}}.dump()};
  }
  json doc;
  try {
    doc = body.empty() ? json::object() : json::parse(body);
  } catch (const json::exception&) {
    return {400, json{{"error", "body must be JSON"}}.dump()};
  }
  if (!doc.is_object()) return {400, json{{"error", "body must be {\"ticks\": integer}"}}.dump()};
  std::int64_t ticks = 1;
  if (doc.contains("ticks")) {
    if (!doc["ticks"].is_number_integer()) return {400, json{{"error", "ticks must be an integer"}}.dump()};
    ticks = doc["ticks"].get<std::int64_t>();
  }
  if (ticks < 1 || ticks > config_.max_step) {
    return {400, json{{"error", "ticks must be between 1 and " + std::to_string(config_.max_step)}}.dump()};
  }
  std::uint64_t frame = 0;
  {
    std::lock_guard lock(sim_mutex_);
    drain_instructions_locked();
    for (std::int64_t i = 0; i < ticks; ++i) sim_.step();
    publish_locked();
    frame = sim_.world().frame();
  }
  return {200, json{{"frame", frame}, {"advanced", ticks}}.dump()};
}

void Service::realtime_loop() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(1.0 / std::max(config_.frames_per_second, 1e-3)));
  auto next = clock::now();
  while (running_) {
    {
      std::lock_guard lock(sim_mutex_);
      drain_instructions_locked();
      sim_.step();
      publish_locked();
    }
    next += period;
    std::this_thread::sleep_until(next);
  }
}

int Service::start() {
  if (running_) throw ValidationError("service already running");
  server_ = std::make_unique<httplib::Server>();
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server_->Get("/api/state", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, get_state());
  });
  server_->Get("/api/events", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, get_events());
  });
  server_->Get("/api/scene", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, get_scene());
  });
  server_->Get("/api/trace", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_trace(req.get_param_value("from"), req.get_param_value("to")));
  });
  server_->Post("/api/instruction", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_instruction(req.body));
  });
  server_->Post("/api/step", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_step(req.body));
  });
  server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  running_ = true;
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  if (config_.mode == TickMode::Realtime) tick_thread_ = std::thread([this] { realtime_loop(); });
  return port;
}

void Service::stop() {
  if (!server_) return;
  running_ = false;
  server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (tick_thread_.joinable()) tick_thread_.join();
  server_.reset();
}

}  // namespace populace::service
