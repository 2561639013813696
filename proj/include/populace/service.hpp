#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "populace/sim.hpp"

namespace httplib {
class Server;
}

namespace populace::service {

enum class TickMode { Realtime, Stepped };

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  TickMode mode = TickMode::Stepped;
  /// Frames advanced per second in realtime mode.
  double frames_per_second = 30.0;
  /// Largest accepted `ticks` in one step request.
  int max_step = 100000;
};

/// Object footprints, regions, floor and grid for rendering.
nlohmann::json scene_json(const sim::World& world);

/// Hosts one simulation. The tick loop (a background thread in realtime mode, the step handler in
/// stepped mode) is the only writer; handlers read the snapshot published after each frame.
/// Ticks in the API are simulation frames.
class Service {
 public:
  Service(sim::Simulation& simulation, ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port. Throws Error when the
  /// address cannot be bound.
  int start();
  void stop();
  bool running() const { return running_; }

  /// The handlers, callable without a socket. `body` is the raw request body.
  struct Response {
    int status = 200;
    std::string body;
  };
  Response get_state() const;
  Response get_events() const;
  Response get_scene() const;
  Response get_trace(const std::string& from, const std::string& to) const;
  Response post_instruction(const std::string& body);
  Response post_step(const std::string& body);

  std::uint64_t published_frame() const;

 private:
  void publish_locked();
  void drain_instructions_locked();
  void realtime_loop();

  sim::Simulation& sim_;
  ServiceConfig config_;
  nlohmann::json scene_;

  std::mutex sim_mutex_;  // held by the single writer while it ticks
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const nlohmann::json> snapshot_;
  std::vector<std::string> trace_;  // copy of published trace lines, guarded by snapshot_mutex_
  std::mutex queue_mutex_;
  std::deque<std::string> queue_;

  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::thread tick_thread_;
  std::atomic<bool> running_{false};
};

}  // namespace populace::service
