// populace: command line front end.
//
//   populace describe --scene office --backend mock
//   populace simulate --scene house --ticks 3000 --backend mock --seed 1 --trace run.jsonl
//   populace bench run --cases data/cases --backend mock --repeats 5
//   populace serve --scene house --port 8080 --mode stepped
//   populace export-trace --in run.jsonl --out replay.json

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "populace/bench.hpp"
#include "populace/errors.hpp"
#include "populace/llm.hpp"
#include "populace/scene.hpp"
#include "populace/service.hpp"
#include "populace/sim.hpp"

namespace fs = std::filesystem;
using namespace populace;

namespace {

std::atomic<bool> g_stop{false};

fs::path data_dir() { return fs::path(POPULACE_DATA_DIR); }

fs::path scene_path(const std::string& scene) {
  if (fs::exists(scene)) return scene;
  return data_dir() / "scenes" / (scene + ".json");
}

std::string scene_name(const std::string& scene) {
  return fs::exists(scene) ? fs::path(scene).stem().string() : scene;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw SchemaError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  for (std::string s; std::getline(ss, s, ',');) {
    if (!s.empty()) out.push_back(s);
  }
  return out;
}

struct BackendOptions {
  std::string kind = "mock";
  std::string mock;
  std::string url;
  std::string model;
};

void add_backend_options(CLI::App* cmd, BackendOptions& o) {
  cmd->add_option("--backend", o.kind, "mock or remote")->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--mock", o.mock, "mock reply file (defaults per command)");
  cmd->add_option("--url", o.url, "remote endpoint base URL");
  cmd->add_option("--model", o.model, "remote model name");
}

std::unique_ptr<llm::ChatBackend> make_backend(const BackendOptions& o, const fs::path& default_mock) {
  if (o.kind == "mock") {
    return std::make_unique<llm::MockBackend>(llm::MockBackend::load(o.mock.empty() ? default_mock : fs::path(o.mock)));
  }
  llm::RemoteConfig cfg = llm::RemoteConfig::from_env();
  if (!o.url.empty()) cfg.url = o.url;
  if (!o.model.empty()) cfg.model = o.model;
  return std::make_unique<llm::RemoteBackend>(cfg);
}

struct WorldOptions {
  std::string scene = "house";
  std::string characters = "Sara,Tom,Mia";
  std::uint64_t seed = 1;
  std::string description;  // a file; empty means the pre-generated variant 0, else a live call
};

void add_world_options(CLI::App* cmd, WorldOptions& o) {
  cmd->add_option("--scene", o.scene, "scene name under data/scenes, or a scene file");
  cmd->add_option("--characters", o.characters, "comma-separated character names");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--description", o.description, "scene description file");
}

std::string scene_description(const WorldOptions& o, const SceneGraph& graph, llm::ChatBackend& backend) {
  if (!o.description.empty()) return read_file(o.description);
  const fs::path pre = data_dir() / "descriptions" / (scene_name(o.scene) + "_0.txt");
  if (fs::exists(pre)) return read_file(pre);
  return llm::describe_scene(graph, cluster_regions(graph), backend);
}

struct Runtime {
  std::unique_ptr<llm::ChatBackend> backend;
  std::unique_ptr<llm::LlmPlanner> planner;
  std::unique_ptr<sim::Simulation> sim;
};

Runtime make_runtime(const WorldOptions& wo, const BackendOptions& bo) {
  Runtime rt;
  const SceneGraph graph = build_scene_graph(load_scene(scene_path(wo.scene)));
  rt.backend = make_backend(bo, data_dir() / "mocks" / ("sim_" + scene_name(wo.scene) + ".json"));
  const std::string description = scene_description(wo, graph, *rt.backend);
  sim::SimConfig config;
  config.seed = wo.seed;
  auto spawns = sim::default_spawns(graph, config.grid, split_names(wo.characters), wo.seed);
  sim::World world(graph, std::move(spawns), config);
  rt.planner = std::make_unique<llm::LlmPlanner>(*rt.backend, description);
  rt.sim = std::make_unique<sim::Simulation>(std::move(world), rt.planner.get());
  return rt;
}

int cmd_describe(const WorldOptions& wo, const BackendOptions& bo, int variant) {
  if (variant >= 0) {
    const auto variants = bench::load_descriptions(data_dir() / "descriptions", scene_name(wo.scene));
    std::cout << variants.at(static_cast<std::size_t>(variant) % variants.size());
    return 0;
  }
  const SceneGraph graph = build_scene_graph(load_scene(scene_path(wo.scene)));
  auto backend = make_backend(bo, data_dir() / "mocks" / ("describe_" + scene_name(wo.scene) + ".json"));
  std::cout << llm::describe_scene(graph, cluster_regions(graph), *backend) << '\n';
  return 0;
}

int cmd_simulate(const WorldOptions& wo, const BackendOptions& bo, std::uint64_t ticks, const std::string& trace) {
  Runtime rt = make_runtime(wo, bo);
  std::ofstream out;
  if (!trace.empty()) {
    out.open(trace);
    if (!out) throw Error("cannot write " + trace);
    rt.sim->world().set_trace_sink(&out);
  }
  rt.sim->run(ticks);
  const auto& w = rt.sim->world();
  std::size_t completed = 0;
  for (const auto& e : w.events()) completed += e.status == sim::EventStatus::Completed ? 1 : 0;
  std::cerr << "frames " << w.frame() << ", events " << w.events().size() << " (" << completed
            << " completed), trace lines " << w.trace_lines().size() << '\n';
  return 0;
}

int cmd_bench(const std::string& cases, const BackendOptions& bo, int repeats, const std::string& rows,
              const std::string& label) {
  bench::BenchConfig cfg;
  cfg.repeats = repeats;
  cfg.backend = bo.kind == "mock" ? bench::BackendKind::Mock : bench::BackendKind::Remote;
  cfg.remote = llm::RemoteConfig::from_env();
  if (!bo.url.empty()) cfg.remote.url = bo.url;
  if (!bo.model.empty()) cfg.remote.model = bo.model;
  const fs::path dir = cases.empty() ? data_dir() / "cases" : fs::path(cases);
  const auto loaded = bench::load_cases(dir);
  const auto results = bench::run_benchmark(loaded, cfg);
  std::cout << bench::report_table(results, label.empty() ? (bo.kind == "mock" ? "mock" : cfg.remote.model) : label);
  if (!rows.empty()) {
    std::ofstream out(rows);
    out << bench::report_rows(results);
  }
  return 0;
}

int cmd_serve(const WorldOptions& wo, const BackendOptions& bo, const std::string& host, int port,
              const std::string& mode) {
  Runtime rt = make_runtime(wo, bo);
  service::ServiceConfig cfg;
  cfg.host = host;
  cfg.port = port;
  cfg.mode = mode == "realtime" ? service::TickMode::Realtime : service::TickMode::Stepped;
  service::Service svc(*rt.sim, cfg);
  const int bound = svc.start();
  std::cerr << "serving on http://" << host << ":" << bound << " (" << mode << ")\n";
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  svc.stop();
  return 0;
}

/// Gathers a trace into one replay document: frame records, events, and optionally the scene.
int cmd_export(const std::string& in_path, const std::string& out_path, const std::string& scene) {
  std::ifstream in(in_path);
  if (!in) throw Error("cannot open " + in_path);
  nlohmann::json frames = nlohmann::json::array();
  nlohmann::json events = nlohmann::json::array();
  nlohmann::json other = nlohmann::json::array();
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(in_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const std::string type = rec.value("type", std::string());
    if (type == "frame") frames.push_back(std::move(rec));
    else if (type == "event") events.push_back(std::move(rec));
    else if (type != "llm") other.push_back(std::move(rec));
  }
  nlohmann::json doc = {{"format", "populace-replay"}, {"version", 1}, {"frames", frames}, {"events", events},
                        {"records", other}};
  if (!scene.empty()) {
    const SceneGraph graph = build_scene_graph(load_scene(scene_path(scene)));
    sim::World world(graph, {});
    doc["scene"] = service::scene_json(world);
  }
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << doc.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Populace: event-based multi-character scene simulation"};
  app.require_subcommand(1);

  WorldOptions wo;
  BackendOptions bo;

  auto* describe = app.add_subcommand("describe", "print the scene description");
  add_world_options(describe, wo);
  add_backend_options(describe, bo);
  int variant = -1;
  describe->add_option("--variant", variant, "print pre-generated description k instead of calling the backend");

  auto* simulate = app.add_subcommand("simulate", "run headless and write a trace");
  add_world_options(simulate, wo);
  add_backend_options(simulate, bo);
  std::uint64_t ticks = 3000;
  std::string trace;
  simulate->add_option("--ticks", ticks, "frames to simulate (30 per second)");
  simulate->add_option("--trace", trace, "trace output file (JSON lines)");

  auto* bench_cmd = app.add_subcommand("bench", "benchmark harness");
  bench_cmd->require_subcommand(1);
  auto* bench_run = bench_cmd->add_subcommand("run", "run test cases and print the metrics table");
  std::string cases;
  int repeats = 5;
  std::string rows;
  std::string label;
  bench_run->add_option("--cases", cases, "test case directory");
  bench_run->add_option("--repeats", repeats, "repeats per case")->check(CLI::PositiveNumber);
  bench_run->add_option("--rows", rows, "write one JSON row per run to this file");
  bench_run->add_option("--label", label, "row label in the table");
  add_backend_options(bench_run, bo);

  auto* serve = app.add_subcommand("serve", "host the HTTP service");
  add_world_options(serve, wo);
  add_backend_options(serve, bo);
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string mode = "stepped";
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port (0 picks one)");
  serve->add_option("--mode", mode, "realtime or stepped")->check(CLI::IsMember({"realtime", "stepped"}));

  auto* export_cmd = app.add_subcommand("export-trace", "convert a trace into a replay document for the UI");
  std::string in_path;
  std::string out_path;
  std::string export_scene;
  export_cmd->add_option("--in", in_path, "trace file")->required();
  export_cmd->add_option("--out", out_path, "replay file")->required();
  export_cmd->add_option("--scene", export_scene, "embed this scene's layout");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*describe) return cmd_describe(wo, bo, variant);
    if (*simulate) return cmd_simulate(wo, bo, ticks, trace);
    if (*bench_run) return cmd_bench(cases, bo, repeats, rows, label);
    if (*serve) return cmd_serve(wo, bo, host, port, mode);
    if (*export_cmd) return cmd_export(in_path, out_path, export_scene);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
