#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "populace/area.hpp"
#include "populace/llm.hpp"
#include "populace/scene.hpp"

namespace populace::bench {

/// Union/intersection tree over semantic-area constructors.
///   {"area": "sit_on", "anchor": "chair_3"}
///   {"area": "between", "anchors": ["sofa_0", "tv_0"]}
///   {"union": [expr, ...]}  {"intersection": [expr, ...]}
struct AreaExpr {
  enum class Op { Leaf, Union, Intersection };
  Op op = Op::Leaf;
  AreaKind kind = AreaKind::AdjacentTo;
  std::vector<std::string> anchors;
  std::vector<AreaExpr> args;

  /// Throws SchemaError.
  static AreaExpr from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  /// Throws UnknownObject or NotSittable.
  Area evaluate(const SceneGraph& graph, const AreaParams& params = {}) const;
};

struct HistoryGrounding {
  std::string character;
  std::string action;
  std::optional<Vec2> position;
  std::optional<AreaExpr> area;
};

struct HistoryRecord {
  std::string description;
  std::string status;
  std::vector<std::string> participants;
  /// Ongoing events only: where their participants are placed.
  std::vector<HistoryGrounding> grounding;
};

struct TestCase {
  std::string id;
  std::string scene;
  std::vector<std::string> characters;  // characters[0] is the target
  std::string scenario;
  std::vector<HistoryRecord> history;
  std::vector<std::string> expected_actions;
  AreaExpr expected_area;
  std::vector<llm::Tag> tags;
  bool coordinate_level = false;
  std::string mock;  // file name under the mocks directory

  /// Throws SchemaError.
  static TestCase from_json(const nlohmann::json& doc);
};

TestCase load_case(const std::filesystem::path& path);
/// Every *.json in `dir`, sorted by file name.
std::vector<TestCase> load_cases(const std::filesystem::path& dir);

enum class Failure { NoPlan, BadAction, BadPosition, RuntimeError };
const char* to_string(Failure f);

struct GeneratedPlan {
  std::string action;
  /// Area-level plan, or coordinates.
  std::variant<Area, Vec2> position;
};

struct RunResult {
  std::optional<GeneratedPlan> plan;
  bool executed = false;
  bool passed = false;
  std::optional<Failure> failure;
  std::string detail;
  int trial = 0;
};

/// Every probe of `inner` also lies in `outer`. Probes are the centers of a lattice of pitch
/// `step` over inner's bounds plus each piece's vertex centroid.
bool area_subset(const Area& inner, const Area& outer, double step);

/// The three pass conditions. Pure; `executed` is true.
RunResult judge(const std::optional<GeneratedPlan>& plan, const std::vector<std::string>& expected_actions,
                const Area& expected_area, const std::vector<std::string>& scene_actions, bool coordinate_level,
                double probe_step);

/// Pre-generated scene descriptions, one per benchmark repeat.
std::vector<std::string> load_descriptions(const std::filesystem::path& dir, const std::string& scene);

struct CaseContext {
  const SceneGraph* graph = nullptr;
  std::vector<std::string> descriptions;
  llm::ChatBackend* backend = nullptr;
  sim::SimConfig sim{};
  llm::PlanningOptions planning{};
  llm::ExampleLibrary examples = llm::ExampleLibrary::builtin();
};

/// One run per repeat; trial k uses description variant k and seeds from k. Errors become
/// results.
std::vector<RunResult> run_case(const TestCase& tc, CaseContext& context, int repeats = 5);

struct CaseResult {
  std::string id;
  std::vector<llm::Tag> tags;
  std::vector<RunResult> runs;
};

struct Tally {
  std::uint64_t runs = 0;
  std::uint64_t passed = 0;
  std::uint64_t executed = 0;

  Tally& operator+=(const Tally& o) {
    runs += o.runs;
    passed += o.passed;
    executed += o.executed;
    return *this;
  }
};

/// "Total" plus one entry per tag present. A case with two tags counts toward both.
std::map<std::string, Tally> tally(const std::vector<CaseResult>& results);

/// num/den rounded half up to two decimals, trailing zeros dropped but one decimal kept:
/// 9/10 -> "0.9", 1 -> "1.0", 13/15 -> "0.87".
std::string format_rate(std::uint64_t num, std::uint64_t den);
/// "success (execution)".
std::string format_cell(const Tally& t);

/// Text table with columns Total, OA, RC, SS, PI. Empty results give the header only.
std::string report_table(const std::vector<CaseResult>& results, const std::string& label);
/// One JSON object per run.
std::string report_rows(const std::vector<CaseResult>& results);

enum class BackendKind { Mock, Remote };

struct BenchConfig {
  std::filesystem::path data_dir = POPULACE_DATA_DIR;
  std::filesystem::path cases_dir;  // defaults to data_dir / "cases"
  int repeats = 5;
  BackendKind backend = BackendKind::Mock;
  llm::RemoteConfig remote{};
};

std::vector<CaseResult> run_benchmark(const std::vector<TestCase>& cases, const BenchConfig& config);

}  // namespace populace::bench
