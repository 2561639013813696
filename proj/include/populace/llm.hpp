#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "populace/scene.hpp"
#include "populace/script.hpp"
#include "populace/sim.hpp"

namespace populace::llm {

enum class Role { Describer, Narrator, Parser };
const char* to_string(Role role);
std::optional<Role> role_from_string(std::string_view text);

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  Role role = Role::Narrator;
  std::vector<ChatMessage> messages;
  double temperature = 0.1;
  int max_tokens = 1024;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Throws BackendError.
  virtual std::string send(const ChatRequest& request) = 0;
  virtual std::string model() const = 0;
  /// Benchmark repeat index; backends that script per-trial replies switch to that trial.
  virtual void begin_trial(int) {}
};

/// Canned replies consumed in order. The document is either
///   {"model": ..., "replies": [{"role": "narrator", "text": ...}, ...], "cycle": false}
/// or {"model": ..., "trials": [[reply, ...], ...]} with one reply list per benchmark repeat.
/// Without cycling, a request whose role differs from the next reply's, or one past the end, is a
/// BackendError. A cycling mock wraps around and serves the next reply of the requested role whose
/// `match` pattern (if any) fits the request.
class MockBackend : public ChatBackend {
 public:
  struct Reply {
    Role role;
    std::string text;
    /// Cycling mocks only: ECMAScript pattern searched in the request's last user message; the
    /// reply is skipped when it does not match.
    std::optional<std::string> match{};
  };

  explicit MockBackend(std::vector<Reply> replies, bool cycle = false, std::string model = "mock");
  /// Throws SchemaError.
  static MockBackend from_json(const nlohmann::json& doc);
  static MockBackend load(const std::filesystem::path& path);

  std::string send(const ChatRequest& request) override;
  std::string model() const override { return model_; }
  void begin_trial(int trial) override;

  std::size_t consumed() const { return next_; }
  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::vector<std::vector<Reply>> trials_;
  std::size_t trial_ = 0;
  std::size_t next_ = 0;
  std::array<std::size_t, 3> role_next_{};
  bool cycle_ = false;
  std::string model_;
  std::vector<ChatRequest> requests_;
};

struct RemoteConfig {
  /// Base URL such as "https://api.openai.com"; requests go to `<url>/v1/chat/completions`.
  std::string url = "http://127.0.0.1:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key;
  int max_attempts = 3;
  int timeout_seconds = 120;

  /// POPULACE_LLM_URL, POPULACE_LLM_MODEL and POPULACE_LLM_KEY (falling back to OPENAI_API_KEY)
  /// override the given values.
  static RemoteConfig from_env(RemoteConfig base);
  static RemoteConfig from_env() { return from_env(RemoteConfig()); }
};

/// Chat-completions client. Transport failures, 429 and 5xx responses are retried up to
/// `max_attempts` times; anything else fails at once.
class RemoteBackend : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}
  std::string send(const ChatRequest& request) override;
  std::string model() const override { return config_.model; }

  static nlohmann::json request_body(const RemoteConfig& config, const ChatRequest& request);
  /// Throws BackendError on a body without choices[0].message.content.
  static std::string reply_text(const std::string& body);

 private:
  RemoteConfig config_;
};

/// Benchmark tags.
enum class Tag { OA, RC, SS, PI };
const char* to_string(Tag tag);
std::optional<Tag> tag_from_string(std::string_view text);

struct HistoryEntry {
  std::string description;
  std::string status;  // "ongoing" or "completed"
  std::vector<std::string> participants;
};

struct CharacterStatus {
  std::string name;
  Vec2 position{};
  bool busy = false;
};

/// Everything a planning prompt is assembled from.
struct PromptBundle {
  std::string description;  // D
  std::vector<HistoryEntry> history;
  std::vector<std::string> idle;
  std::vector<CharacterStatus> characters;
  std::vector<std::string> instructions;  // T
  std::vector<Tag> example_tags;
  bool chain_of_thought = true;
};

/// In-context example pairs, one per tag plus a default used outside benchmarks.
struct ExampleLibrary {
  struct Example {
    std::string input;
    std::string output;
  };
  std::map<std::string, Example> describer;
  std::map<std::string, Example> narrator;
  std::map<std::string, Example> parser;

  static ExampleLibrary builtin();
  /// Keys to use: the tags' names, or "default" when there are none.
  static std::vector<std::string> keys_for(const std::vector<Tag>& tags);
};

std::vector<ChatMessage> describer_messages(const SceneGraph& graph, const std::vector<Region>& regions,
                                            const ExampleLibrary& examples);
std::vector<ChatMessage> narrator_messages(const PromptBundle& bundle, const ExampleLibrary& examples);
std::vector<ChatMessage> parser_messages(const PromptBundle& bundle, const std::string& event,
                                         const std::vector<std::string>& occupied_objects,
                                         const ExampleLibrary& examples);

/// All messages as one text block, for golden files and traces.
std::string render_messages(const std::vector<ChatMessage>& messages);
nlohmann::json messages_to_json(const std::vector<ChatMessage>& messages);

/// Receives every exchange: role, the request messages, the reply.
using ExchangeLog = std::function<void(Role, const std::vector<ChatMessage>&, const std::string&)>;

struct PlanningOptions {
  int max_attempts = 3;
  double temperature = 0.1;
  int max_tokens = 1024;
  ExchangeLog log;
};

/// Returns the backend reply verbatim. Throws BackendError.
std::string describe_scene(const SceneGraph& graph, const std::vector<Region>& regions, ChatBackend& backend,
                           const ExampleLibrary& examples = ExampleLibrary::builtin(),
                           const PlanningOptions& options = {});

struct NarrationResult {
  std::string event;
  std::vector<std::string> participants;
  int attempts = 0;
  std::vector<std::string> feedback;
};

/// Splits a narrator reply into its "Event:" and "Participants:" lines.
std::optional<NarrationResult> parse_narration(const std::string& reply);

/// Throws PlanningError when no reply within the budget names only idle characters, and
/// BackendError on transport failure.
NarrationResult narrate(const PromptBundle& bundle, ChatBackend& backend,
                        const ExampleLibrary& examples = ExampleLibrary::builtin(),
                        const PlanningOptions& options = {});

struct ParseResult {
  script::ExecOutcome outcome;
  std::string source;
  int attempts = 0;
  std::vector<std::string> feedback;
};

/// Extra acceptance check on an executed script, e.g. grounding. Throws on rejection; the
/// message is fed back to the model.
using OutcomeValidator = std::function<void(const script::ExecOutcome&)>;

/// Throws ExecutionError carrying the failure class of the last attempt, or BackendError.
ParseResult parse_event(const PromptBundle& bundle, const std::string& event, const script::ScriptWorld& world,
                        ChatBackend& backend, const OutcomeValidator& validate = {},
                        const ExampleLibrary& examples = ExampleLibrary::builtin(),
                        const PlanningOptions& options = {});

/// Narrator plus event parser over a live world. Consumes pending instructions and writes every
/// exchange to the world trace.
class LlmPlanner : public sim::EventPlanner {
 public:
  LlmPlanner(ChatBackend& backend, std::string description, ExampleLibrary examples = ExampleLibrary::builtin(),
             PlanningOptions options = {});
  std::optional<sim::PlannedEvent> plan(sim::World& world, const std::vector<std::string>& idle) override;

  const std::string& description() const { return description_; }

 private:
  ChatBackend& backend_;
  std::string description_;
  ExampleLibrary examples_;
  PlanningOptions options_;
  std::uint64_t calls_ = 0;
};

/// Narrator history as it stands at call time.
std::vector<HistoryEntry> history_of(const sim::World& world);

}  // namespace populace::llm
