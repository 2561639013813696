#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "populace/area.hpp"
#include "populace/errors.hpp"
#include "populace/scene.hpp"

namespace populace::script {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, SourceLoc loc);
  SourceLoc loc() const { return loc_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  SourceLoc loc_;
};

enum class RuntimeKind {
  UnknownObject,
  UnknownCharacter,
  UnknownName,
  TypeMismatch,
  IndexError,
  InvalidArgument,
  BudgetExceeded,
  IncompletePlan,
};

const char* to_string(RuntimeKind kind);

class ScriptRuntimeError : public Error {
 public:
  ScriptRuntimeError(RuntimeKind kind, std::string identifier, SourceLoc loc, const std::string& detail = {});
  RuntimeKind kind() const { return kind_; }
  /// The offending object id, character name, variable, or tool.
  const std::string& identifier() const { return identifier_; }
  SourceLoc loc() const { return loc_; }

 private:
  RuntimeKind kind_;
  std::string identifier_;
  SourceLoc loc_;
};

// ---------------------------------------------------------------- AST

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<const Expr>;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Expr {
  enum class Kind {
    Number,
    String,
    Bool,
    None,
    Name,
    List,
    Call,       // target(items..., kwargs...)
    Attribute,  // target.text
    Subscript,  // target[index]
    Unary,      // text in {"-", "+"}
    Not,
    Binary,   // items[0] text items[1]
    Compare,  // items[0] ops[0] items[1] ops[1] items[2] ...
    And,
    Or,
  };

  Kind kind = Kind::None;
  SourceLoc loc;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<ExprPtr> items;
  std::vector<std::pair<std::string, ExprPtr>> kwargs;
  std::vector<std::string> ops;
  ExprPtr target;
  ExprPtr index;
};

struct Stmt {
  enum class Kind { Expr, Assign, AugAssign, For, If, Return, Pass, Break, Continue };

  Kind kind = Kind::Pass;
  SourceLoc loc;
  ExprPtr target;  // Assign/AugAssign lvalue
  ExprPtr value;   // Assign/AugAssign/Expr/Return (may be null for a bare return)
  std::string op;  // AugAssign operator without '='
  std::string var;  // For loop variable
  ExprPtr iter;
  Block body;  // For body
  std::vector<std::pair<ExprPtr, Block>> branches;  // If/elif chain
  Block orelse;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  Block body;
  SourceLoc loc;
};

struct Script {
  std::string source;
  std::optional<std::string> docstring;
  FunctionDef function;
};

/// Throws SyntaxError.
Script parse(std::string_view source);

/// Canonical source text; parse(print(s)) is structurally equal to s.
std::string print(const Script& script);

/// Location-free S-expression dump of the tree, for structural comparison.
std::string dump_ast(const Script& script);

/// Contents of the first fenced code block in a chat reply, if any.
std::optional<std::string> extract_code_block(std::string_view reply);

// ---------------------------------------------------------------- runtime

struct CharacterHandle {
  std::string name;
  bool operator==(const CharacterHandle&) const = default;
};

struct Value;
using List = std::vector<Value>;
using ListPtr = std::shared_ptr<List>;
using AreaPtr = std::shared_ptr<const Area>;

struct Value {
  std::variant<std::monostate, double, bool, std::string, CharacterHandle, AreaPtr, ListPtr> data;

  Value() = default;
  Value(double d) : data(d) {}
  Value(bool b) : data(b) {}
  Value(std::string s) : data(std::move(s)) {}
  Value(const char* s) : data(std::string(s)) {}
  Value(CharacterHandle h) : data(std::move(h)) {}
  Value(AreaPtr a) : data(std::move(a)) {}
  Value(ListPtr l) : data(std::move(l)) {}

  bool is_none() const { return std::holds_alternative<std::monostate>(data); }
  const char* type_name() const;
  std::string repr() const;
};

Value make_list(List items = {});

struct CharacterInfo {
  std::string name;
  Vec2 position{};
};

/// Read-only view of the world a script runs against.
struct ScriptWorld {
  const SceneGraph* graph = nullptr;
  std::vector<CharacterInfo> characters;
  std::set<std::string> occupied_objects;
  AreaParams area_params{};
};

struct OrientationRequest {
  enum class Kind { Object, Character, Point };
  Kind kind = Kind::Object;
  std::string ref;
  Vec2 point{};
};

using PositionRequest = std::variant<Area, Vec2>;

struct CharacterPlan {
  std::string character;
  PositionRequest position;
  std::optional<OrientationRequest> orientation;
  std::string action;
};

struct ExecOutcome {
  std::vector<CharacterPlan> plans;
  /// One line per tool call: `name(args) -> result`.
  std::vector<std::string> tool_calls;
  std::uint64_t steps = 0;
};

struct ExecOptions {
  std::uint64_t step_budget = 100000;
};

/// Runs the script's function. Throws ScriptRuntimeError.
ExecOutcome execute(const Script& script, const ScriptWorld& world, const ExecOptions& options = {});

struct ToolSpec {
  std::string name;
  std::vector<std::string> params;
  std::size_t required = 0;
  std::string summary;
};

/// Every callable available to scripts besides methods on handles and lists.
const std::vector<ToolSpec>& tool_registry();

/// One `name(params)  # summary` line per tool, for prompts.
std::string tool_signatures();

/// Objects CloseTo `anchor` whose facing points at the anchor within `max_angle`.
std::vector<std::string> objects_associated_with(const SceneGraph& graph, const std::string& anchor,
                                                 const SceneGraphParams& params = {},
                                                 double max_angle = kPi / 3.0);

/// Objects other than the anchors whose box center lies in area_between(a, b).
std::vector<std::string> objects_between(const SceneGraph& graph, const std::string& a, const std::string& b);

/// Argmin of box_distance to `anchor` over `candidates` (all other objects when empty); ties by
/// candidate order.
std::optional<std::string> closest_object(const SceneGraph& graph, const std::string& anchor,
                                          const std::vector<std::string>& candidates = {});

}  // namespace populace::script
