// Tree-walking interpreter and the tool bindings scripts call into.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

#include "populace/script.hpp"

namespace populace::script {

const char* to_string(RuntimeKind kind) {
  switch (kind) {
    case RuntimeKind::UnknownObject: return "UnknownObject";
    case RuntimeKind::UnknownCharacter: return "UnknownCharacter";
    case RuntimeKind::UnknownName: return "UnknownName";
    case RuntimeKind::TypeMismatch: return "TypeMismatch";
    case RuntimeKind::IndexError: return "IndexError";
    case RuntimeKind::InvalidArgument: return "InvalidArgument";
    case RuntimeKind::BudgetExceeded: return "BudgetExceeded";
    case RuntimeKind::IncompletePlan: return "IncompletePlan";
  }
  return "?";
}

ScriptRuntimeError::ScriptRuntimeError(RuntimeKind kind, std::string identifier, SourceLoc loc,
                                       const std::string& detail)
    : Error(std::string(to_string(kind)) + " '" + identifier + "' at line " + std::to_string(loc.line) +
            ", column " + std::to_string(loc.column) + (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      identifier_(std::move(identifier)),
      loc_(loc) {}

Value make_list(List items) { return Value(std::make_shared<List>(std::move(items))); }

const char* Value::type_name() const {
  switch (data.index()) {
    case 0: return "None";
    case 1: return "number";
    case 2: return "bool";
    case 3: return "string";
    case 4: return "character";
    case 5: return "area";
    default: return "list";
  }
}

namespace {

std::string number_repr(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string Value::repr() const {
  struct Visitor {
    std::string operator()(std::monostate) const { return "None"; }
    std::string operator()(double d) const { return number_repr(d); }
    std::string operator()(bool b) const { return b ? "True" : "False"; }
    std::string operator()(const std::string& s) const { return "'" + s + "'"; }
    std::string operator()(const CharacterHandle& h) const { return "<character " + h.name + ">"; }
    std::string operator()(const AreaPtr& a) const {
      return std::string("<area ") + to_string(a->kind) + (a->anchor_id ? " " + *a->anchor_id : "") + ">";
    }
    std::string operator()(const ListPtr& l) const {
      std::string s = "[";
      for (std::size_t i = 0; i < l->size(); ++i) s += (i ? ", " : "") + (*l)[i].repr();
      return s + "]";
    }
  };
  return std::visit(Visitor{}, data);
}

std::vector<std::string> objects_associated_with(const SceneGraph& graph, const std::string& anchor,
                                                 const SceneGraphParams& params, double max_angle) {
  const auto& a = graph.at(anchor);
  std::vector<std::string> out;
  for (const auto& id : graph.sources_of(anchor, RelationKind::CloseTo)) {
    const auto& obj = graph.at(id);
    const auto toward = normalized(a.box.center.xy() - obj.box.center.xy());
    if (!toward) continue;
    if (angle_between(estimate_orientation(obj, graph, params), *toward) <= max_angle + 1e-9) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> objects_between(const SceneGraph& graph, const std::string& a, const std::string& b) {
  const Area corridor = area_between(a, b, graph);
  std::vector<std::string> out;
  for (const auto& obj : graph.objects()) {
    if (obj.id == a || obj.id == b) continue;
    if (corridor.contains(obj.box.center.xy())) out.push_back(obj.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> closest_object(const SceneGraph& graph, const std::string& anchor,
                                          const std::vector<std::string>& candidates) {
  const auto& a = graph.at(anchor);
  std::optional<std::string> best;
  double best_d = 0.0;
  auto consider = [&](const SceneObject& obj) {
    if (obj.id == a.id) return;
    const double d = box_distance(a.box, obj.box);
    if (!best || d < best_d) {
      best = obj.id;
      best_d = d;
    }
  };
  if (candidates.empty()) {
    for (const auto& obj : graph.objects()) consider(obj);
  } else {
    for (const auto& id : candidates) consider(graph.at(id));
  }
  return best;
}

namespace {

enum class ToolId {
  GetObjectSupporting,
  GetObjectsSupportedBy,
  GetObjectsInFrontOf,
  GetObjectsBehind,
  GetObjectsLeftOf,
  GetObjectsRightOf,
  GetObjectsCloseTo,
  GetObjectsAssociatedWith,
  GetObjectsBetween,
  GetClosestObject,
  GetIntersectedArea,
  GetDistanceBetween,
  IsObjectOccupied,
  IsObjectOfLabel,
  AreaInteractWith,
  AreaSitOn,
  AreaAdjacentTo,
  AreaCloseTo,
  AreaInFrontOf,
  AreaBehind,
  AreaLeftOf,
  AreaRightOf,
  AreaBetween,
  AreaAlignedWith,
  GetCharacter,
  Len,
  Range,
  Min,
  Max,
  Abs,
};

struct ToolEntry {
  ToolId id;
  ToolSpec spec;
};

const std::vector<ToolEntry>& tool_table() {
  static const std::vector<ToolEntry> table = {
      {ToolId::GetObjectSupporting, {"get_object_supporting", {"anchor"}, 1, "object the anchor rests on, or None"}},
      {ToolId::GetObjectsSupportedBy, {"get_objects_supported_by", {"anchor"}, 1, "objects resting on the anchor"}},
      {ToolId::GetObjectsInFrontOf, {"get_objects_in_front_of", {"anchor"}, 1, "objects in front of the anchor"}},
      {ToolId::GetObjectsBehind, {"get_objects_behind", {"anchor"}, 1, "objects behind the anchor"}},
      {ToolId::GetObjectsLeftOf, {"get_objects_left_of", {"anchor"}, 1, "objects to the anchor's left"}},
      {ToolId::GetObjectsRightOf, {"get_objects_right_of", {"anchor"}, 1, "objects to the anchor's right"}},
      {ToolId::GetObjectsCloseTo, {"get_objects_close_to", {"anchor"}, 1, "objects near the anchor"}},
      {ToolId::GetObjectsAssociatedWith,
       {"get_objects_associated_with", {"anchor"}, 1, "nearby objects facing the anchor, e.g. chairs at a desk"}},
      {ToolId::GetObjectsBetween,
       {"get_objects_between", {"anchor_1", "anchor_2"}, 2, "objects located between two anchors"}},
      {ToolId::GetClosestObject,
       {"get_closest_object", {"anchor", "candidates"}, 1, "nearest object, optionally among a candidate list"}},
      {ToolId::GetIntersectedArea,
       {"get_intersected_area", {"area_1", "area_2"}, 2, "region covered by both areas"}},
      {ToolId::GetDistanceBetween,
       {"get_distance_between", {"object_1", "object_2"}, 2, "gap in meters between two objects or characters"}},
      {ToolId::IsObjectOccupied, {"is_object_occupied", {"object"}, 1, "whether a character is using the object"}},
      {ToolId::IsObjectOfLabel, {"is_object_of_label", {"object", "label"}, 2, "whether the object has the label"}},
      {ToolId::AreaInteractWith, {"get_area_to_interact_with", {"object"}, 1, "where to stand to use the object"}},
      {ToolId::AreaSitOn, {"get_area_to_sit_on", {"object"}, 1, "seat surface of a sittable object"}},
      {ToolId::AreaAdjacentTo, {"get_area_adjacent_to", {"object"}, 1, "narrow band around the object"}},
      {ToolId::AreaCloseTo, {"get_area_close_to", {"object"}, 1, "wide band around the object"}},
      {ToolId::AreaInFrontOf, {"get_area_in_front_of", {"object"}, 1, "region in front of the object"}},
      {ToolId::AreaBehind, {"get_area_behind", {"object"}, 1, "region behind the object"}},
      {ToolId::AreaLeftOf, {"get_area_left_of", {"object"}, 1, "region to the object's left"}},
      {ToolId::AreaRightOf, {"get_area_right_of", {"object"}, 1, "region to the object's right"}},
      {ToolId::AreaBetween, {"get_area_between", {"object_1", "object_2"}, 2, "corridor joining two objects"}},
      {ToolId::AreaAlignedWith,
       {"get_area_aligned_with", {"object_1", "object_2"}, 2, "strip on the line through both objects"}},
      {ToolId::GetCharacter, {"get_character", {"name"}, 1, "handle with set_position/set_orientation/set_target_action"}},
      {ToolId::Len, {"len", {"value"}, 1, "length of a list or string"}},
      {ToolId::Range, {"range", {"start", "stop", "step"}, 1, "list of integers"}},
      {ToolId::Min, {"min", {"values"}, 1, "smallest of a list or of the arguments"}},
      {ToolId::Max, {"max", {"values"}, 1, "largest of a list or of the arguments"}},
      {ToolId::Abs, {"abs", {"x"}, 1, "absolute value"}},
  };
  return table;
}

const std::unordered_map<std::string, const ToolEntry*>& tool_index() {
  static const auto index = [] {
    std::unordered_map<std::string, const ToolEntry*> m;
    for (const auto& e : tool_table()) m.emplace(e.spec.name, &e);
    return m;
  }();
  return index;
}

bool is_variadic(ToolId id) { return id == ToolId::Min || id == ToolId::Max; }

struct PendingPlan {
  std::optional<PositionRequest> position;
  std::optional<OrientationRequest> orientation;
  std::optional<std::string> action;
};

enum class Flow { Normal, Break, Continue, Return };

class Interpreter {
 public:
  Interpreter(const Script& script, const ScriptWorld& world, const ExecOptions& options)
      : script_(script), world_(world), options_(options) {
    if (!world.graph) throw ValidationError("script world has no scene graph");
  }

  ExecOutcome run() {
    const auto& fn = script_.function;
    if (!fn.params.empty()) {
      throw ScriptRuntimeError(RuntimeKind::TypeMismatch, fn.name, fn.loc,
                               "the event function is called without arguments");
    }
    Value result;
    if (exec_block(fn.body, result) != Flow::Return) result = Value();
    ExecOutcome out;
    out.tool_calls = std::move(calls_);
    out.steps = steps_;
    collect_plans(result, fn.loc, out);
    return out;
  }

 private:
  using Loc = SourceLoc;

  [[noreturn]] void raise(RuntimeKind kind, const std::string& ident, Loc loc, const std::string& detail = {}) const {
    throw ScriptRuntimeError(kind, ident, loc, detail);
  }

  [[noreturn]] void mismatch(const std::string& ident, Loc loc, const std::string& expected, const Value& got) const {
    raise(RuntimeKind::TypeMismatch, ident, loc, "expected " + expected + ", got " + got.type_name());
  }

  void tick(Loc loc) {
    if (++steps_ > options_.step_budget) {
      raise(RuntimeKind::BudgetExceeded, script_.function.name, loc,
            "exceeded " + std::to_string(options_.step_budget) + " evaluation steps");
    }
  }

  // ------------------------------------------------------------ statements

  Flow exec_block(const Block& block, Value& result) {
    for (const auto& s : block) {
      const Flow f = exec(*s, result);
      if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
  }

  Flow exec(const Stmt& s, Value& result) {
    tick(s.loc);
    switch (s.kind) {
      case Stmt::Kind::Expr: eval(*s.value); return Flow::Normal;
      case Stmt::Kind::Assign: assign(*s.target, eval(*s.value)); return Flow::Normal;
      case Stmt::Kind::AugAssign: {
        const Value current = eval(*s.target);
        assign(*s.target, arith(s.op, current, eval(*s.value), s.loc));
        return Flow::Normal;
      }
      case Stmt::Kind::Pass: return Flow::Normal;
      case Stmt::Kind::Break: return Flow::Break;
      case Stmt::Kind::Continue: return Flow::Continue;
      case Stmt::Kind::Return:
        result = s.value ? eval(*s.value) : Value();
        return Flow::Return;
      case Stmt::Kind::For: {
        const Value seq = eval(*s.iter);
        const auto* list = std::get_if<ListPtr>(&seq.data);
        if (!list) mismatch("for " + s.var, s.iter->loc, "list", seq);
        const ListPtr items = *list;
        // Indexed so that appending inside the loop extends the iteration, as in Python.
        for (std::size_t i = 0; i < items->size(); ++i) {
          tick(s.loc);
          env_[s.var] = (*items)[i];
          const Flow f = exec_block(s.body, result);
          if (f == Flow::Break) break;
          if (f == Flow::Return) return f;
        }
        return Flow::Normal;
      }
      case Stmt::Kind::If: {
        for (const auto& [cond, body] : s.branches) {
          if (truthy(eval(*cond))) return exec_block(body, result);
        }
        return exec_block(s.orelse, result);
      }
    }
    return Flow::Normal;
  }

  void assign(const Expr& target, Value value) {
    if (target.kind == Expr::Kind::Name) {
      if (tool_index().contains(target.text)) {
        raise(RuntimeKind::TypeMismatch, target.text, target.loc, "cannot rebind a tool name");
      }
      env_[target.text] = std::move(value);
      return;
    }
    const Value container = eval(*target.target);
    const auto* list = std::get_if<ListPtr>(&container.data);
    if (!list) mismatch("subscript", target.loc, "list", container);
    const std::size_t i = list_index(**list, eval(*target.index), target.loc);
    (**list)[i] = std::move(value);
  }

  // ------------------------------------------------------------ expressions

  Value eval(const Expr& e) {
    tick(e.loc);
    switch (e.kind) {
      case Expr::Kind::Number: return e.number;
      case Expr::Kind::String: return e.text;
      case Expr::Kind::Bool: return e.boolean;
      case Expr::Kind::None: return {};
      case Expr::Kind::Name: {
        const auto it = env_.find(e.text);
        if (it == env_.end()) {
          if (tool_index().contains(e.text)) {
            raise(RuntimeKind::TypeMismatch, e.text, e.loc, "tools can only be called");
          }
          raise(RuntimeKind::UnknownName, e.text, e.loc, "name is not defined");
        }
        return it->second;
      }
      case Expr::Kind::List: {
        List items;
        items.reserve(e.items.size());
        for (const auto& item : e.items) items.push_back(eval(*item));
        return make_list(std::move(items));
      }
      case Expr::Kind::Call: return call(e);
      case Expr::Kind::Attribute:
        raise(RuntimeKind::TypeMismatch, e.text, e.loc, "attributes can only be called as methods");
      case Expr::Kind::Subscript: {
        const Value container = eval(*e.target);
        const Value index = eval(*e.index);
        if (const auto* list = std::get_if<ListPtr>(&container.data)) {
          return (**list)[list_index(**list, index, e.loc)];
        }
        if (const auto* str = std::get_if<std::string>(&container.data)) {
          const auto n = static_cast<long long>(str->size());
          long long i = integer(index, "index", e.loc);
          if (i < 0) i += n;
          if (i < 0 || i >= n) raise(RuntimeKind::IndexError, "index", e.loc, "string index out of range");
          return std::string(1, (*str)[static_cast<std::size_t>(i)]);
        }
        mismatch("subscript", e.loc, "list", container);
      }
      case Expr::Kind::Unary: {
        const Value v = eval(*e.items[0]);
        const double d = number(v, e.text, e.loc);
        return e.text == "-" ? -d : d;
      }
      case Expr::Kind::Not: return !truthy(eval(*e.items[0]));
      case Expr::Kind::Binary: {
        const Value lhs = eval(*e.items[0]);
        const Value rhs = eval(*e.items[1]);
        return arith(e.text, lhs, rhs, e.loc);
      }
      case Expr::Kind::Compare: {
        Value lhs = eval(*e.items[0]);
        for (std::size_t i = 0; i < e.ops.size(); ++i) {
          Value rhs = eval(*e.items[i + 1]);
          if (!compare(e.ops[i], lhs, rhs, e.loc)) return false;
          lhs = std::move(rhs);
        }
        return true;
      }
      case Expr::Kind::And: {
        Value v;
        for (const auto& item : e.items) {
          v = eval(*item);
          if (!truthy(v)) return v;
        }
        return v;
      }
      case Expr::Kind::Or: {
        Value v;
        for (const auto& item : e.items) {
          v = eval(*item);
          if (truthy(v)) return v;
        }
        return v;
      }
    }
    return {};
  }

  static bool truthy(const Value& v) {
    struct Visitor {
      bool operator()(std::monostate) const { return false; }
      bool operator()(double d) const { return d != 0.0; }
      bool operator()(bool b) const { return b; }
      bool operator()(const std::string& s) const { return !s.empty(); }
      bool operator()(const CharacterHandle&) const { return true; }
      bool operator()(const AreaPtr& a) const { return !a->empty(); }
      bool operator()(const ListPtr& l) const { return !l->empty(); }
    };
    return std::visit(Visitor{}, v.data);
  }

  static std::optional<double> as_number(const Value& v) {
    if (const auto* d = std::get_if<double>(&v.data)) return *d;
    if (const auto* b = std::get_if<bool>(&v.data)) return *b ? 1.0 : 0.0;
    return std::nullopt;
  }

  double number(const Value& v, const std::string& ident, Loc loc) const {
    if (auto d = as_number(v)) return *d;
    mismatch(ident, loc, "number", v);
  }

  long long integer(const Value& v, const std::string& ident, Loc loc) const {
    const double d = number(v, ident, loc);
    if (d != std::floor(d)) raise(RuntimeKind::TypeMismatch, ident, loc, "expected an integer");
    return static_cast<long long>(d);
  }

  std::size_t list_index(const List& list, const Value& index, Loc loc) const {
    const auto n = static_cast<long long>(list.size());
    long long i = integer(index, "index", loc);
    if (i < 0) i += n;
    if (i < 0 || i >= n) {
      raise(RuntimeKind::IndexError, "index", loc,
            "list index " + number_repr(number(index, "index", loc)) + " out of range for length " +
                std::to_string(n));
    }
    return static_cast<std::size_t>(i);
  }

  static bool equal(const Value& a, const Value& b) {
    const auto na = as_number(a), nb = as_number(b);
    if (na && nb) return *na == *nb;
    if (a.data.index() != b.data.index()) return false;
    if (const auto* la = std::get_if<ListPtr>(&a.data)) {
      const auto& lb = std::get<ListPtr>(b.data);
      if (la->get()->size() != lb->size()) return false;
      for (std::size_t i = 0; i < lb->size(); ++i) {
        if (!equal((**la)[i], (*lb)[i])) return false;
      }
      return true;
    }
    return a.data == b.data;
  }

  bool compare(const std::string& op, const Value& a, const Value& b, Loc loc) const {
    if (op == "==") return equal(a, b);
    if (op == "!=") return !equal(a, b);
    if (op == "in" || op == "not in") {
      bool found = false;
      if (const auto* list = std::get_if<ListPtr>(&b.data)) {
        found = std::any_of((*list)->begin(), (*list)->end(), [&](const Value& v) { return equal(a, v); });
      } else if (const auto* str = std::get_if<std::string>(&b.data)) {
        const auto* needle = std::get_if<std::string>(&a.data);
        if (!needle) mismatch(op, loc, "string", a);
        found = str->find(*needle) != std::string::npos;
      } else {
        mismatch(op, loc, "list or string", b);
      }
      return op == "in" ? found : !found;
    }
    int order = 0;
    const auto na = as_number(a), nb = as_number(b);
    if (na && nb) {
      order = *na < *nb ? -1 : (*na > *nb ? 1 : 0);
    } else if (const auto* sa = std::get_if<std::string>(&a.data)) {
      const auto* sb = std::get_if<std::string>(&b.data);
      if (!sb) mismatch(op, loc, "string", b);
      order = sa->compare(*sb) < 0 ? -1 : (sa->compare(*sb) > 0 ? 1 : 0);
    } else {
      mismatch(op, loc, "number or string", a);
    }
    if (op == "<") return order < 0;
    if (op == "<=") return order <= 0;
    if (op == ">") return order > 0;
    return order >= 0;
  }

  Value arith(const std::string& op, const Value& a, const Value& b, Loc loc) const {
    if (op == "+") {
      if (const auto* sa = std::get_if<std::string>(&a.data)) {
        const auto* sb = std::get_if<std::string>(&b.data);
        if (!sb) mismatch("+", loc, "string", b);
        return *sa + *sb;
      }
      if (const auto* la = std::get_if<ListPtr>(&a.data)) {
        const auto* lb = std::get_if<ListPtr>(&b.data);
        if (!lb) mismatch("+", loc, "list", b);
        List joined = **la;
        joined.insert(joined.end(), (*lb)->begin(), (*lb)->end());
        return make_list(std::move(joined));
      }
    }
    const double x = number(a, op, loc);
    const double y = number(b, op, loc);
    if (op == "+") return x + y;
    if (op == "-") return x - y;
    if (op == "*") return x * y;
    if (y == 0.0) raise(RuntimeKind::InvalidArgument, op, loc, "division by zero");
    if (op == "/") return x / y;
    if (op == "//") return std::floor(x / y);
    return x - y * std::floor(x / y);  // '%' with the sign of the divisor
  }

  // ------------------------------------------------------------ calls

  Value call(const Expr& e) {
    if (e.target->kind == Expr::Kind::Attribute) return method(e);
    if (e.target->kind != Expr::Kind::Name) {
      raise(RuntimeKind::TypeMismatch, "call", e.loc, "only tools and methods can be called");
    }
    const std::string& name = e.target->text;
    const auto it = tool_index().find(name);
    if (it == tool_index().end()) {
      raise(env_.contains(name) ? RuntimeKind::TypeMismatch : RuntimeKind::UnknownName, name, e.target->loc,
            "no such tool");
    }
    const ToolEntry& tool = *it->second;

    std::vector<Value> args;
    for (const auto& a : e.items) args.push_back(eval(*a));
    const auto& params = tool.spec.params;
    if (!is_variadic(tool.id) && args.size() > params.size()) {
      raise(RuntimeKind::TypeMismatch, name, e.loc,
            "takes at most " + std::to_string(params.size()) + " arguments");
    }
    std::vector<std::optional<Value>> bound(std::max(params.size(), args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) bound[i] = std::move(args[i]);
    for (const auto& [key, expr] : e.kwargs) {
      const auto p = std::find(params.begin(), params.end(), key);
      if (p == params.end() || is_variadic(tool.id)) {
        raise(RuntimeKind::TypeMismatch, name, expr->loc, "unexpected keyword argument '" + key + "'");
      }
      auto& slot = bound[static_cast<std::size_t>(p - params.begin())];
      if (slot) raise(RuntimeKind::TypeMismatch, name, expr->loc, "argument '" + key + "' given twice");
      slot = eval(*expr);
    }
    for (std::size_t i = 0; i < tool.spec.required; ++i) {
      if (!bound[i]) raise(RuntimeKind::TypeMismatch, name, e.loc, "missing argument '" + params[i] + "'");
    }
    Value result = invoke(tool.id, name, bound, e.loc);
    if (tool.id < ToolId::Len) {
      std::string line = name + "(";
      bool first = true;
      for (const auto& b : bound) {
        if (!b) continue;
        line += (first ? "" : ", ") + b->repr();
        first = false;
      }
      calls_.push_back(line + ") -> " + result.repr());
    }
    return result;
  }

  std::string object_id(const std::optional<Value>& v, const std::string& tool, Loc loc) const {
    const auto* s = std::get_if<std::string>(&v->data);
    if (!s) mismatch(tool, loc, "object id string", *v);
    if (!world_.graph->find(*s)) raise(RuntimeKind::UnknownObject, *s, loc, "no such object in the scene");
    return *s;
  }

  const CharacterInfo* character(const std::string& name) const {
    for (const auto& c : world_.characters) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  OrientedBox box_of(const std::optional<Value>& v, const std::string& tool, Loc loc) const {
    if (const auto* h = std::get_if<CharacterHandle>(&v->data)) {
      const CharacterInfo* info = character(h->name);
      // A standing character as a thin vertical column.
      return OrientedBox{{info->position.x, info->position.y, 0.9}, {1e-6, 1e-6, 0.9}, 0.0};
    }
    return world_.graph->at(object_id(v, tool, loc)).box;
  }

  static Value id_list(const std::vector<std::string>& ids) {
    List items(ids.begin(), ids.end());
    return make_list(std::move(items));
  }

  AreaPtr area_arg(const std::optional<Value>& v, const std::string& tool, Loc loc) const {
    const auto* a = std::get_if<AreaPtr>(&v->data);
    if (!a) mismatch(tool, loc, "area", *v);
    return *a;
  }

  Value make(AreaKind kind, const std::string& tool, const std::vector<std::optional<Value>>& args, Loc loc) const {
    const auto& graph = *world_.graph;
    const std::string a = object_id(args[0], tool, loc);
    try {
      if (kind == AreaKind::Between || kind == AreaKind::AlignedWith) {
        const std::string b = object_id(args[1], tool, loc);
        return AreaPtr(std::make_shared<Area>(make_area(kind, a, b, graph, world_.area_params)));
      }
      return AreaPtr(std::make_shared<Area>(make_area(kind, a, graph, world_.area_params)));
    } catch (const NotSittable& err) {
      raise(RuntimeKind::InvalidArgument, a, loc, err.what());
    }
  }

  Value extremum(bool want_max, const std::vector<std::optional<Value>>& args, Loc loc) const {
    const char* name = want_max ? "max" : "min";
    List values;
    if (args.size() == 1) {
      const auto* list = std::get_if<ListPtr>(&args[0]->data);
      if (!list) mismatch(name, loc, "list", *args[0]);
      values = **list;
    } else {
      for (const auto& a : args) values.push_back(*a);
    }
    if (values.empty()) raise(RuntimeKind::InvalidArgument, name, loc, "empty sequence");
    Value best = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (compare(want_max ? ">" : "<", values[i], best, loc)) best = values[i];
    }
    return best;
  }

  Value invoke(ToolId id, const std::string& name, const std::vector<std::optional<Value>>& args, Loc loc) {
    const auto& graph = *world_.graph;
    auto relation = [&](RelationKind kind) { return id_list(graph.sources_of(object_id(args[0], name, loc), kind)); };
    switch (id) {
      case ToolId::GetObjectSupporting: {
        const auto sup = graph.sources_of(object_id(args[0], name, loc), RelationKind::Supports);
        return sup.empty() ? Value() : Value(sup.front());
      }
      case ToolId::GetObjectsSupportedBy:
        return id_list(graph.targets_of(object_id(args[0], name, loc), RelationKind::Supports));
      case ToolId::GetObjectsInFrontOf: return relation(RelationKind::InFrontOf);
      case ToolId::GetObjectsBehind: return relation(RelationKind::Behind);
      case ToolId::GetObjectsLeftOf: return relation(RelationKind::LeftOf);
      case ToolId::GetObjectsRightOf: return relation(RelationKind::RightOf);
      case ToolId::GetObjectsCloseTo: return relation(RelationKind::CloseTo);
      case ToolId::GetObjectsAssociatedWith:
        return id_list(objects_associated_with(graph, object_id(args[0], name, loc), world_.area_params.graph));
      case ToolId::GetObjectsBetween:
        return id_list(objects_between(graph, object_id(args[0], name, loc), object_id(args[1], name, loc)));
      case ToolId::GetClosestObject: {
        const std::string anchor = object_id(args[0], name, loc);
        std::vector<std::string> candidates;
        if (args.size() > 1 && args[1] && !args[1]->is_none()) {
          const auto* list = std::get_if<ListPtr>(&args[1]->data);
          if (!list) mismatch(name, loc, "list of object ids", *args[1]);
          for (const auto& v : **list) candidates.push_back(object_id(v, name, loc));
          if (candidates.empty()) return {};
        }
        const auto best = closest_object(graph, anchor, candidates);
        return best ? Value(*best) : Value();
      }
      case ToolId::GetIntersectedArea:
        return AreaPtr(std::make_shared<Area>(
            intersect_areas(*area_arg(args[0], name, loc), *area_arg(args[1], name, loc))));
      case ToolId::GetDistanceBetween: {
        for (const auto& a : {args[0], args[1]}) {
          if (const auto* h = std::get_if<CharacterHandle>(&a->data); h && !character(h->name)) {
            raise(RuntimeKind::UnknownCharacter, h->name, loc);
          }
        }
        return box_distance(box_of(args[0], name, loc), box_of(args[1], name, loc));
      }
      case ToolId::IsObjectOccupied: return world_.occupied_objects.contains(object_id(args[0], name, loc));
      case ToolId::IsObjectOfLabel: {
        const auto& obj = graph.at(object_id(args[0], name, loc));
        const auto* label = std::get_if<std::string>(&args[1]->data);
        if (!label) mismatch(name, loc, "label string", *args[1]);
        return obj.label == *label;
      }
      case ToolId::AreaInteractWith: return make(AreaKind::InteractWith, name, args, loc);
      case ToolId::AreaSitOn: return make(AreaKind::SitOn, name, args, loc);
      case ToolId::AreaAdjacentTo: return make(AreaKind::AdjacentTo, name, args, loc);
      case ToolId::AreaCloseTo: return make(AreaKind::CloseTo, name, args, loc);
      case ToolId::AreaInFrontOf: return make(AreaKind::InFrontOf, name, args, loc);
      case ToolId::AreaBehind: return make(AreaKind::Behind, name, args, loc);
      case ToolId::AreaLeftOf: return make(AreaKind::LeftOf, name, args, loc);
      case ToolId::AreaRightOf: return make(AreaKind::RightOf, name, args, loc);
      case ToolId::AreaBetween: return make(AreaKind::Between, name, args, loc);
      case ToolId::AreaAlignedWith: return make(AreaKind::AlignedWith, name, args, loc);
      case ToolId::GetCharacter: {
        const auto* who = std::get_if<std::string>(&args[0]->data);
        if (!who) mismatch(name, loc, "character name string", *args[0]);
        if (!character(*who)) raise(RuntimeKind::UnknownCharacter, *who, loc, "no such character in the scene");
        if (!pending_.contains(*who)) {
          pending_.emplace(*who, PendingPlan{});
          obtained_.push_back(*who);
        }
        return CharacterHandle{*who};
      }
      case ToolId::Len: {
        if (const auto* l = std::get_if<ListPtr>(&args[0]->data)) return static_cast<double>((*l)->size());
        if (const auto* s = std::get_if<std::string>(&args[0]->data)) return static_cast<double>(s->size());
        mismatch(name, loc, "list or string", *args[0]);
      }
      case ToolId::Range: {
        long long start = 0, stop = 0, step = 1;
        if (args.size() > 1 && args[1]) {
          start = integer(*args[0], name, loc);
          stop = integer(*args[1], name, loc);
        } else {
          stop = integer(*args[0], name, loc);
        }
        if (args.size() > 2 && args[2]) step = integer(*args[2], name, loc);
        if (step == 0) raise(RuntimeKind::InvalidArgument, name, loc, "range step must not be zero");
        List items;
        for (long long i = start; step > 0 ? i < stop : i > stop; i += step) {
          tick(loc);
          items.emplace_back(static_cast<double>(i));
        }
        return make_list(std::move(items));
      }
      case ToolId::Min: return extremum(false, args, loc);
      case ToolId::Max: return extremum(true, args, loc);
      case ToolId::Abs: return std::fabs(number(*args[0], name, loc));
    }
    return {};
  }

  Value method(const Expr& e) {
    const Expr& attr = *e.target;
    const Value self = eval(*attr.target);
    if (!e.kwargs.empty()) raise(RuntimeKind::TypeMismatch, attr.text, e.loc, "methods take positional arguments");
    std::vector<Value> args;
    for (const auto& a : e.items) args.push_back(eval(*a));
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        raise(RuntimeKind::TypeMismatch, attr.text, e.loc, "takes exactly " + std::to_string(n) + " argument");
      }
    };

    if (const auto* list = std::get_if<ListPtr>(&self.data)) {
      if (attr.text == "append") {
        arity(1);
        (*list)->push_back(args[0]);
        return {};
      }
      raise(RuntimeKind::TypeMismatch, attr.text, attr.loc, "lists only support append");
    }
    const auto* handle = std::get_if<CharacterHandle>(&self.data);
    if (!handle) raise(RuntimeKind::TypeMismatch, attr.text, attr.loc, std::string("no methods on ") + self.type_name());
    PendingPlan& plan = pending_.at(handle->name);
    arity(1);
    const Value& arg = args[0];
    if (attr.text == "set_position") {
      if (const auto* area = std::get_if<AreaPtr>(&arg.data)) {
        plan.position = **area;
      } else if (auto p = point(arg)) {
        plan.position = *p;
      } else {
        mismatch(attr.text, e.loc, "area or [x, y]", arg);
      }
    } else if (attr.text == "set_orientation") {
      OrientationRequest req;
      if (const auto* s = std::get_if<std::string>(&arg.data)) {
        if (world_.graph->find(*s)) {
          req = {OrientationRequest::Kind::Object, *s, {}};
        } else if (character(*s)) {
          req = {OrientationRequest::Kind::Character, *s, {}};
        } else {
          raise(RuntimeKind::UnknownObject, *s, e.loc, "nothing by that name to face");
        }
      } else if (const auto* h = std::get_if<CharacterHandle>(&arg.data)) {
        req = {OrientationRequest::Kind::Character, h->name, {}};
      } else if (auto p = point(arg)) {
        req = {OrientationRequest::Kind::Point, {}, *p};
      } else {
        mismatch(attr.text, e.loc, "object id, character, or [x, y]", arg);
      }
      plan.orientation = std::move(req);
    } else if (attr.text == "set_target_action") {
      const auto* s = std::get_if<std::string>(&arg.data);
      if (!s) mismatch(attr.text, e.loc, "action label string", arg);
      if (s->empty()) raise(RuntimeKind::InvalidArgument, attr.text, e.loc, "empty action label");
      plan.action = *s;
    } else {
      raise(RuntimeKind::TypeMismatch, attr.text, attr.loc, "unknown character method");
    }
    return {};
  }

  static std::optional<Vec2> point(const Value& v) {
    const auto* list = std::get_if<ListPtr>(&v.data);
    if (!list || (*list)->size() != 2) return std::nullopt;
    const auto x = as_number((**list)[0]);
    const auto y = as_number((**list)[1]);
    if (!x || !y) return std::nullopt;
    return Vec2{*x, *y};
  }

  void collect_plans(const Value& result, Loc loc, ExecOutcome& out) const {
    std::vector<std::string> names;
    if (result.is_none()) {
      // No explicit return: every character the script configured.
      for (const auto& n : obtained_) {
        const auto& p = pending_.at(n);
        if (p.position || p.action || p.orientation) names.push_back(n);
      }
    } else if (const auto* list = std::get_if<ListPtr>(&result.data)) {
      for (const auto& v : **list) {
        const auto* h = std::get_if<CharacterHandle>(&v.data);
        if (!h) mismatch("return", loc, "list of characters", v);
        if (std::find(names.begin(), names.end(), h->name) == names.end()) names.push_back(h->name);
      }
    } else if (const auto* h = std::get_if<CharacterHandle>(&result.data)) {
      names.push_back(h->name);
    } else {
      mismatch("return", loc, "list of characters", result);
    }
    for (const auto& n : names) {
      const auto& p = pending_.at(n);
      if (!p.position) raise(RuntimeKind::IncompletePlan, n, loc, "set_position was never called");
      if (!p.action) raise(RuntimeKind::IncompletePlan, n, loc, "set_target_action was never called");
      out.plans.push_back(CharacterPlan{n, *p.position, p.orientation, *p.action});
    }
  }

  const Script& script_;
  const ScriptWorld& world_;
  ExecOptions options_;
  std::uint64_t steps_ = 0;
  std::map<std::string, Value> env_;
  std::map<std::string, PendingPlan> pending_;
  std::vector<std::string> obtained_;
  std::vector<std::string> calls_;
};

}  // namespace

const std::vector<ToolSpec>& tool_registry() {
  static const std::vector<ToolSpec> specs = [] {
    std::vector<ToolSpec> out;
    for (const auto& e : tool_table()) out.push_back(e.spec);
    return out;
  }();
  return specs;
}

std::string tool_signatures() {
  std::string out;
  for (const auto& spec : tool_registry()) {
    out += spec.name + "(";
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      out += (i ? ", " : "") + spec.params[i] + (i >= spec.required ? "=None" : "");
    }
    out += ")  # " + spec.summary + "\n";
  }
  out += "character.set_position(area_or_point)  # where the character should go\n";
  out += "character.set_orientation(target)  # object id, character, or [x, y] to face\n";
  out += "character.set_target_action(label)  # action performed on arrival\n";
  return out;
}

ExecOutcome execute(const Script& script, const ScriptWorld& world, const ExecOptions& options) {
  return Interpreter(script, world, options).run();
}

}  // namespace populace::script
