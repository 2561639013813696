// Lexer, recursive-descent parser, and printers for event scripts.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "populace/script.hpp"

namespace populace::script {

SyntaxError::SyntaxError(const std::string& message, SourceLoc loc)
    : Error("syntax error at line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column) +
            ": " + message),
      message_(message),
      loc_(loc) {}

namespace {

enum class Tok { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
  Tok type;
  std::string text;  // identifier, operator, decoded string
  double number = 0.0;
  SourceLoc loc;
};

const std::set<std::string, std::less<>> kKeywords = {
    "def", "return", "for", "in", "if", "elif", "else", "and", "or", "not",
    "True", "False", "None", "pass", "break", "continue",
};

// Constructs the grammar deliberately leaves out; reported by name so the feedback is useful.
const std::set<std::string, std::less<>> kUnsupported = {
    "import", "from", "class", "while", "lambda", "with", "try", "except", "finally",
    "raise", "global", "nonlocal", "yield", "async", "await", "del", "assert", "is",
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    bool at_line_start = true;
    while (pos_ < src_.size()) {
      if (at_line_start && depth_ == 0) {
        if (handle_indentation()) continue;
        at_line_start = false;
      }
      const char c = src_[pos_];
      if (c == '\n') {
        if (depth_ == 0 && !tokens_.empty() && tokens_.back().type != Tok::Newline &&
            tokens_.back().type != Tok::Indent && tokens_.back().type != Tok::Dedent) {
          push(Tok::Newline, "\n");
        }
        advance();
        at_line_start = depth_ == 0;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '\\' && peek(1) == '\n') {
        advance();
        advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_name();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lex_number();
      } else if (c == '"' || c == '\'') {
        lex_string();
      } else {
        lex_operator();
      }
    }
    if (!tokens_.empty() && tokens_.back().type != Tok::Newline && tokens_.back().type != Tok::Dedent) {
      push(Tok::Newline, "\n");
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(Tok::Dedent, "");
    }
    push(Tok::End, "");
    return std::move(tokens_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  SourceLoc here() const { return {line_, col_}; }
  void push(Tok type, std::string text, SourceLoc loc) { tokens_.push_back({type, std::move(text), 0.0, loc}); }
  void push(Tok type, std::string text) { push(type, std::move(text), here()); }

  /// Returns true when the line was blank or a comment and has been consumed.
  bool handle_indentation() {
    int width = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) {
      width = src_[p] == '\t' ? (width / 8 + 1) * 8 : width + 1;
      ++p;
    }
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' || src_[p] == '\r') {
      while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      if (pos_ < src_.size()) advance();
      return true;
    }
    while (pos_ < p) advance();
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(Tok::Indent, "");
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(Tok::Dedent, "");
      }
      if (width != indents_.back()) throw SyntaxError("inconsistent dedent", here());
    }
    return false;
  }

  void lex_name() {
    const SourceLoc loc = here();
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
    std::string word(src_.substr(start, pos_ - start));
    if (kUnsupported.contains(word)) throw SyntaxError("'" + word + "' is not supported in event scripts", loc);
    push(Tok::Name, std::move(word), loc);
  }

  void lex_number() {
    const SourceLoc loc = here();
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '_') advance();
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    std::string text(src_.substr(start, pos_ - start));
    std::erase(text, '_');
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw SyntaxError("malformed number '" + text + "'", loc);
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      throw SyntaxError("malformed number '" + text + peek() + "'", loc);
    }
    tokens_.push_back({Tok::Number, std::move(text), value, loc});
  }

  void lex_string() {
    const SourceLoc loc = here();
    const char quote = peek();
    const bool triple = peek(1) == quote && peek(2) == quote;
    for (int i = 0; i < (triple ? 3 : 1); ++i) advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) throw SyntaxError("unterminated string", loc);
      const char c = peek();
      if (!triple && c == '\n') throw SyntaxError("unterminated string", loc);
      if (c == quote && (!triple || (peek(1) == quote && peek(2) == quote))) {
        for (int i = 0; i < (triple ? 3 : 1); ++i) advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw SyntaxError("unterminated string", loc);
        const char e = peek();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          case '"': out += '"'; break;
          case '\n': break;
          default: out += '\\'; out += e; break;
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    push(Tok::String, std::move(out), loc);
  }

  void lex_operator() {
    const SourceLoc loc = here();
    static const char* const kOps[] = {"//=", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=",
                                       "/=",  "%=", "(",  ")",  "[",  "]",  "{",  "}",  ",",  ":",
                                       ".",   "+",  "-",  "*",  "/",  "%",  "<",  ">",  "="};
    for (const char* op : kOps) {
      const std::string_view sv(op);
      if (src_.substr(pos_, sv.size()) == sv) {
        if (sv == "**" || sv == "{" || sv == "}") {
          throw SyntaxError("'" + std::string(sv) + "' is not supported in event scripts", loc);
        }
        for (std::size_t i = 0; i < sv.size(); ++i) advance();
        if (sv == "(" || sv == "[") ++depth_;
        if (sv == ")" || sv == "]") {
          if (depth_ == 0) throw SyntaxError("unmatched '" + std::string(sv) + "'", loc);
          --depth_;
        }
        push(Tok::Op, std::string(sv), loc);
        return;
      }
    }
    throw SyntaxError(std::string("unexpected character '") + peek() + "'", loc);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

std::shared_ptr<Expr> node(Expr::Kind kind, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->loc = loc;
  return e;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Script parse_module(std::string_view source) {
    Script script;
    script.source = std::string(source);
    skip_newlines();
    if (cur().type == Tok::String) {
      script.docstring = parse_string_literal()->text;
      expect_newline();
      skip_newlines();
    }
    if (!is_name("def")) {
      if (cur().type == Tok::End) throw SyntaxError("expected a function definition", cur().loc);
      throw SyntaxError("only a single function definition is allowed at top level", cur().loc);
    }
    script.function = parse_def();
    skip_newlines();
    if (cur().type != Tok::End) {
      throw SyntaxError("only a single function definition is allowed at top level", cur().loc);
    }
    return script;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& next_tok() const { return toks_[std::min(pos_ + 1, toks_.size() - 1)]; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_op(std::string_view op) const { return cur().type == Tok::Op && cur().text == op; }
  bool is_name(std::string_view word) const { return cur().type == Tok::Name && cur().text == word; }

  [[noreturn]] void fail(const std::string& what) const {
    std::string got;
    switch (cur().type) {
      case Tok::Newline: got = "end of line"; break;
      case Tok::Indent: got = "indent"; break;
      case Tok::Dedent: got = "dedent"; break;
      case Tok::End: got = "end of input"; break;
      default: got = "'" + cur().text + "'"; break;
    }
    throw SyntaxError("expected " + what + ", found " + got, cur().loc);
  }
  void expect_op(std::string_view op) {
    if (!is_op(op)) fail("'" + std::string(op) + "'");
    take();
  }
  std::string expect_identifier() {
    if (cur().type != Tok::Name || kKeywords.contains(cur().text)) fail("identifier");
    return take().text;
  }
  void expect_newline() {
    if (cur().type == Tok::End) return;
    if (cur().type != Tok::Newline) fail("end of line");
    take();
  }
  void skip_newlines() {
    while (cur().type == Tok::Newline) take();
  }

  FunctionDef parse_def() {
    FunctionDef fn;
    fn.loc = cur().loc;
    take();  // def
    fn.name = expect_identifier();
    expect_op("(");
    while (!is_op(")")) {
      fn.params.push_back(expect_identifier());
      if (!is_op(",")) break;
      take();
    }
    expect_op(")");
    expect_op(":");
    fn.body = parse_suite();
    return fn;
  }

  Block parse_suite() {
    if (cur().type != Tok::Newline) {
      Block b;
      b.push_back(parse_simple());
      expect_newline();
      return b;
    }
    take();
    skip_newlines();
    if (cur().type != Tok::Indent) fail("an indented block");
    take();
    Block b;
    while (cur().type != Tok::Dedent && cur().type != Tok::End) {
      b.push_back(parse_statement());
      skip_newlines();
    }
    if (cur().type == Tok::Dedent) take();
    return b;
  }

  StmtPtr parse_statement() {
    if (is_name("for")) return parse_for();
    if (is_name("if")) return parse_if();
    if (is_name("def")) throw SyntaxError("nested function definitions are not supported", cur().loc);
    if (is_name("elif") || is_name("else")) throw SyntaxError("'" + cur().text + "' without 'if'", cur().loc);
    auto s = parse_simple();
    expect_newline();
    return s;
  }

  StmtPtr parse_simple() {
    auto s = std::make_shared<Stmt>();
    s->loc = cur().loc;
    if (is_name("pass")) {
      take();
      s->kind = Stmt::Kind::Pass;
      return s;
    }
    if (is_name("break") || is_name("continue")) {
      s->kind = cur().text == "break" ? Stmt::Kind::Break : Stmt::Kind::Continue;
      take();
      return s;
    }
    if (is_name("return")) {
      take();
      s->kind = Stmt::Kind::Return;
      if (cur().type != Tok::Newline && cur().type != Tok::End) s->value = parse_expr();
      return s;
    }
    auto lhs = parse_expr();
    if (is_op("=")) {
      take();
      check_target(*lhs);
      s->kind = Stmt::Kind::Assign;
      s->target = std::move(lhs);
      s->value = parse_expr();
      return s;
    }
    for (const char* op : {"+=", "-=", "*=", "/=", "//=", "%="}) {
      if (is_op(op)) {
        take();
        check_target(*lhs);
        s->kind = Stmt::Kind::AugAssign;
        s->op = std::string(op, std::char_traits<char>::length(op) - 1);
        s->target = std::move(lhs);
        s->value = parse_expr();
        return s;
      }
    }
    s->kind = Stmt::Kind::Expr;
    s->value = std::move(lhs);
    return s;
  }

  void check_target(const Expr& e) const {
    if (e.kind != Expr::Kind::Name && e.kind != Expr::Kind::Subscript) {
      throw SyntaxError("cannot assign to this expression", e.loc);
    }
  }

  StmtPtr parse_for() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::For;
    s->loc = take().loc;
    s->var = expect_identifier();
    if (!is_name("in")) fail("'in'");
    take();
    s->iter = parse_expr();
    expect_op(":");
    s->body = parse_suite();
    return s;
  }

  StmtPtr parse_if() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::If;
    s->loc = take().loc;
    auto cond = parse_expr();
    expect_op(":");
    s->branches.emplace_back(std::move(cond), parse_suite());
    skip_newlines();
    while (is_name("elif")) {
      take();
      auto c = parse_expr();
      expect_op(":");
      s->branches.emplace_back(std::move(c), parse_suite());
      skip_newlines();
    }
    if (is_name("else")) {
      take();
      expect_op(":");
      s->orelse = parse_suite();
    }
    return s;
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    auto lhs = parse_and();
    if (!is_name("or")) return lhs;
    auto e = node(Expr::Kind::Or, lhs->loc);
    e->items.push_back(std::move(lhs));
    while (is_name("or")) {
      take();
      e->items.push_back(parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    auto lhs = parse_not();
    if (!is_name("and")) return lhs;
    auto e = node(Expr::Kind::And, lhs->loc);
    e->items.push_back(std::move(lhs));
    while (is_name("and")) {
      take();
      e->items.push_back(parse_not());
    }
    return e;
  }

  ExprPtr parse_not() {
    if (is_name("not")) {
      auto e = node(Expr::Kind::Not, take().loc);
      e->items.push_back(parse_not());
      return e;
    }
    return parse_comparison();
  }

  std::optional<std::string> comparison_op() {
    if (cur().type == Tok::Op) {
      for (const char* op : {"==", "!=", "<", "<=", ">", ">="}) {
        if (cur().text == op) {
          take();
          return std::string(op);
        }
      }
      return std::nullopt;
    }
    if (is_name("in")) {
      take();
      return "in";
    }
    if (is_name("not") && next_tok().type == Tok::Name && next_tok().text == "in") {
      take();
      take();
      return "not in";
    }
    return std::nullopt;
  }

  ExprPtr parse_comparison() {
    auto lhs = parse_arith();
    auto op = comparison_op();
    if (!op) return lhs;
    auto e = node(Expr::Kind::Compare, lhs->loc);
    e->items.push_back(std::move(lhs));
    while (op) {
      e->ops.push_back(*op);
      e->items.push_back(parse_arith());
      op = comparison_op();
    }
    return e;
  }

  ExprPtr binary(ExprPtr lhs, std::string op, ExprPtr rhs) {
    auto e = node(Expr::Kind::Binary, lhs->loc);
    e->text = std::move(op);
    e->items.push_back(std::move(lhs));
    e->items.push_back(std::move(rhs));
    return e;
  }

  ExprPtr parse_arith() {
    auto lhs = parse_term();
    while (is_op("+") || is_op("-")) {
      std::string op = take().text;
      lhs = binary(std::move(lhs), std::move(op), parse_term());
    }
    return lhs;
  }

  ExprPtr parse_term() {
    auto lhs = parse_unary();
    while (is_op("*") || is_op("/") || is_op("//") || is_op("%")) {
      std::string op = take().text;
      lhs = binary(std::move(lhs), std::move(op), parse_unary());
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (is_op("-") || is_op("+")) {
      auto e = node(Expr::Kind::Unary, cur().loc);
      e->text = take().text;
      e->items.push_back(parse_unary());
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    auto e = parse_atom();
    while (true) {
      if (is_op("(")) {
        auto call = node(Expr::Kind::Call, cur().loc);
        take();
        call->target = std::move(e);
        while (!is_op(")")) {
          if (cur().type == Tok::Name && next_tok().type == Tok::Op && next_tok().text == "=") {
            std::string key = expect_identifier();
            take();
            call->kwargs.emplace_back(std::move(key), parse_expr());
          } else {
            if (!call->kwargs.empty()) throw SyntaxError("positional argument after keyword argument", cur().loc);
            call->items.push_back(parse_expr());
          }
          if (!is_op(",")) break;
          take();
        }
        expect_op(")");
        e = std::move(call);
      } else if (is_op("[")) {
        auto sub = node(Expr::Kind::Subscript, cur().loc);
        take();
        sub->target = std::move(e);
        sub->index = parse_expr();
        if (is_op(":")) throw SyntaxError("slices are not supported in event scripts", cur().loc);
        expect_op("]");
        e = std::move(sub);
      } else if (is_op(".")) {
        auto attr = node(Expr::Kind::Attribute, cur().loc);
        take();
        attr->target = std::move(e);
        attr->text = expect_identifier();
        e = std::move(attr);
      } else {
        return e;
      }
    }
  }

  std::shared_ptr<Expr> parse_string_literal() {
    auto e = node(Expr::Kind::String, cur().loc);
    while (cur().type == Tok::String) e->text += take().text;
    return e;
  }

  ExprPtr parse_atom() {
    const Token& t = cur();
    switch (t.type) {
      case Tok::Number: {
        auto e = node(Expr::Kind::Number, t.loc);
        e->number = take().number;
        return e;
      }
      case Tok::String: return parse_string_literal();
      case Tok::Name: {
        if (t.text == "True" || t.text == "False") {
          auto e = node(Expr::Kind::Bool, t.loc);
          e->boolean = take().text == "True";
          return e;
        }
        if (t.text == "None") return node(Expr::Kind::None, take().loc);
        auto e = node(Expr::Kind::Name, t.loc);
        e->text = expect_identifier();
        return e;
      }
      case Tok::Op:
        if (t.text == "(") {
          take();
          auto inner = parse_expr();
          if (is_op(",")) throw SyntaxError("tuples are not supported in event scripts", cur().loc);
          expect_op(")");
          return inner;
        }
        if (t.text == "[") {
          auto e = node(Expr::Kind::List, t.loc);
          take();
          while (!is_op("]")) {
            e->items.push_back(parse_expr());
            if (is_name("for")) throw SyntaxError("comprehensions are not supported in event scripts", cur().loc);
            if (!is_op(",")) break;
            take();
          }
          expect_op("]");
          return e;
        }
        break;
      default: break;
    }
    fail("an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  for (int precision = 15; precision <= 17; ++precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) {
      std::string s(buf);
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      return s;
    }
  }
  return std::to_string(v);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      default: out += c; break;
    }
  }
  return out + "\"";
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    case Expr::Kind::Compare: return 4;
    case Expr::Kind::Binary: return (e.text == "+" || e.text == "-") ? 5 : 6;
    case Expr::Kind::Unary: return 7;
    default: return 8;
  }
}

class Printer {
 public:
  std::string expr(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Number: return format_number(e.number);
      case Expr::Kind::String: return quote(e.text);
      case Expr::Kind::Bool: return e.boolean ? "True" : "False";
      case Expr::Kind::None: return "None";
      case Expr::Kind::Name: return e.text;
      case Expr::Kind::List: {
        std::string s = "[";
        for (std::size_t i = 0; i < e.items.size(); ++i) s += (i ? ", " : "") + expr(*e.items[i]);
        return s + "]";
      }
      case Expr::Kind::Call: {
        std::string s = wrap(*e.target, 8) + "(";
        bool first = true;
        for (const auto& a : e.items) {
          s += (first ? "" : ", ") + expr(*a);
          first = false;
        }
        for (const auto& [k, v] : e.kwargs) {
          s += (first ? "" : ", ") + k + "=" + expr(*v);
          first = false;
        }
        return s + ")";
      }
      case Expr::Kind::Attribute: return wrap(*e.target, 8) + "." + e.text;
      case Expr::Kind::Subscript: return wrap(*e.target, 8) + "[" + expr(*e.index) + "]";
      case Expr::Kind::Unary: return e.text + wrap(*e.items[0], 7);
      case Expr::Kind::Not: return "not " + wrap(*e.items[0], 3);
      case Expr::Kind::Binary: {
        const int p = precedence(e);
        // Left operand may share the level; the right must bind tighter to keep left associativity.
        return wrap(*e.items[0], p) + " " + e.text + " " + wrap(*e.items[1], p + 1);
      }
      case Expr::Kind::Compare: {
        std::string s = wrap(*e.items[0], 5);
        for (std::size_t i = 0; i < e.ops.size(); ++i) s += " " + e.ops[i] + " " + wrap(*e.items[i + 1], 5);
        return s;
      }
      case Expr::Kind::And:
      case Expr::Kind::Or: {
        const int p = precedence(e);
        const char* word = e.kind == Expr::Kind::And ? " and " : " or ";
        std::string s;
        for (std::size_t i = 0; i < e.items.size(); ++i) s += (i ? word : "") + wrap(*e.items[i], p + 1);
        return s;
      }
    }
    return {};
  }

  void block(const Block& b, int depth, std::string& out) {
    if (b.empty()) {
      out += std::string(depth * 4, ' ') + "pass\n";
      return;
    }
    for (const auto& s : b) stmt(*s, depth, out);
  }

  void stmt(const Stmt& s, int depth, std::string& out) {
    const std::string pad(depth * 4, ' ');
    switch (s.kind) {
      case Stmt::Kind::Expr: out += pad + expr(*s.value) + "\n"; break;
      case Stmt::Kind::Assign: out += pad + expr(*s.target) + " = " + expr(*s.value) + "\n"; break;
      case Stmt::Kind::AugAssign: out += pad + expr(*s.target) + " " + s.op + "= " + expr(*s.value) + "\n"; break;
      case Stmt::Kind::Return: out += pad + "return" + (s.value ? " " + expr(*s.value) : "") + "\n"; break;
      case Stmt::Kind::Pass: out += pad + "pass\n"; break;
      case Stmt::Kind::Break: out += pad + "break\n"; break;
      case Stmt::Kind::Continue: out += pad + "continue\n"; break;
      case Stmt::Kind::For:
        out += pad + "for " + s.var + " in " + expr(*s.iter) + ":\n";
        block(s.body, depth + 1, out);
        break;
      case Stmt::Kind::If:
        for (std::size_t i = 0; i < s.branches.size(); ++i) {
          out += pad + (i ? "elif " : "if ") + expr(*s.branches[i].first) + ":\n";
          block(s.branches[i].second, depth + 1, out);
        }
        if (!s.orelse.empty()) {
          out += pad + "else:\n";
          block(s.orelse, depth + 1, out);
        }
        break;
    }
  }

 private:
  std::string wrap(const Expr& e, int min_prec) {
    std::string s = expr(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
  }
};

class Dumper {
 public:
  void expr(const Expr& e, std::ostringstream& os) {
    switch (e.kind) {
      case Expr::Kind::Number: os << "(num " << format_number(e.number) << ")"; return;
      case Expr::Kind::String: os << "(str " << quote(e.text) << ")"; return;
      case Expr::Kind::Bool: os << (e.boolean ? "(true)" : "(false)"); return;
      case Expr::Kind::None: os << "(none)"; return;
      case Expr::Kind::Name: os << "(name " << e.text << ")"; return;
      default: break;
    }
    static const char* const kNames[] = {"num", "str", "bool", "none", "name", "list", "call", "attr",
                                         "sub", "unary", "not", "bin", "cmp", "and", "or"};
    os << "(" << kNames[static_cast<int>(e.kind)];
    if (!e.text.empty()) os << " " << e.text;
    for (const auto& op : e.ops) os << " " << op;
    if (e.target) {
      os << " ";
      expr(*e.target, os);
    }
    if (e.index) {
      os << " ";
      expr(*e.index, os);
    }
    for (const auto& item : e.items) {
      os << " ";
      expr(*item, os);
    }
    for (const auto& [k, v] : e.kwargs) {
      os << " (kw " << k << " ";
      expr(*v, os);
      os << ")";
    }
    os << ")";
  }

  void block(const Block& b, std::ostringstream& os) {
    os << "(block";
    for (const auto& s : b) {
      os << " ";
      stmt(*s, os);
    }
    os << ")";
  }

  void stmt(const Stmt& s, std::ostringstream& os) {
    static const char* const kNames[] = {"expr", "assign", "augassign", "for", "if",
                                         "return", "pass", "break", "continue"};
    os << "(" << kNames[static_cast<int>(s.kind)];
    if (!s.op.empty()) os << " " << s.op;
    if (!s.var.empty()) os << " " << s.var;
    for (const ExprPtr* p : {&s.target, &s.value, &s.iter}) {
      if (*p) {
        os << " ";
        expr(**p, os);
      }
    }
    if (s.kind == Stmt::Kind::For) {
      os << " ";
      block(s.body, os);
    }
    for (const auto& [cond, body] : s.branches) {
      os << " (branch ";
      expr(*cond, os);
      os << " ";
      block(body, os);
      os << ")";
    }
    if (!s.orelse.empty()) {
      os << " (else ";
      block(s.orelse, os);
      os << ")";
    }
    os << ")";
  }
};

}  // namespace

Script parse(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.parse_module(source);
}

std::string print(const Script& script) {
  Printer p;
  std::string out;
  if (script.docstring) out += quote(*script.docstring) + "\n";
  out += "def " + script.function.name + "(";
  for (std::size_t i = 0; i < script.function.params.size(); ++i) {
    out += (i ? ", " : "") + script.function.params[i];
  }
  out += "):\n";
  p.block(script.function.body, 1, out);
  return out;
}

std::string dump_ast(const Script& script) {
  std::ostringstream os;
  Dumper d;
  os << "(module";
  if (script.docstring) os << " (doc " << quote(*script.docstring) << ")";
  os << " (def " << script.function.name << " (params";
  for (const auto& p : script.function.params) os << " " << p;
  os << ") ";
  d.block(script.function.body, os);
  os << "))";
  return os.str();
}

std::optional<std::string> extract_code_block(std::string_view reply) {
  const auto open = reply.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  auto body_start = reply.find('\n', open);
  if (body_start == std::string_view::npos) return std::nullopt;
  ++body_start;
  const auto close = reply.find("```", body_start);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(reply.substr(body_start, close - body_start));
}

}  // namespace populace::script
