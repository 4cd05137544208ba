#include <cctype>
#include <map>
#include <set>

#include "mucp/syntax.hpp"

namespace mucp {

namespace {

enum class Tok { Ident, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t start;
  std::size_t end;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"type", "def",  "main",  "mu",   "nu",   "dual", "bot", "top",
                                          "par",  "fail", "close", "wait", "case", "new",  "inl", "inr"};
  return k;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      std::string text(src.substr(i, j - i));
      if (text != "0" && text != "1") {
        throw ParseError(codes::kSyntax, "unexpected literal '" + text + "' (only 0 and 1 are types)",
                         SourceSpan{file, i, j});
      }
      out.push_back({Tok::Symbol, text, i, j});
      i = j;
      continue;
    }
    static const std::string symbols = "(){},:;.!?|=*+&";
    if (symbols.find(c) != std::string::npos) {
      out.push_back({Tok::Symbol, std::string(1, c), i, i + 1});
      ++i;
      continue;
    }
    throw ParseError(codes::kSyntax, std::string("unexpected character '") + c + "'", SourceSpan{file, i, i + 1});
  }
  out.push_back({Tok::End, "", src.size(), src.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::string file) : src_(src), file_(std::move(file)), toks_(lex(src, file_)) {}

  SourceProgram program();
  Type standalone_type();
  Process standalone_process();

 private:
  struct AliasDecl {
    std::size_t first_token;
    std::size_t name_token;
    std::optional<Type> resolved;
    bool resolving = false;
  };

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at(const std::string& text) const { return peek().kind != Tok::End && peek().text == text; }
  bool at_end() const { return peek().kind == Tok::End; }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  SourceSpan span(const Token& t) const { return {file_, t.start, t.end}; }
  SourceSpan span_from(std::size_t start) const {
    std::size_t end = pos_ > 0 ? toks_[pos_ - 1].end : 0;
    return {file_, start, std::max(start, end)};
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(codes::kSyntax, "expected " + what + ", found " + found, span(t));
  }

  void expect(const std::string& text) {
    if (!at(text)) fail_here("'" + text + "'");
    advance();
  }

  std::string name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail_here(what);
    if (keywords().count(t.text)) {
      throw ParseError(codes::kSyntax, "'" + t.text + "' is a keyword and cannot be used as " + what, span(t));
    }
    advance();
    return t.text;
  }

  // Types
  Type type(std::vector<std::string>& env);
  Type additive(std::vector<std::string>& env);
  Type multiplicative(std::vector<std::string>& env);
  Type atom(std::vector<std::string>& env);
  Type closed_type();
  Type resolve_alias(const std::string& alias, const Token& use);

  // Processes
  Process process();
  std::vector<Param> params();

  void scan_aliases();

  std::string_view src_;
  std::string file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, AliasDecl> aliases_;
  std::vector<std::pair<std::string, SourceSpan>> calls_;
};

Type Parser::type(std::vector<std::string>& env) {
  if (at("mu") || at("nu")) {
    Binder b = at("mu") ? Binder::Mu : Binder::Nu;
    advance();
    std::string var = name("a type variable");
    expect(".");
    env.push_back(var);
    Type body = type(env);
    env.pop_back();
    return Type::fix(b, var, body);
  }
  return additive(env);
}

Type Parser::additive(std::vector<std::string>& env) {
  Type left = multiplicative(env);
  if (at("+") || at("&")) {
    Connective op = at("+") ? Connective::Plus : Connective::With;
    advance();
    Type right = (at("mu") || at("nu")) ? type(env) : additive(env);
    return Type::bin(op, left, right);
  }
  return left;
}

Type Parser::multiplicative(std::vector<std::string>& env) {
  Type left = atom(env);
  if (at("*") || at("par")) {
    Connective op = at("*") ? Connective::Tensor : Connective::Par;
    advance();
    Type right = (at("mu") || at("nu")) ? type(env) : multiplicative(env);
    return Type::bin(op, left, right);
  }
  return left;
}

Type Parser::atom(std::vector<std::string>& env) {
  const Token& t = peek();
  if (t.kind == Tok::End) fail_here("a type");
  if (t.text == "0") return advance(), Type::zero();
  if (t.text == "1") return advance(), Type::one();
  if (t.text == "bot") return advance(), Type::bot();
  if (t.text == "top") return advance(), Type::top();
  if (t.text == "mu" || t.text == "nu") return type(env);
  if (t.text == "(") {
    advance();
    Type inner = type(env);
    expect(")");
    return inner;
  }
  if (t.text == "dual") {
    std::size_t start = t.start;
    advance();
    expect("(");
    Type inner = type(env);
    expect(")");
    if (!inner.closed()) {
      throw ParseError(codes::kOpenType, "operand of dual(...) must be a closed type", span_from(start));
    }
    return dual(inner);
  }
  if (t.kind == Tok::Ident && !keywords().count(t.text)) {
    Token use = advance();
    for (std::size_t k = env.size(); k-- > 0;) {
      if (env[k] == use.text) return Type::var(static_cast<int>(env.size() - 1 - k));
    }
    return resolve_alias(use.text, use);
  }
  fail_here("a type");
}

Type Parser::resolve_alias(const std::string& alias, const Token& use) {
  auto it = aliases_.find(alias);
  if (it == aliases_.end()) {
    throw ParseError(codes::kOpenType, "free type variable or unknown type alias '" + alias + "'", span(use));
  }
  AliasDecl& decl = it->second;
  if (decl.resolved) return *decl.resolved;
  if (decl.resolving) {
    throw ParseError(codes::kAliasCycle, "type alias '" + alias + "' is defined in terms of itself", span(use));
  }
  decl.resolving = true;
  std::size_t saved = pos_;
  pos_ = decl.first_token;
  Type t = closed_type();
  pos_ = saved;
  decl.resolving = false;
  decl.resolved = t;
  return t;
}

Type Parser::closed_type() {
  std::size_t start = peek().start;
  std::vector<std::string> env;
  Type t = type(env);
  if (auto problem = validate_type(t)) {
    const char* code = problem->kind == TypeProblem::Kind::Open ? codes::kOpenType : codes::kUnguardedType;
    throw ParseError(code, problem->message, span_from(start));
  }
  return t;
}

std::vector<Param> Parser::params() {
  std::vector<Param> out;
  expect("(");
  std::set<std::string> seen;
  while (!at(")")) {
    if (!out.empty()) expect(",");
    const Token& at_name = peek();
    std::string ch = name("a channel name");
    if (!seen.insert(ch).second) {
      throw ParseError(codes::kDuplicateDefinition, "parameter '" + ch + "' declared twice", span(at_name));
    }
    expect(":");
    out.push_back({ch, closed_type()});
  }
  expect(")");
  return out;
}

Process Parser::process() {
  const Token& t = peek();
  if (t.kind == Tok::End) fail_here("a process");
  if (t.text == "(") {
    advance();
    Process p = process();
    expect(")");
    return p;
  }
  if (t.text == "fail") {
    advance();
    return Fail{name("a channel name")};
  }
  if (t.text == "close") {
    advance();
    return Close{name("a channel name")};
  }
  if (t.text == "wait") {
    advance();
    Channel x = name("a channel name");
    expect(";");
    return Wait{x, process()};
  }
  if (t.text == "case") {
    advance();
    Channel x = name("a channel name");
    expect("{");
    Process left = process();
    expect("|");
    Process right = process();
    expect("}");
    return Case{x, left, right};
  }
  if (t.text == "new") {
    advance();
    Channel x = name("a channel name");
    std::optional<Type> a, b;
    if (at(":")) {
      advance();
      a = closed_type();
      expect("|");
      b = closed_type();
    }
    expect("{");
    Process left = process();
    expect("|");
    Process right = process();
    expect("}");
    return Cut{x, a, b, left, right};
  }
  if (t.kind != Tok::Ident) fail_here("a process");
  Token head = t;
  std::string id = name("a channel or process name");
  if (at("(")) {
    advance();
    Call call{id, {}};
    while (!at(")")) {
      if (!call.args.empty()) expect(",");
      call.args.push_back(name("a channel name"));
    }
    expect(")");
    calls_.push_back({id, SourceSpan{file_, head.start, toks_[pos_ - 1].end}});
    return call;
  }
  if (at("!")) {
    advance();
    expect("(");
    Channel y = name("a channel name");
    expect(")");
    expect("{");
    Process left = process();
    expect("}");
    expect("{");
    Process right = process();
    expect("}");
    return Send{id, y, left, right};
  }
  if (at("?")) {
    advance();
    expect("(");
    Channel y = name("a channel name");
    expect(")");
    expect(";");
    return Receive{id, y, process()};
  }
  if (at(".")) {
    advance();
    int branch;
    if (at("inl")) {
      branch = 0;
    } else if (at("inr")) {
      branch = 1;
    } else {
      fail_here("'inl' or 'inr'");
    }
    advance();
    expect(";");
    return Select{id, branch, process()};
  }
  fail_here("'(', '!', '?' or '.' after '" + id + "'");
}

// Renames bound channels so that no binder reuses a name already in scope or
// bound earlier in the same body.
class Distinct {
 public:
  explicit Distinct(const Process& body, const std::vector<Param>& ps) : taken_(all_channels(body)) {
    for (const auto& p : ps) {
      taken_.insert(p.channel);
      seen_.insert(p.channel);
    }
  }

  Process run(const Process& p) {
    if (auto* w = p.as<Wait>()) return Wait{w->channel, run(w->cont)};
    if (auto* s = p.as<Select>()) return Select{s->channel, s->branch, run(s->cont)};
    if (auto* c = p.as<Case>()) return Case{c->channel, run(c->left), run(c->right)};
    if (auto* s = p.as<Send>()) {
      auto [b, left] = bind(s->bound, s->left);
      return Send{s->channel, b, run(left), run(s->right)};
    }
    if (auto* r = p.as<Receive>()) {
      auto [b, cont] = bind(r->bound, r->cont);
      return Receive{r->channel, b, run(cont)};
    }
    if (auto* c = p.as<Cut>()) {
      Channel b = claim(c->channel);
      Process left = c->left, right = c->right;
      if (b != c->channel) {
        left = rename_channels(left, {{c->channel, b}});
        right = rename_channels(right, {{c->channel, b}});
      }
      return Cut{b, c->left_type, c->right_type, run(left), run(right)};
    }
    return p;
  }

 private:
  Channel claim(const Channel& want) {
    Channel b = want;
    for (int k = 1; seen_.count(b) || (b != want && taken_.count(b)); ++k) b = want + "_" + std::to_string(k);
    seen_.insert(b);
    taken_.insert(b);
    return b;
  }

  std::pair<Channel, Process> bind(const Channel& want, const Process& scope) {
    Channel b = claim(want);
    if (b == want) return {b, scope};
    return {b, rename_channels(scope, {{want, b}})};
  }

  std::set<Channel> taken_;
  std::set<Channel> seen_;
};

void Parser::scan_aliases() {
  // Aliases may be used before their declaration, so record where each one
  // starts; a type never contains the declaration keywords.
  for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
    const Token& t = toks_[i];
    if (t.kind == Tok::Ident && t.text == "type") {
      if (toks_[i + 1].kind != Tok::Ident || keywords().count(toks_[i + 1].text)) continue;
      if (i + 2 >= toks_.size() || toks_[i + 2].text != "=") continue;
      auto [it, inserted] = aliases_.emplace(toks_[i + 1].text, AliasDecl{i + 3, i + 1, std::nullopt, false});
      if (!inserted) {
        throw ParseError(codes::kDuplicateDefinition, "type alias '" + toks_[i + 1].text + "' defined twice",
                         span(toks_[i + 1]));
      }
    }
  }
}

SourceProgram Parser::program() {
  scan_aliases();
  SourceProgram prog;
  std::set<std::string> defined;
  while (!at_end()) {
    std::size_t start = peek().start;
    if (at("type")) {
      advance();
      std::string alias = name("a type alias name");
      expect("=");
      // Parse in place to advance past the body, then reuse the resolution.
      Type t = closed_type();
      auto& decl = aliases_.at(alias);
      if (!decl.resolved) decl.resolved = t;
      prog.type_aliases.emplace_back(alias, *decl.resolved);
      continue;
    }
    if (at("def")) {
      advance();
      const Token& name_tok = peek();
      std::string def_name = name("a process name");
      if (!defined.insert(def_name).second) {
        throw ParseError(codes::kDuplicateDefinition, "process '" + def_name + "' is defined more than once",
                         span(name_tok));
      }
      std::vector<Param> ps = params();
      expect("=");
      Process body = process();
      body = Distinct(body, ps).run(body);
      prog.definitions.push_back({def_name, std::move(ps), body, span_from(start)});
      continue;
    }
    if (at("main")) {
      advance();
      if (prog.main) {
        throw ParseError(codes::kDuplicateDefinition, "main is defined more than once", span_from(start));
      }
      std::vector<Param> ps;
      if (at("(")) ps = params();
      expect("=");
      Process body = process();
      body = Distinct(body, ps).run(body);
      prog.main = MainDecl{std::move(ps), body, span_from(start)};
      continue;
    }
    fail_here("'type', 'def' or 'main'");
  }
  for (const auto& [callee, where] : calls_) {
    if (!defined.count(callee)) {
      throw ParseError(codes::kUnknownName, "process '" + callee + "' is not defined", where);
    }
  }
  return prog;
}

Type Parser::standalone_type() {
  Type t = closed_type();
  if (!at_end()) fail_here("end of type");
  return t;
}

Process Parser::standalone_process() {
  Process p = process();
  if (!at_end()) fail_here("end of process");
  return p;
}

}  // namespace

SourceProgram parse_program(std::string_view source, const std::string& file) {
  return Parser(source, file).program();
}

Type parse_type(std::string_view source) { return Parser(source, "<type>").standalone_type(); }

Process parse_process(std::string_view source) { return Parser(source, "<process>").standalone_process(); }

}  // namespace mucp
