#include "mucp/typecheck.hpp"

#include <set>

#include "mucp/diagnostic.hpp"
#include "mucp/syntax.hpp"

namespace mucp {

namespace {

constexpr std::size_t kMaxLeftoverSplit = 8;

std::vector<LineageEdge> identity_lineage(const Context& from, const Context& to) {
  std::vector<LineageEdge> out;
  for (const auto& [c, t] : from) {
    if (to.count(c)) out.push_back({c, c});
  }
  return out;
}

std::string shorten(std::string s, std::size_t limit = 100) {
  if (s.size() > limit) s = s.substr(0, limit - 3) + "...";
  return s;
}

class Builder {
 public:
  Builder(const SourceProgram& program, CheckOptions options) : program_(program), options_(options) {}

  TypingDerivation take() { return std::move(d_); }

  std::size_t definition_root(const std::string& name) {
    if (auto it = d_.definition_roots.find(name); it != d_.definition_roots.end()) return it->second;
    const Definition* def = program_.find(name);
    if (!def) throw TypeError(codes::kUnknownName, "process '" + name + "' is not defined");
    Context ctx;
    for (const auto& p : def->params) {
      if (!ctx.emplace(p.channel, p.type).second) {
        throw TypeError(codes::kLinearity, "parameter '" + p.channel + "' of '" + name + "' is declared twice",
                        def->span);
      }
    }
    for (const auto& c : free_channels(def->body)) {
      if (!ctx.count(c)) {
        throw TypeError(codes::kUnknownName, "channel '" + c + "' is not a parameter of '" + name + "'", def->span);
      }
    }
    d_.definition_roots[name] = d_.nodes.size();
    auto saved = span_;
    span_ = def->span;
    std::size_t root = node(def->body, ctx);
    span_ = saved;
    return root;
  }

  std::size_t main_root(const MainDecl& m) {
    Context ctx;
    for (const auto& p : m.params) {
      if (!ctx.emplace(p.channel, p.type).second) {
        throw TypeError(codes::kLinearity, "channel '" + p.channel + "' of main is declared twice", m.span);
      }
    }
    for (const auto& c : free_channels(m.body)) {
      if (!ctx.count(c)) {
        throw TypeError(codes::kUnknownName, "free channel '" + c + "' of main is not declared", m.span);
      }
    }
    span_ = m.span;
    std::size_t root = node(m.body, ctx);
    d_.main_root = root;
    return root;
  }

  std::size_t node(const Process& p, const Context& g) {
    const std::size_t id = d_.nodes.size();
    d_.nodes.push_back(TypingNode{p, g, TypingRule::Top, {}, Binder::Mu, 0, {}, {}, {}, {}, {}, {}});

    if (auto target = fold_target(p, g)) {
      const Type t = g.at(*target);
      Context next = g;
      next.at(*target) = unfold(t);
      set_rule(id, TypingRule::Fold, *target);
      d_.nodes[id].binder = t.binder();
      premise(id, p, next, identity_lineage(g, next));
      return id;
    }

    if (auto* c = p.as<Call>()) return call(id, *c, g);
    if (auto* f = p.as<Fail>()) {
      expect_type(p, g, f->channel, "top", [](const Type& t) { return t.is_const(Constant::Top); });
      set_rule(id, TypingRule::Top, f->channel);
      return id;
    }
    if (auto* c = p.as<Close>()) {
      expect_type(p, g, c->channel, "1", [](const Type& t) { return t.is_const(Constant::One); });
      if (g.size() != 1) {
        fail(codes::kLinearity, "close " + c->channel + " leaves channels unused: " + others(g, c->channel), p, g);
      }
      set_rule(id, TypingRule::One, c->channel);
      return id;
    }
    if (auto* w = p.as<Wait>()) {
      expect_type(p, g, w->channel, "bot", [](const Type& t) { return t.is_const(Constant::Bot); });
      Context next = g;
      next.erase(w->channel);
      set_rule(id, TypingRule::Bot, w->channel);
      premise(id, w->cont, next, identity_lineage(g, next));
      return id;
    }
    if (auto* r = p.as<Receive>()) {
      const Type t = expect_type(p, g, r->channel, "a par type", [](const Type& t) {
        return t.is_bin() && t.connective() == Connective::Par;
      });
      fresh_binding(p, g, r->bound);
      Context next = g;
      next.at(r->channel) = t.right();
      next.emplace(r->bound, t.left());
      set_rule(id, TypingRule::Par, r->channel);
      auto lineage = identity_lineage(g, next);
      lineage.push_back({r->channel, r->bound});
      premise(id, r->cont, next, lineage);
      return id;
    }
    if (auto* s = p.as<Send>()) {
      const Type t = expect_type(p, g, s->channel, "a tensor type", [](const Type& t) {
        return t.is_bin() && t.connective() == Connective::Tensor;
      });
      fresh_binding(p, g, s->bound);
      set_rule(id, TypingRule::Tensor, s->channel);
      Context rest = g;
      rest.erase(s->channel);
      split(id, p, rest, s->left, {s->bound, t.left()}, s->right, {s->channel, t.right()},
            [&](const Context& left, const Context& right) {
              auto ll = identity_lineage(g, left);
              ll.push_back({s->channel, s->bound});
              return std::pair{ll, identity_lineage(g, right)};
            });
      return id;
    }
    if (auto* c = p.as<Case>()) {
      const Type t = expect_type(p, g, c->channel, "a with type", [](const Type& t) {
        return t.is_bin() && t.connective() == Connective::With;
      });
      set_rule(id, TypingRule::With, c->channel);
      Context left = g, right = g;
      left.at(c->channel) = t.left();
      right.at(c->channel) = t.right();
      premise(id, c->left, left, identity_lineage(g, left));
      premise(id, c->right, right, identity_lineage(g, right));
      return id;
    }
    if (auto* s = p.as<Select>()) {
      const Type t = expect_type(p, g, s->channel, "a plus type", [](const Type& t) {
        return t.is_bin() && t.connective() == Connective::Plus;
      });
      set_rule(id, TypingRule::Plus, s->channel);
      d_.nodes[id].branch = s->branch;
      Context next = g;
      next.at(s->channel) = s->branch == 0 ? t.left() : t.right();
      premise(id, s->cont, next, identity_lineage(g, next));
      return id;
    }
    if (auto* c = p.as<Cut>()) return cut(id, *c, g);
    throw InternalError("unknown process form");
  }

 private:
  void set_rule(std::size_t id, TypingRule r, const Channel& c) {
    d_.nodes[id].rule = r;
    d_.nodes[id].channel = c;
  }

  void premise(std::size_t id, const Process& p, const Context& g, std::vector<LineageEdge> lineage) {
    std::size_t child = node(p, g);
    d_.nodes[id].premises.push_back(child);
    d_.nodes[id].lineage.push_back(std::move(lineage));
  }

  // The channel that must be unfolded before the rule for p can apply.
  std::optional<Channel> fold_target(const Process& p, const Context& g) {
    if (auto* c = p.as<Call>()) {
      const Definition* def = program_.find(c->name);
      if (!def || def->params.size() != c->args.size()) return std::nullopt;
      for (std::size_t i = 0; i < c->args.size(); ++i) {
        auto it = g.find(c->args[i]);
        if (it != g.end() && it->second != def->params[i].type && it->second.is_fix()) return c->args[i];
      }
      return std::nullopt;
    }
    auto s = subject(p);
    if (!s) return std::nullopt;
    auto it = g.find(*s);
    if (it != g.end() && it->second.is_fix()) return *s;
    return std::nullopt;
  }

  template <class Pred>
  Type expect_type(const Process& p, const Context& g, const Channel& x, const std::string& what, Pred ok) {
    auto it = g.find(x);
    if (it == g.end()) fail(codes::kLinearity, "channel '" + x + "' is not available here", p, g);
    if (!ok(it->second)) {
      fail(codes::kTypeMismatch, "channel '" + x + "' has type " + pretty(it->second) + " but the process needs " + what,
           p, g);
    }
    return it->second;
  }

  void fresh_binding(const Process& p, const Context& g, const Channel& y) {
    if (g.count(y)) fail(codes::kLinearity, "bound channel '" + y + "' shadows a channel in use", p, g);
  }

  std::string others(const Context& g, const Channel& keep) {
    std::string out;
    for (const auto& [c, t] : g) {
      if (c == keep) continue;
      if (!out.empty()) out += ", ";
      out += c;
    }
    return out;
  }

  std::size_t call(std::size_t id, const Call& c, const Context& g) {
    const Process p = d_.nodes[id].process;
    const Definition* def = program_.find(c.name);
    if (!def) fail(codes::kUnknownName, "process '" + c.name + "' is not defined", p, g);
    if (def->params.size() != c.args.size()) {
      fail(codes::kArity,
           "'" + c.name + "' takes " + std::to_string(def->params.size()) + " channels, given " +
               std::to_string(c.args.size()),
           p, g);
    }
    std::set<Channel> args(c.args.begin(), c.args.end());
    if (args.size() != c.args.size()) fail(codes::kLinearity, "a channel is passed twice to '" + c.name + "'", p, g);
    for (const auto& [ch, t] : g) {
      if (!args.count(ch)) fail(codes::kLinearity, "channel '" + ch + "' is unused at the call of '" + c.name + "'", p, g);
    }
    std::vector<LineageEdge> lineage;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      auto it = g.find(c.args[i]);
      if (it == g.end()) fail(codes::kLinearity, "channel '" + c.args[i] + "' is not available here", p, g);
      if (it->second != def->params[i].type) {
        fail(codes::kTypeMismatch,
             "argument '" + c.args[i] + "' of '" + c.name + "' has type " + pretty(it->second) + " but the definition expects " +
                 pretty(def->params[i].type),
             p, g);
      }
      lineage.push_back({c.args[i], def->params[i].channel});
    }
    d_.nodes[id].rule = TypingRule::Call;
    d_.nodes[id].callee = c.name;
    std::size_t root = definition_root(c.name);
    d_.nodes[id].premises.push_back(root);
    d_.nodes[id].lineage.push_back(std::move(lineage));
    return id;
  }

  std::size_t cut(std::size_t id, const Cut& c, const Context& g) {
    const Process p = d_.nodes[id].process;
    if (!c.left_type || !c.right_type) {
      fail(codes::kTypeMismatch, "cut on '" + c.channel + "' has no endpoint types", p, g);
    }
    fresh_binding(p, g, c.channel);
    set_rule(id, TypingRule::Cut, c.channel);
    const Type a = *c.left_type, b = *c.right_type;
    const Type target = dual(b);
    SubtypeDecision decision = subtype(a, target, {options_.exhaustive_subtyping});
    if (!decision.holds) {
      throw TypeError(codes::kSubtypeFailed,
                      "subtype side condition " + pretty(a) + " <= " + pretty(target) + " fails at the cut on '" +
                          c.channel + "'",
                      span_, decision.evidence());
    }
    d_.nodes[id].cut_left = a;
    d_.nodes[id].cut_right = b;
    d_.nodes[id].subtyping = std::move(decision);
    split(id, p, g, c.left, {c.channel, a}, c.right, {c.channel, b},
          [&](const Context& left, const Context& right) {
            return std::pair{identity_lineage(g, left), identity_lineage(g, right)};
          });
    return id;
  }

  // Distributes `rest` between two premises that additionally receive
  // `add_left` and `add_right`. Channels free in neither premise go to a side
  // that can still be typed with them; every such distribution is tried.
  template <class Lineage>
  void split(std::size_t id, const Process& p, const Context& rest, const Process& left, std::pair<Channel, Type> add_left,
             const Process& right, std::pair<Channel, Type> add_right, Lineage lineage) {
    auto fl = free_channels(left);
    auto fr = free_channels(right);
    fl.erase(add_left.first);
    fr.erase(add_right.first);
    Context base_l, base_r;
    std::vector<Channel> leftover;
    for (const auto& [ch, t] : rest) {
      const bool in_l = fl.count(ch), in_r = fr.count(ch);
      if (in_l && in_r) fail(codes::kLinearity, "channel '" + ch + "' is used on both sides", p, rest);
      if (in_l) {
        base_l.emplace(ch, t);
      } else if (in_r) {
        base_r.emplace(ch, t);
      } else {
        leftover.push_back(ch);
      }
    }
    for (const auto& ch : fl) {
      if (!rest.count(ch)) fail(codes::kLinearity, "channel '" + ch + "' is not available here", p, rest);
    }
    for (const auto& ch : fr) {
      if (!rest.count(ch)) fail(codes::kLinearity, "channel '" + ch + "' is not available here", p, rest);
    }
    if (leftover.size() > kMaxLeftoverSplit) {
      fail(codes::kLinearity, "too many unused channels to distribute", p, rest);
    }
    const std::size_t combos = std::size_t{1} << leftover.size();
    std::optional<TypeError> first_error;
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Context cl = base_l, cr = base_r;
      for (std::size_t i = 0; i < leftover.size(); ++i) {
        auto& side = (mask >> i) & 1 ? cr : cl;
        side.emplace(leftover[i], rest.at(leftover[i]));
      }
      cl.insert(add_left);
      cr.insert(add_right);
      const std::size_t mark = d_.nodes.size();
      const auto roots = d_.definition_roots;
      try {
        auto [ll, lr] = lineage(cl, cr);
        std::size_t a = node(left, cl);
        std::size_t b = node(right, cr);
        d_.nodes[id].premises = {a, b};
        d_.nodes[id].lineage = {std::move(ll), std::move(lr)};
        return;
      } catch (const TypeError& e) {
        if (leftover.empty()) throw;
        if (!first_error) first_error = e;
        d_.nodes.erase(d_.nodes.begin() + static_cast<std::ptrdiff_t>(mark), d_.nodes.end());
        d_.definition_roots = roots;
      }
    }
    throw *first_error;
  }

  [[noreturn]] void fail(const char* code, const std::string& message, const Process& p, const Context& g) {
    throw TypeError(code, message, span_, {"|- " + shorten(pretty(p)) + " : " + render_context(g)});
  }

  const SourceProgram& program_;
  CheckOptions options_;
  TypingDerivation d_;
  std::optional<SourceSpan> span_;
};

}  // namespace

std::string to_string(TypingRule r) {
  switch (r) {
    case TypingRule::Call: return "call";
    case TypingRule::Cut: return "sub";
    case TypingRule::Top: return "top";
    case TypingRule::Bot: return "bot";
    case TypingRule::One: return "one";
    case TypingRule::Par: return "par";
    case TypingRule::Tensor: return "tensor";
    case TypingRule::With: return "with";
    case TypingRule::Plus: return "plus";
    case TypingRule::Fold: return "fold";
  }
  return "?";
}

std::string render_context(const Context& ctx) {
  std::string out;
  for (const auto& [c, t] : ctx) {
    if (!out.empty()) out += ", ";
    out += c + " : " + pretty(t);
  }
  return out.empty() ? "." : out;
}

std::string render_judgment(const TypingNode& n) {
  std::string rule = to_string(n.rule);
  if (n.rule == TypingRule::Fold) rule += "(" + to_string(n.binder) + ", " + n.channel + ")";
  return "|- " + shorten(pretty(n.process)) + " : " + render_context(n.context) + "   [" + rule + "]";
}

Adjacency TypingDerivation::successors() const {
  Adjacency succ(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) succ[i] = nodes[i].premises;
  return succ;
}

const SubtypeDecision* TypingDerivation::cut_evidence(const Process& cut) const {
  for (const auto& n : nodes) {
    if (n.rule == TypingRule::Cut && n.process.identity() == cut.identity() && n.subtyping) return &*n.subtyping;
  }
  return nullptr;
}

TypingDerivation build_derivation(const SourceProgram& program, const Process& p, const Context& ctx,
                                  CheckOptions options) {
  Builder b(program, options);
  b.node(p, ctx);
  return b.take();
}

TypingDerivation check_program(const SourceProgram& program, CheckOptions options) {
  Builder b(program, options);
  for (const auto& def : program.definitions) b.definition_root(def.name);
  if (program.main) b.main_root(*program.main);
  TypingDerivation d = b.take();
  if (auto v = check_derivation_validity(d)) {
    std::vector<std::string> evidence;
    std::optional<SourceSpan> span;
    for (std::size_t n : v->loop) evidence.push_back(render_judgment(d.nodes[n]));
    for (const auto& def : program.definitions) {
      auto it = d.definition_roots.find(def.name);
      if (it != d.definition_roots.end() && !v->loop.empty() && it->second == v->loop.front()) span = def.span;
    }
    throw TypeError(codes::kInvalidDerivation,
                    "an infinite branch has no nu-thread that is unfolded infinitely often (non-productive recursion)",
                    span, evidence);
  }
  return d;
}

}  // namespace mucp
