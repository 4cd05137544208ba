#include <set>

#include "mucp/syntax.hpp"
#include "mucp/typecheck.hpp"

namespace mucp {

namespace {

class Auditor {
 public:
  explicit Auditor(const TypingDerivation& d) : d_(d) {}

  std::vector<std::string> run() {
    for (std::size_t i = 0; i < d_.nodes.size(); ++i) check(i);
    return std::move(problems_);
  }

 private:
  void problem(std::size_t i, const std::string& what) {
    problems_.push_back("node " + std::to_string(i) + " (" + to_string(d_.nodes[i].rule) + "): " + what);
  }

  bool arity(std::size_t i, std::size_t n) {
    const auto& node = d_.nodes[i];
    if (node.premises.size() != n || node.lineage.size() != n) {
      problem(i, "expected " + std::to_string(n) + " premises");
      return false;
    }
    return true;
  }

  const TypingNode& premise(std::size_t i, std::size_t k) { return d_.nodes[d_.nodes[i].premises[k]]; }

  std::optional<Type> principal(std::size_t i) {
    const auto& n = d_.nodes[i];
    auto it = n.context.find(n.channel);
    if (it == n.context.end()) {
      problem(i, "principal channel '" + n.channel + "' is not in the context");
      return std::nullopt;
    }
    return it->second;
  }

  bool is_bin(const Type& t, Connective c) { return t.is_bin() && t.connective() == c; }

  void expect_context(std::size_t i, const Context& actual, const Context& expected, const std::string& which) {
    if (actual != expected) {
      problem(i, which + " context is " + render_context(actual) + ", expected " + render_context(expected));
    }
  }

  void expect_process(std::size_t i, const Process& actual, const Process& expected) {
    if (actual.identity() != expected.identity() && actual != expected) problem(i, "premise process does not match");
  }

  // Premise contexts must split `rest` between them, each adding one entry.
  void expect_partition(std::size_t i, const Context& rest, const Context& left, const std::pair<Channel, Type>& add_l,
                        const Context& right, const std::pair<Channel, Type>& add_r) {
    Context l = left, r = right;
    auto take = [&](Context& c, const std::pair<Channel, Type>& add, const char* side) {
      auto it = c.find(add.first);
      if (it == c.end() || it->second != add.second) {
        problem(i, std::string(side) + " premise lacks " + add.first + " : " + pretty(add.second));
      } else {
        c.erase(it);
      }
    };
    take(l, add_l, "left");
    take(r, add_r, "right");
    Context merged = l;
    for (const auto& [c, t] : r) {
      if (!merged.emplace(c, t).second) problem(i, "channel '" + c + "' is given to both premises");
    }
    expect_context(i, merged, rest, "split");
  }

  void check(std::size_t i) {
    const TypingNode& n = d_.nodes[i];
    const Process& p = n.process;
    switch (n.rule) {
      case TypingRule::Fold: {
        if (!arity(i, 1)) return;
        auto t = principal(i);
        if (!t) return;
        if (!t->is_fix() || t->binder() != n.binder) {
          problem(i, "unfolded channel does not carry a matching fixed point");
          return;
        }
        Context next = n.context;
        next.at(n.channel) = unfold(*t);
        expect_context(i, premise(i, 0).context, next, "premise");
        expect_process(i, premise(i, 0).process, p);
        return;
      }
      case TypingRule::Call: {
        if (!arity(i, 1)) return;
        auto* c = p.as<Call>();
        if (!c || c->name != n.callee) {
          problem(i, "process is not a call of '" + n.callee + "'");
          return;
        }
        auto root = d_.definition_roots.find(n.callee);
        if (root == d_.definition_roots.end() || root->second != n.premises[0]) {
          problem(i, "premise is not the root of '" + n.callee + "'");
          return;
        }
        std::set<Channel> args(c->args.begin(), c->args.end());
        std::set<Channel> dom;
        for (const auto& [ch, t] : n.context) dom.insert(ch);
        if (args != dom) problem(i, "context is not exactly the call arguments");
        const auto& target = premise(i, 0).context;
        for (const auto& e : n.lineage[0]) {
          auto from = n.context.find(e.from);
          auto to = target.find(e.to);
          if (from == n.context.end() || to == target.end() || from->second != to->second) {
            problem(i, "argument " + e.from + " does not match parameter " + e.to);
          }
        }
        if (n.lineage[0].size() != c->args.size()) problem(i, "lineage does not cover every argument");
        return;
      }
      case TypingRule::Top: {
        if (!arity(i, 0)) return;
        auto t = principal(i);
        if (t && !t->is_const(Constant::Top)) problem(i, "channel is not of type top");
        if (!p.as<Fail>()) problem(i, "process is not fail");
        return;
      }
      case TypingRule::One: {
        if (!arity(i, 0)) return;
        auto t = principal(i);
        if (t && !t->is_const(Constant::One)) problem(i, "channel is not of type 1");
        if (n.context.size() != 1) problem(i, "context has more than the closed channel");
        if (!p.as<Close>()) problem(i, "process is not close");
        return;
      }
      case TypingRule::Bot: {
        if (!arity(i, 1)) return;
        auto t = principal(i);
        auto* w = p.as<Wait>();
        if (!t || !w) return problem(i, "process is not wait");
        if (!t->is_const(Constant::Bot)) problem(i, "channel is not of type bot");
        Context next = n.context;
        next.erase(n.channel);
        expect_context(i, premise(i, 0).context, next, "premise");
        expect_process(i, premise(i, 0).process, w->cont);
        return;
      }
      case TypingRule::Par: {
        if (!arity(i, 1)) return;
        auto t = principal(i);
        auto* r = p.as<Receive>();
        if (!t || !r) return problem(i, "process is not a receive");
        if (!is_bin(*t, Connective::Par)) return problem(i, "channel is not of a par type");
        Context next = n.context;
        next.at(n.channel) = t->right();
        next.emplace(r->bound, t->left());
        expect_context(i, premise(i, 0).context, next, "premise");
        expect_process(i, premise(i, 0).process, r->cont);
        return;
      }
      case TypingRule::Tensor: {
        if (!arity(i, 2)) return;
        auto t = principal(i);
        auto* s = p.as<Send>();
        if (!t || !s) return problem(i, "process is not a send");
        if (!is_bin(*t, Connective::Tensor)) return problem(i, "channel is not of a tensor type");
        Context rest = n.context;
        rest.erase(n.channel);
        expect_partition(i, rest, premise(i, 0).context, {s->bound, t->left()}, premise(i, 1).context,
                         {s->channel, t->right()});
        expect_process(i, premise(i, 0).process, s->left);
        expect_process(i, premise(i, 1).process, s->right);
        return;
      }
      case TypingRule::With: {
        if (!arity(i, 2)) return;
        auto t = principal(i);
        auto* c = p.as<Case>();
        if (!t || !c) return problem(i, "process is not a case");
        if (!is_bin(*t, Connective::With)) return problem(i, "channel is not of a with type");
        Context l = n.context, r = n.context;
        l.at(n.channel) = t->left();
        r.at(n.channel) = t->right();
        expect_context(i, premise(i, 0).context, l, "left premise");
        expect_context(i, premise(i, 1).context, r, "right premise");
        expect_process(i, premise(i, 0).process, c->left);
        expect_process(i, premise(i, 1).process, c->right);
        return;
      }
      case TypingRule::Plus: {
        if (!arity(i, 1)) return;
        auto t = principal(i);
        auto* s = p.as<Select>();
        if (!t || !s) return problem(i, "process is not a selection");
        if (!is_bin(*t, Connective::Plus)) return problem(i, "channel is not of a plus type");
        Context next = n.context;
        next.at(n.channel) = s->branch == 0 ? t->left() : t->right();
        expect_context(i, premise(i, 0).context, next, "premise");
        expect_process(i, premise(i, 0).process, s->cont);
        return;
      }
      case TypingRule::Cut: {
        if (!arity(i, 2)) return;
        auto* c = p.as<Cut>();
        if (!c || !n.cut_left || !n.cut_right) return problem(i, "process is not a typed cut");
        if (n.context.count(c->channel)) problem(i, "cut channel already in the context");
        if (!n.subtyping || !n.subtyping->holds) problem(i, "side condition not discharged");
        expect_partition(i, n.context, premise(i, 0).context, {c->channel, *n.cut_left}, premise(i, 1).context,
                         {c->channel, *n.cut_right});
        expect_process(i, premise(i, 0).process, c->left);
        expect_process(i, premise(i, 1).process, c->right);
        return;
      }
    }
  }

  const TypingDerivation& d_;
  std::vector<std::string> problems_;
};

}  // namespace

std::vector<std::string> audit(const TypingDerivation& d) { return Auditor(d).run(); }

}  // namespace mucp
