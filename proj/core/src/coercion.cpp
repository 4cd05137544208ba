#include "mucp/coercion.hpp"

#include <stdexcept>

#include "mucp/diagnostic.hpp"

namespace mucp {

std::string NameSupply::definition() {
  std::string name;
  do {
    name = prefix_ + std::to_string(next_definition_++);
  } while (reserved_.count(name));
  reserved_.insert(name);
  return name;
}

Channel NameSupply::channel(const std::string& base) { return base + std::to_string(next_channel_++); }

namespace {

Process coerce_node(const SubtypeDerivation& pi, std::size_t i, const std::vector<std::string>& names,
                    NameSupply& supply) {
  const SubtypeNode& n = pi.nodes[i];
  const Channel x = "x", y = "y";
  auto invoke = [&](std::size_t child, const Channel& a, const Channel& b) -> Process {
    return Call{names[child], {a, b}};
  };
  switch (n.rule) {
    case SubtypeRule::Bot:
      return Fail{x};
    case SubtypeRule::Top:
      return Fail{y};
    case SubtypeRule::Refl:
      switch (n.judgment.lhs.constant()) {
        case Constant::One: return Wait{x, Close{y}};
        case Constant::Bot: return Wait{y, Close{x}};
        case Constant::Top: return Fail{y};
        case Constant::Zero: return Fail{x};
      }
      break;
    case SubtypeRule::UnfoldLeft:
    case SubtypeRule::UnfoldRight:
      return invoke(n.children.at(0), x, y);
    case SubtypeRule::Cong: {
      const std::size_t c1 = n.children.at(0), c2 = n.children.at(1);
      switch (n.judgment.lhs.connective()) {
        case Connective::Plus:
          return Case{x, Select{y, 0, invoke(c1, x, y)}, Select{y, 1, invoke(c2, x, y)}};
        case Connective::With:
          return Case{y, Select{x, 0, invoke(c1, x, y)}, Select{x, 1, invoke(c2, x, y)}};
        case Connective::Tensor: {
          const Channel u = supply.channel("u"), v = supply.channel("v");
          return Receive{x, u, Send{y, v, invoke(c1, u, v), invoke(c2, x, y)}};
        }
        case Connective::Par: {
          const Channel u = supply.channel("u"), v = supply.channel("v");
          return Receive{y, u, Send{x, v, invoke(c1, v, u), invoke(c2, x, y)}};
        }
      }
      break;
    }
  }
  throw InternalError("coercion: unexpected derivation node " + to_string(n.judgment));
}

struct Eraser {
  const TypingDerivation& d;
  NameSupply names;
  std::vector<Definition> extra;

  Process run(const Process& p) {
    if (auto* w = p.as<Wait>()) return Wait{w->channel, run(w->cont)};
    if (auto* s = p.as<Send>()) return Send{s->channel, s->bound, run(s->left), run(s->right)};
    if (auto* r = p.as<Receive>()) return Receive{r->channel, r->bound, run(r->cont)};
    if (auto* s = p.as<Select>()) return Select{s->channel, s->branch, run(s->cont)};
    if (auto* c = p.as<Case>()) return Case{c->channel, run(c->left), run(c->right)};
    if (auto* c = p.as<Cut>()) return cut(p, *c);
    return p;
  }

  Process cut(const Process& original, const Cut& c) {
    Process left = run(c.left), right = run(c.right);
    if (!c.left_type || !c.right_type || *c.left_type == dual(*c.right_type)) {
      return Cut{c.channel, c.left_type, c.right_type, left, right};
    }
    const SubtypeDecision* evidence = d.cut_evidence(original);
    if (!evidence || !evidence->holds || !evidence->derivation) {
      throw InternalError("erase: no subtyping evidence for the cut on '" + c.channel + "'");
    }
    const Type a = *c.left_type, b = *c.right_type;
    std::set<Channel> used = all_channels(c.left);
    for (const auto& ch : all_channels(c.right)) used.insert(ch);
    Channel y = c.channel + "'";
    while (used.count(y)) y += "'";

    CoercionProgram coercion = coerce(*evidence, y, c.channel, names);
    for (auto& def : coercion.definitions) extra.push_back(std::move(def));
    Process inner = Cut{y, a, dual(a), rename_channels(left, {{c.channel, y}}), coercion.entry};
    return Cut{c.channel, dual(b), b, inner, right};
  }
};

bool dual_cuts(const Process& p) {
  if (auto* w = p.as<Wait>()) return dual_cuts(w->cont);
  if (auto* s = p.as<Send>()) return dual_cuts(s->left) && dual_cuts(s->right);
  if (auto* r = p.as<Receive>()) return dual_cuts(r->cont);
  if (auto* s = p.as<Select>()) return dual_cuts(s->cont);
  if (auto* c = p.as<Case>()) return dual_cuts(c->left) && dual_cuts(c->right);
  if (auto* c = p.as<Cut>()) {
    if (!c->left_type || !c->right_type || *c->left_type != dual(*c->right_type)) return false;
    return dual_cuts(c->left) && dual_cuts(c->right);
  }
  return true;
}

}  // namespace

CoercionProgram coerce(const SubtypeDerivation& pi, const Channel& x, const Channel& y, NameSupply& names) {
  std::vector<std::string> def_names;
  def_names.reserve(pi.nodes.size());
  for (std::size_t i = 0; i < pi.nodes.size(); ++i) def_names.push_back(names.definition());
  CoercionProgram out{{}, Call{def_names.at(0), {x, y}}};
  for (std::size_t i = 0; i < pi.nodes.size(); ++i) {
    const auto& j = pi.nodes[i].judgment;
    out.definitions.push_back(
        {def_names[i], {{"x", dual(j.lhs)}, {"y", j.rhs}}, coerce_node(pi, i, def_names, names), std::nullopt});
  }
  return out;
}

CoercionProgram coerce(const SubtypeDecision& decision, const Channel& x, const Channel& y, NameSupply& names) {
  if (!decision.holds || !decision.derivation) {
    throw std::invalid_argument("coerce: the subtyping does not hold");
  }
  return coerce(*decision.derivation, x, y, names);
}

SourceProgram erase(const SourceProgram& program, const TypingDerivation& d) {
  std::set<std::string> reserved;
  for (const auto& def : program.definitions) reserved.insert(def.name);
  Eraser e{d, NameSupply(reserved), {}};
  SourceProgram out;
  out.type_aliases = program.type_aliases;
  for (const auto& def : program.definitions) out.definitions.push_back({def.name, def.params, e.run(def.body), def.span});
  if (program.main) out.main = MainDecl{program.main->params, e.run(program.main->body), program.main->span};
  for (auto& def : e.extra) out.definitions.push_back(std::move(def));
  return out;
}

bool only_dual_cuts(const SourceProgram& program) {
  for (const auto& def : program.definitions) {
    if (!dual_cuts(def.body)) return false;
  }
  return !program.main || dual_cuts(program.main->body);
}

SourceProgram as_program(const CoercionProgram& c) {
  SourceProgram p;
  p.definitions = c.definitions;
  return p;
}

}  // namespace mucp
