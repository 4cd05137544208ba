#include "mucp/subtype.hpp"

#include <unordered_map>

#include "mucp/closure.hpp"
#include "mucp/diagnostic.hpp"
#include "mucp/syntax.hpp"

namespace mucp {

namespace {

struct JudgmentHash {
  std::size_t operator()(const SubtypeJudgment& j) const { return j.lhs.hash() * 1000003u ^ j.rhs.hash(); }
};

class Deriver {
 public:
  explicit Deriver(UnfoldOrder order) : order_(order) {}

  std::variant<SubtypeDerivation, MismatchPath> run(const Type& a, const Type& b) {
    if (!visit({a, b})) return MismatchPath{std::move(failure_)};
    return std::move(derivation_);
  }

 private:
  std::optional<std::size_t> visit(const SubtypeJudgment& j) {
    if (auto it = memo_.find(j); it != memo_.end()) return it->second;
    const std::size_t id = derivation_.nodes.size();
    memo_.emplace(j, id);
    derivation_.nodes.push_back({j, SubtypeRule::Refl, {}});
    path_.push_back(j);

    const Type& l = j.lhs;
    const Type& r = j.rhs;
    std::optional<SubtypeRule> rule;
    std::vector<SubtypeJudgment> premises;
    if (l.is_const() && r.is_const() && l.constant() == r.constant()) {
      rule = SubtypeRule::Refl;
    } else if (l.is_const(Constant::Zero)) {
      rule = SubtypeRule::Bot;
    } else if (r.is_const(Constant::Top)) {
      rule = SubtypeRule::Top;
    } else if (order_ == UnfoldOrder::LeftFirst && l.is_fix()) {
      rule = SubtypeRule::UnfoldLeft;
    } else if (r.is_fix()) {
      rule = SubtypeRule::UnfoldRight;
    } else if (l.is_fix()) {
      rule = SubtypeRule::UnfoldLeft;
    } else if (l.is_bin() && r.is_bin() && l.connective() == r.connective()) {
      rule = SubtypeRule::Cong;
    }

    if (!rule) {
      failure_ = path_;
      return std::nullopt;
    }
    switch (*rule) {
      case SubtypeRule::UnfoldLeft: premises.push_back({unfold(l), r}); break;
      case SubtypeRule::UnfoldRight: premises.push_back({l, unfold(r)}); break;
      case SubtypeRule::Cong:
        premises.push_back({l.left(), r.left()});
        premises.push_back({l.right(), r.right()});
        break;
      default: break;
    }
    derivation_.nodes[id].rule = *rule;
    for (const auto& p : premises) {
      auto child = visit(p);
      if (!child) return std::nullopt;
      derivation_.nodes[id].children.push_back(*child);
    }
    path_.pop_back();
    return id;
  }

  UnfoldOrder order_;
  SubtypeDerivation derivation_;
  std::unordered_map<SubtypeJudgment, std::size_t, JudgmentHash> memo_;
  std::vector<SubtypeJudgment> path_;
  std::vector<SubtypeJudgment> failure_;
};

std::optional<ValidityViolation> peel(const SubtypeDerivation& d, const Adjacency& succ,
                                      const std::vector<bool>& active) {
  for (const auto& comp : cyclic_components(succ, active)) {
    std::vector<Type> lefts, rights;
    for (std::size_t n : comp) {
      lefts.push_back(d.nodes[n].judgment.lhs);
      rights.push_back(d.nodes[n].judgment.rhs);
    }
    auto lmin = subformula_min(lefts);
    auto rmin = subformula_min(rights);
    if (!lmin || !rmin) {
      std::vector<std::string> evidence;
      for (std::size_t n : comp) evidence.push_back(to_string(d.nodes[n].judgment));
      throw InternalError("recurring types of a subtyping cycle have no least element", evidence);
    }
    const bool left_ok = lmin->is_fix(Binder::Mu);
    const bool right_ok = rmin->is_fix(Binder::Nu);
    if (!left_ok && !right_ok) return ValidityViolation{comp, *lmin, *rmin};

    std::vector<bool> rest(d.nodes.size(), false);
    for (std::size_t n : comp) {
      const auto& j = d.nodes[n].judgment;
      bool settled = (left_ok && j.lhs == *lmin) || (right_ok && j.rhs == *rmin);
      rest[n] = !settled;
    }
    if (auto v = peel(d, succ, rest)) return v;
  }
  return std::nullopt;
}

std::string binder_word(const Type& t) {
  if (t.is_fix()) return t.binder() == Binder::Mu ? "a mu-type" : "a nu-type";
  return "not a fixed point";
}

}  // namespace

std::string to_string(SubtypeRule r) {
  switch (r) {
    case SubtypeRule::Refl: return "refl";
    case SubtypeRule::Bot: return "bot";
    case SubtypeRule::Top: return "top";
    case SubtypeRule::UnfoldLeft: return "unfold-left";
    case SubtypeRule::UnfoldRight: return "unfold-right";
    case SubtypeRule::Cong: return "cong";
  }
  return "?";
}

std::string to_string(const SubtypeJudgment& j) { return pretty(j.lhs) + " <= " + pretty(j.rhs); }

Adjacency SubtypeDerivation::successors() const {
  Adjacency succ(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) succ[i] = nodes[i].children;
  return succ;
}

std::variant<SubtypeDerivation, MismatchPath> derive(const Type& a, const Type& b, UnfoldOrder order) {
  return Deriver(order).run(a, b);
}

std::optional<ValidityViolation> check_validity(const SubtypeDerivation& d) {
  return peel(d, d.successors(), std::vector<bool>(d.nodes.size(), true));
}

SubtypeDecision subtype(const Type& a, const Type& b, SubtypeOptions options) {
  auto attempt = [&](UnfoldOrder order) {
    SubtypeDecision out;
    out.order = order;
    auto result = derive(a, b, order);
    if (auto* path = std::get_if<MismatchPath>(&result)) {
      out.mismatch = std::move(*path);
      return out;
    }
    out.derivation = std::move(std::get<SubtypeDerivation>(result));
    out.violation = check_validity(*out.derivation);
    out.holds = !out.violation;
    return out;
  };
  SubtypeDecision first = attempt(UnfoldOrder::LeftFirst);
  if (first.holds || !options.exhaustive) return first;
  SubtypeDecision second = attempt(UnfoldOrder::RightFirst);
  return second.holds ? second : first;
}

std::vector<std::string> SubtypeDecision::evidence() const {
  std::vector<std::string> out;
  if (mismatch) {
    for (const auto& j : mismatch->judgments) out.push_back(to_string(j));
    if (!mismatch->judgments.empty()) out.push_back("no rule applies to " + to_string(mismatch->judgments.back()));
  } else if (violation && derivation) {
    for (std::size_t n : violation->nodes) out.push_back(to_string(derivation->nodes[n].judgment));
    out.push_back("least left type " + pretty(violation->lhs_min) + " is " + binder_word(violation->lhs_min) +
                  ", so the mu clause fails");
    out.push_back("least right type " + pretty(violation->rhs_min) + " is " + binder_word(violation->rhs_min) +
                  ", so the nu clause fails");
  }
  return out;
}

std::string SubtypeDecision::summary() const {
  if (holds) return "holds";
  if (mismatch) return "fails: no derivation";
  return "fails: invalid infinite branch";
}

}  // namespace mucp
