#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mucp/graph.hpp"
#include "mucp/type.hpp"

namespace mucp {

struct SubtypeJudgment {
  Type lhs;
  Type rhs;

  friend bool operator==(const SubtypeJudgment&, const SubtypeJudgment&) = default;
};

enum class SubtypeRule { Refl, Bot, Top, UnfoldLeft, UnfoldRight, Cong };

std::string to_string(SubtypeRule r);

struct SubtypeNode {
  SubtypeJudgment judgment;
  SubtypeRule rule = SubtypeRule::Refl;
  /// Leaves have none, unfolds one, congruences two. May point backwards.
  std::vector<std::size_t> children;
};

/// Finite cyclic derivation graph; node 0 is the root.
struct SubtypeDerivation {
  std::vector<SubtypeNode> nodes;

  const SubtypeNode& root() const { return nodes.front(); }
  Adjacency successors() const;
};

/// Judgments from the root down to one where no rule applies.
struct MismatchPath {
  std::vector<SubtypeJudgment> judgments;
};

/// A strongly connected node set whose recurring types satisfy neither
/// validity clause.
struct ValidityViolation {
  std::vector<std::size_t> nodes;
  Type lhs_min;
  Type rhs_min;
};

enum class UnfoldOrder { LeftFirst, RightFirst };

/// Builds the derivation by the fixed rule order
/// refl, bot, top, unfold-left, unfold-right, cong (the two unfolds swap under
/// RightFirst). Judgments are memoized, so revisits become back-edges.
std::variant<SubtypeDerivation, MismatchPath> derive(const Type& a, const Type& b,
                                                      UnfoldOrder order = UnfoldOrder::LeftFirst);

/// Checks every strongly connected node set with an edge: the least left type
/// must be a μ-type or the least right type a ν-type. Decides this exactly by
/// peeling, within each component, the nodes carrying a good minimum and
/// recursing on what is left. Throws InternalError if a minimum is undefined.
std::optional<ValidityViolation> check_validity(const SubtypeDerivation& d);

struct SubtypeOptions {
  /// On failure, retry with the other unfold order.
  bool exhaustive = false;
};

struct SubtypeDecision {
  bool holds = false;
  /// Present whenever derive succeeded (also when validity then failed).
  std::optional<SubtypeDerivation> derivation;
  std::optional<MismatchPath> mismatch;
  std::optional<ValidityViolation> violation;
  UnfoldOrder order = UnfoldOrder::LeftFirst;

  /// Failure evidence rendered one judgment per line; empty when it holds.
  std::vector<std::string> evidence() const;
  std::string summary() const;
};

SubtypeDecision subtype(const Type& a, const Type& b, SubtypeOptions options = {});

std::string to_string(const SubtypeJudgment& j);

}  // namespace mucp
