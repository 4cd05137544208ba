#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mucp/graph.hpp"
#include "mucp/process.hpp"
#include "mucp/subtype.hpp"
#include "mucp/type.hpp"

namespace mucp {

using Context = std::map<Channel, Type>;

enum class TypingRule { Call, Cut, Top, Bot, One, Par, Tensor, With, Plus, Fold };

std::string to_string(TypingRule r);

/// One step of a thread: channel `from` in the conclusion continues as `to`
/// in the premise.
struct LineageEdge {
  Channel from;
  Channel to;

  friend bool operator==(const LineageEdge&, const LineageEdge&) = default;
};

struct TypingNode {
  Process process;
  Context context;
  TypingRule rule = TypingRule::Top;
  /// Principal channel; the cut channel for cuts, empty for calls.
  Channel channel;
  /// Fold only.
  Binder binder = Binder::Mu;
  /// Plus only: 0 for inl, 1 for inr.
  int branch = 0;
  /// Call only.
  std::string callee;
  std::vector<std::size_t> premises;
  /// Parallel to `premises`.
  std::vector<std::vector<LineageEdge>> lineage;
  /// Cut only: left type, right type and the decision for left <= dual(right).
  std::optional<Type> cut_left;
  std::optional<Type> cut_right;
  std::optional<SubtypeDecision> subtyping;
};

/// Finite cyclic typing derivation. Every definition body is typed once, at
/// its annotated context; call nodes point back to that root.
struct TypingDerivation {
  std::vector<TypingNode> nodes;
  std::map<std::string, std::size_t> definition_roots;
  std::optional<std::size_t> main_root;

  Adjacency successors() const;
  /// Subtyping decision recorded for the cut whose process node is `cut`.
  const SubtypeDecision* cut_evidence(const Process& cut) const;
};

struct CheckOptions {
  bool exhaustive_subtyping = false;
};

/// An infinite branch without a valid ν-thread. `nodes` is the cycle that the
/// branch repeats; `loop` lists it in order starting and ending at a
/// definition root.
struct ThreadViolation {
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> loop;
};

/// Checks that every infinite branch carries a thread whose least recurring
/// type is a ν-type and that this ν-type is unfolded infinitely often.
///
/// Decided exactly: each thread segment between definition roots is labelled
/// with the smallest type it unfolds, and the composition closure of these
/// trace graphs is formed. Repeating any loop of the closure forever must
/// admit a thread whose smallest recurring label is a ν-type.
std::optional<ThreadViolation> check_derivation_validity(const TypingDerivation& d);

/// Builds the derivation for `p` at `ctx` using the definitions of `program`.
/// Throws TypeError. Validity is not checked.
TypingDerivation build_derivation(const SourceProgram& program, const Process& p, const Context& ctx,
                                  CheckOptions options = {});

/// Types every definition at its annotation and main (if any) at its declared
/// channels, then checks validity. Throws TypeError on the first problem.
TypingDerivation check_program(const SourceProgram& program, CheckOptions options = {});

/// Re-verifies every node against its rule shape. Returns one line per problem.
std::vector<std::string> audit(const TypingDerivation& d);

std::string render_context(const Context& ctx);
std::string render_judgment(const TypingNode& n);

}  // namespace mucp
