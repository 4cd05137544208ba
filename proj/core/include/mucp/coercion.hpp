#pragma once

#include <set>
#include <string>
#include <vector>

#include "mucp/process.hpp"
#include "mucp/subtype.hpp"
#include "mucp/typecheck.hpp"

namespace mucp {

/// Deterministic source of coercion definition names and fresh channels.
/// Names already in `reserved` are skipped.
class NameSupply {
 public:
  explicit NameSupply(std::set<std::string> reserved = {}, std::string prefix = "Coerce")
      : reserved_(std::move(reserved)), prefix_(std::move(prefix)) {}

  std::string definition();
  /// A channel `base` followed by a counter, e.g. u0, u1.
  Channel channel(const std::string& base);

 private:
  std::set<std::string> reserved_;
  std::string prefix_;
  int next_definition_ = 0;
  int next_channel_ = 0;
};

/// Coercion processes for one derivation: one definition per derivation node,
/// each with parameters (x : dual(lhs), y : rhs).
struct CoercionProgram {
  std::vector<Definition> definitions;
  /// Invocation of the root definition at the requested channels.
  Process entry;
};

/// Translates every node of `pi` into a process that consumes the left type
/// on `x` and offers the right type on `y`. Validity of `pi` is not checked.
CoercionProgram coerce(const SubtypeDerivation& pi, const Channel& x, const Channel& y, NameSupply& names);

/// As above for a decision; throws std::invalid_argument unless it holds.
CoercionProgram coerce(const SubtypeDecision& decision, const Channel& x, const Channel& y, NameSupply& names);

/// Replaces every cut whose endpoint types are not exact duals by two exact
/// cuts around a coercion, using the subtyping evidence recorded in `d`.
SourceProgram erase(const SourceProgram& program, const TypingDerivation& d);

/// True when every cut in the program carries exactly dual endpoint types.
bool only_dual_cuts(const SourceProgram& program);

/// Program holding a coercion's definitions and no main, ready to check.
SourceProgram as_program(const CoercionProgram& c);

}  // namespace mucp
