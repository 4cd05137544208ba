#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mucp {

struct SourceSpan {
  std::string file;
  std::size_t start = 0;
  std::size_t end = 0;
};

enum class Severity { Error, Warning, Info };

/// Diagnostic codes. Every error diagnostic uses one of these.
namespace codes {
inline constexpr const char* kSyntax = "syntax";
inline constexpr const char* kDuplicateDefinition = "duplicate-definition";
inline constexpr const char* kUnknownName = "unknown-name";
inline constexpr const char* kOpenType = "open-type";
inline constexpr const char* kUnguardedType = "unguarded-type";
inline constexpr const char* kAliasCycle = "alias-cycle";
inline constexpr const char* kLinearity = "linearity";
inline constexpr const char* kTypeMismatch = "type-mismatch";
inline constexpr const char* kArity = "arity-mismatch";
inline constexpr const char* kSubtypeFailed = "subtype-failed";
inline constexpr const char* kInvalidDerivation = "invalid-derivation";
inline constexpr const char* kNotSubtype = "not-subtype";
inline constexpr const char* kNoMain = "no-main";
inline constexpr const char* kFuelExhausted = "fuel-exhausted";
inline constexpr const char* kDeadlock = "deadlock";
inline constexpr const char* kIllMatchedRedex = "ill-matched-redex";
inline constexpr const char* kUsage = "usage";
inline constexpr const char* kIo = "io";
inline constexpr const char* kInternal = "internal";
}  // namespace codes

std::vector<std::string> diagnostic_catalog();

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::optional<SourceSpan> span;
  /// Rendered judgments: a failure path or a violating set.
  std::vector<std::string> evidence;
};

std::string to_string(Severity s);

/// Renders "file:line:col: severity[code]: message" plus indented evidence.
std::string render(const Diagnostic& d, const std::string& source = {});

/// Base of all errors raised by the library; carries a full diagnostic.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostic d) : std::runtime_error(d.message), diagnostic_(std::move(d)) {}
  Error(std::string code, std::string message, std::optional<SourceSpan> span = std::nullopt,
        std::vector<std::string> evidence = {})
      : Error(Diagnostic{Severity::Error, std::move(code), std::move(message), std::move(span),
                         std::move(evidence)}) {}

  const Diagnostic& diagnostic() const { return diagnostic_; }
  const std::string& code() const { return diagnostic_.code; }

 private:
  Diagnostic diagnostic_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

/// Violation of an internal invariant (not a user error).
class InternalError : public Error {
 public:
  explicit InternalError(std::string message, std::vector<std::string> evidence = {})
      : Error(codes::kInternal, std::move(message), std::nullopt, std::move(evidence)) {}
};

}  // namespace mucp
