#include "mucp/diagnostic.hpp"

#include <sstream>

namespace mucp {

std::vector<std::string> diagnostic_catalog() {
  using namespace codes;
  return {kSyntax,     kDuplicateDefinition, kUnknownName,      kOpenType,        kUnguardedType,
          kAliasCycle, kLinearity,           kTypeMismatch,     kArity,           kSubtypeFailed,
          kInvalidDerivation, kNotSubtype,   kNoMain,           kFuelExhausted,   kDeadlock,
          kIllMatchedRedex,   kUsage,        kIo,               kInternal};
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "error";
}

std::string render(const Diagnostic& d, const std::string& source) {
  std::ostringstream out;
  if (d.span) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < d.span->start && i < source.size(); ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    out << (d.span->file.empty() ? "<input>" : d.span->file) << ':' << line << ':' << col << ": ";
  }
  out << to_string(d.severity) << '[' << d.code << "]: " << d.message;
  for (const auto& e : d.evidence) out << "\n    " << e;
  return out.str();
}

}  // namespace mucp
