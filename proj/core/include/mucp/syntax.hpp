#pragma once

#include <string>
#include <string_view>

#include "mucp/process.hpp"
#include "mucp/type.hpp"

namespace mucp {

/// Parses a `.mcp` program. Aliases are expanded, every invoked process name
/// is resolved, and bound channels are renamed apart where they would clash.
/// Throws ParseError (with a span) on any failure.
SourceProgram parse_program(std::string_view source, const std::string& file = "<input>");

/// Parses a single closed, guarded type. `dual(T)` is resolved here.
Type parse_type(std::string_view source);

/// Parses a process term; types in cuts must be closed.
Process parse_process(std::string_view source);

/// Canonical surface rendering; parse(pretty(v)) == v.
std::string pretty(const Type& t);
std::string pretty(const Process& p);
std::string pretty(const SourceProgram& p);

}  // namespace mucp
