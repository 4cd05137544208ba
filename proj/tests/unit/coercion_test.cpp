#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "mucp/coercion.hpp"
#include "mucp/diagnostic.hpp"
#include "mucp/syntax.hpp"
#include "mucp/typecheck.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace mucp {
namespace {

Type T(const char* s) { return parse_type(s); }

SourceProgram fixture(const std::string& name) {
  std::ifstream in(std::string(MUCP_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), name);
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(MUCP_FIXTURE_DIR) + "/coercions/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CoercionProgram coercion_for(const Type& a, const Type& b) {
  NameSupply names;
  return coerce(subtype(a, b), "x", "y", names);
}

std::string root_body(const Type& a, const Type& b) { return pretty(coercion_for(a, b).definitions.at(0).body); }

Context coercion_context(const Type& a, const Type& b) { return {{"x", dual(a)}, {"y", b}}; }

// Types the coercion of a derivation at its entry and reports thread validity.
bool coercion_valid(const SubtypeDerivation& pi) {
  NameSupply names;
  auto c = coerce(pi, "x", "y", names);
  const auto& j = pi.root().judgment;
  auto d = build_derivation(as_program(c), c.entry, coercion_context(j.lhs, j.rhs));
  EXPECT_TRUE(audit(d).empty());
  return !check_derivation_validity(d).has_value();
}

// Replaces some fixed-point binders by their opposite.
Type flip_binders(const Type& t, std::mt19937_64& rng) {
  if (t.is_bin()) return Type::bin(t.connective(), flip_binders(t.left(), rng), flip_binders(t.right(), rng));
  if (!t.is_fix()) return t;
  Binder b = t.binder();
  if (rng() % 2 == 0) b = b == Binder::Mu ? Binder::Nu : Binder::Mu;
  return Type::fix(b, t.name(), flip_binders(t.body(), rng));
}

TEST(Coercion, UnitShapes) {
  EXPECT_EQ(root_body(T("1"), T("1")), "wait x; close y");
  EXPECT_EQ(root_body(T("bot"), T("bot")), "wait y; close x");
  EXPECT_EQ(root_body(T("0"), T("1 * bot")), "fail x");
  EXPECT_EQ(root_body(T("1 + 1"), T("top")), "fail y");
  EXPECT_EQ(root_body(T("top"), T("top")), "fail y");
}

TEST(Coercion, ConnectiveShapes) {
  auto plus = coercion_for(T("1 + 0"), T("1 + 1"));
  EXPECT_EQ(pretty(plus.definitions[0].body),
            "case x { y.inl; " + plus.definitions[1].name + "(x, y) | y.inr; " + plus.definitions[2].name + "(x, y) }");
  auto with = coercion_for(T("1 & 1"), T("1 & top"));
  EXPECT_EQ(pretty(with.definitions[0].body),
            "case y { x.inl; " + with.definitions[1].name + "(x, y) | x.inr; " + with.definitions[2].name + "(x, y) }");
  auto tensor = coercion_for(T("1 * 0"), T("1 * top"));
  EXPECT_EQ(pretty(tensor.definitions[0].body), "x?(u0); y!(v1){" + tensor.definitions[1].name + "(u0, v1)}{" +
                                                     tensor.definitions[2].name + "(x, y)}");
  auto par = coercion_for(T("bot par 0"), T("bot par top"));
  EXPECT_EQ(pretty(par.definitions[0].body),
            "y?(u0); x!(v1){" + par.definitions[1].name + "(v1, u0)}{" + par.definitions[2].name + "(x, y)}");
}

TEST(Coercion, GoldenFiles) {
  for (auto [lhs, rhs, file] : {std::tuple{"nu X.(bot & X)", "bot & (bot & top)", "offer.mcp"},
                               std::tuple{"0 + (1 + 0)", "mu X.(1 + X)", "request.mcp"}}) {
    SCOPED_TRACE(file);
    EXPECT_EQ(pretty(as_program(coercion_for(T(lhs), T(rhs)))), golden(file) + "\n");
  }
}

TEST(Coercion, RefusesFailedSubtyping) {
  NameSupply names;
  EXPECT_THROW(coerce(subtype(T("1"), T("bot")), "x", "y", names), std::invalid_argument);
}

TEST(Coercion, NameSupplySkipsReserved) {
  NameSupply names({"Coerce0", "Coerce2"});
  EXPECT_EQ(names.definition(), "Coerce1");
  EXPECT_EQ(names.definition(), "Coerce3");
}

TEST(Coercion, FixtureCoercionsTypecheck) {
  for (auto [a, b] : {std::pair{"0 + (1 + 0)", "mu X.(1 + X)"}, std::pair{"nu X.(bot & X)", "bot & (bot & top)"},
                      std::pair{"nu X.(bot & (1 * X))", "bot & (1 * (bot & (1 * top)))"}}) {
    auto c = coercion_for(T(a), T(b));
    TypingDerivation d;
    ASSERT_NO_THROW(d = check_program(as_program(c))) << a << " <= " << b;
    EXPECT_TRUE(audit(d).empty());
  }
}

TEST(Coercion, SplittingFixedPoint) {
  // Receiving splits the thread in two; each half is followed separately.
  const Type t = T("mu X.(X * X)");
  auto c = coercion_for(t, t);
  EXPECT_NO_THROW(check_program(as_program(c)));
  auto d = build_derivation(as_program(c), c.entry, coercion_context(t, t));
  auto loops = testing::oracle_root_loops(d, 30, 100);
  EXPECT_FALSE(loops.empty());
  for (const auto& loop : loops) EXPECT_TRUE(testing::oracle_periodic_branch_valid(d, loop));
}

TEST(Coercion, InvalidDerivationGivesInvalidCoercion) {
  auto pi = derive(T("nu X.(1 + X)"), T("mu X.(1 + X)"));
  ASSERT_TRUE(std::holds_alternative<SubtypeDerivation>(pi));
  EXPECT_FALSE(coercion_valid(std::get<SubtypeDerivation>(pi)));
}

TEST(Coercion, ValidityMatchesSubtyping) {
  testing::TypeGenerator gen(7, {4, 40, 50});
  std::mt19937_64 rng(11);
  int derivable = 0, invalid = 0;
  for (int i = 0; i < 600; ++i) {
    Type a = gen.next();
    Type b = a;
    switch (i % 3) {
      case 0: b = gen.replace_some(a, Constant::Top, 30); break;
      case 1: a = gen.replace_some(b, Constant::Zero, 30); break;
      case 2: b = flip_binders(a, rng); break;
    }
    auto pi = derive(a, b);
    if (!std::holds_alternative<SubtypeDerivation>(pi)) continue;
    const auto& der = std::get<SubtypeDerivation>(pi);
    ++derivable;
    const bool subtype_valid = !check_validity(der).has_value();
    if (!subtype_valid) ++invalid;
    EXPECT_EQ(coercion_valid(der), subtype_valid) << pretty(a) << " <= " << pretty(b);
  }
  EXPECT_GT(derivable, 300);
  EXPECT_GT(invalid, 5);
}

TEST(Coercion, EraseLeavesOnlyDualCuts) {
  for (const char* name : {"client_server.mcp", "client_server_swapped.mcp", "math_service.mcp",
                           "producer_consumer.mcp", "relay.mcp"}) {
    SCOPED_TRACE(name);
    auto program = fixture(name);
    auto d = check_program(program);
    auto erased = erase(program, d);
    EXPECT_TRUE(only_dual_cuts(erased));
    EXPECT_FALSE(only_dual_cuts(program));
    TypingDerivation again;
    ASSERT_NO_THROW(again = check_program(erased)) << pretty(erased);
    EXPECT_TRUE(audit(again).empty());
    auto reparsed = parse_program(pretty(erased));
    EXPECT_NO_THROW(check_program(reparsed));
  }
}

TEST(Coercion, EraseKeepsDualCuts) {
  auto program = parse_program("main(z : 1) = new x : 1 | bot { close x | wait x; close z }");
  auto erased = erase(program, check_program(program));
  EXPECT_EQ(pretty(erased), pretty(program));
}

}  // namespace
}  // namespace mucp
