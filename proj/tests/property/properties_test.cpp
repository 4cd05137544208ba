#include <gtest/gtest.h>

#include <random>

#include "mucp/coercion.hpp"
#include "mucp/diagnostic.hpp"
#include "mucp/runtime.hpp"
#include "mucp/subtype.hpp"
#include "mucp/syntax.hpp"
#include "mucp/typecheck.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace mucp {
namespace {

constexpr int kTypes = 10000;

Type with_binders(const Type& t, Binder b) {
  if (t.is_bin()) return Type::bin(t.connective(), with_binders(t.left(), b), with_binders(t.right(), b));
  if (t.is_fix()) return Type::fix(b, t.name(), with_binders(t.body(), b));
  return t;
}

bool holds(const Type& a, const Type& b) { return subtype(a, b).holds; }

TEST(Properties, DualIsAnInvolution) {
  testing::TypeGenerator gen(101);
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    ASSERT_EQ(dual(dual(t)), t) << pretty(t);
    ASSERT_EQ(dual(t), testing::oracle_dual(t)) << pretty(t);
  }
}

TEST(Properties, PrettyParseRoundTrip) {
  testing::TypeGenerator gen(102);
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    ASSERT_EQ(parse_type(pretty(t)), t) << pretty(t);
  }
  testing::ProcessGenerator procs(103);
  for (int i = 0; i < 2000; ++i) {
    Process p = procs.next();
    ASSERT_EQ(parse_process(pretty(p)), p) << pretty(p);
  }
}

TEST(Properties, Reflexivity) {
  testing::TypeGenerator gen(104);
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    ASSERT_TRUE(holds(t, t)) << pretty(t);
  }
}

TEST(Properties, ZeroBelowAndTopAbove) {
  testing::TypeGenerator gen(105);
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    ASSERT_TRUE(holds(Type::zero(), t)) << pretty(t);
    ASSERT_TRUE(holds(t, Type::top())) << pretty(t);
  }
}

TEST(Properties, DualityReversesSubtyping) {
  testing::TypeGenerator gen(106);
  int positive = 0;
  for (int i = 0; i < kTypes; ++i) {
    Type a = gen.next();
    Type b = a;
    switch (i % 4) {
      case 0: b = gen.replace_some(a, Constant::Top, 25); break;
      case 1: a = gen.replace_some(b, Constant::Zero, 25); break;
      case 2: b = with_binders(a, Binder::Nu); break;
      case 3: b = with_binders(a, Binder::Mu); break;
    }
    const bool forward = holds(a, b);
    positive += forward;
    ASSERT_EQ(forward, holds(dual(b), dual(a))) << pretty(a) << " <= " << pretty(b);
  }
  EXPECT_GT(positive, kTypes / 2);
}

TEST(Properties, Transitivity) {
  testing::TypeGenerator gen(107);
  int chains = 0;
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    Type low = gen.replace_some(with_binders(t, Binder::Mu), Constant::Zero, 20);
    Type high = gen.replace_some(with_binders(t, Binder::Nu), Constant::Top, 20);
    Type mid = i % 2 ? t : gen.replace_some(t, Constant::Zero, 10);
    if (holds(low, mid) && holds(mid, high)) {
      ++chains;
      ASSERT_TRUE(holds(low, high)) << pretty(low) << " <= " << pretty(mid) << " <= " << pretty(high);
    }
  }
  EXPECT_GT(chains, kTypes / 2);
}

TEST(Properties, LeastBelowGreatest) {
  testing::TypeGenerator gen(108);
  for (int i = 0; i < kTypes; ++i) {
    Type t = gen.next();
    ASSERT_TRUE(holds(with_binders(t, Binder::Mu), with_binders(t, Binder::Nu))) << pretty(t);
  }
}

TEST(Properties, CoercionsAreWellTypedAndValid) {
  testing::TypeGenerator gen(109);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    Type a = gen.next();
    Type b = i % 2 ? gen.replace_some(a, Constant::Top, 25) : with_binders(a, Binder::Nu);
    SubtypeDecision d = subtype(a, b);
    if (!d.holds) continue;
    ++checked;
    NameSupply names;
    CoercionProgram c = coerce(d, "x", "y", names);
    TypingDerivation td;
    ASSERT_NO_THROW(td = build_derivation(as_program(c), c.entry, {{"x", dual(a)}, {"y", b}}))
        << pretty(a) << " <= " << pretty(b);
    ASSERT_TRUE(audit(td).empty());
    ASSERT_FALSE(check_derivation_validity(td).has_value()) << pretty(a) << " <= " << pretty(b);
  }
  EXPECT_GT(checked, 1500);
}

TEST(Properties, ThreadCheckAgreesWithLoopOracle) {
  testing::TypeGenerator gen(112, {4, 40, 50});
  int invalid = 0, checked = 0;
  for (int i = 0; i < 1500; ++i) {
    Type a = gen.next();
    Type b = a;
    switch (i % 3) {
      case 0: b = gen.replace_some(a, Constant::Top, 30); break;
      case 1: a = gen.replace_some(b, Constant::Zero, 30); break;
      case 2: b = with_binders(a, i % 2 ? Binder::Mu : Binder::Nu); a = with_binders(a, Binder::Nu); break;
    }
    auto pi = derive(a, b);
    if (!std::holds_alternative<SubtypeDerivation>(pi)) continue;
    NameSupply names;
    CoercionProgram c = coerce(std::get<SubtypeDerivation>(pi), "x", "y", names);
    TypingDerivation td = build_derivation(as_program(c), c.entry, {{"x", dual(a)}, {"y", b}});
    ++checked;
    auto violation = check_derivation_validity(td);
    if (violation) {
      ++invalid;
      ASSERT_FALSE(testing::oracle_periodic_branch_valid(td, violation->loop)) << pretty(a) << " <= " << pretty(b);
    } else {
      for (const auto& loop : testing::oracle_root_loops(td, 12, 100)) {
        ASSERT_TRUE(testing::oracle_periodic_branch_valid(td, loop)) << pretty(a) << " <= " << pretty(b);
      }
    }
  }
  EXPECT_GT(checked, 700);
  EXPECT_GT(invalid, 20);
}

TEST(Properties, ExhaustiveAgreesWhenDefaultHolds) {
  testing::TypeGenerator gen(110);
  for (int i = 0; i < kTypes; ++i) {
    Type a = gen.next();
    Type b = gen.replace_some(a, Constant::Top, 20);
    if (holds(a, b)) ASSERT_TRUE(subtype(a, b, {true}).holds);
  }
}

TEST(Properties, RunsAreDeterministic) {
  testing::ProcessGenerator procs(111);
  SourceProgram defs = parse_program("def P(x : 1) = close x");
  for (int i = 0; i < 2000; ++i) {
    Process p = procs.next(4);
    std::string first, second;
    for (std::string* out : {&first, &second}) {
      try {
        RunResult r = run(p, defs, {200, std::nullopt, false});
        *out = render_trace(r) + pretty(r.outcome.final_state);
      } catch (const InternalError& e) {
        FAIL() << e.what() << " on " << pretty(p);
      } catch (const Error& e) {
        *out = e.code();
      }
    }
    ASSERT_EQ(first, second) << pretty(p);
  }
}

}  // namespace
}  // namespace mucp
