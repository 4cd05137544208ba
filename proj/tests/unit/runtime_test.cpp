#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mucp/coercion.hpp"
#include "mucp/diagnostic.hpp"
#include "mucp/runtime.hpp"
#include "mucp/syntax.hpp"
#include "mucp/typecheck.hpp"
#include "support/generators.hpp"

namespace mucp {
namespace {

const SourceProgram kNoDefs;

SourceProgram fixture(const std::string& name) {
  std::ifstream in(std::string(MUCP_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), name);
}

const char* const kAccepted[] = {"client_server.mcp", "client_server_swapped.mcp", "math_service.mcp",
                                 "producer_consumer.mcp", "relay.mcp"};

Process single_step(const char* source) {
  Soup s = Soup::normalize(parse_process(source), kNoDefs, 100);
  auto fired = s.step();
  EXPECT_TRUE(fired.has_value());
  return s.renest();
}

// Each live cut channel is free in both of its anchor members and nowhere else.
void expect_soup_invariant(const Soup& s) {
  for (const auto& c : s.cuts()) {
    std::size_t holders = 0;
    bool left = false, right = false;
    for (const auto& m : s.members()) {
      if (!free_channels(m.process).count(c.channel)) continue;
      ++holders;
      left = left || m.id == c.left;
      right = right || m.id == c.right;
    }
    EXPECT_EQ(holders, 2u) << c.channel;
    EXPECT_TRUE(left && right) << c.channel;
  }
}

TEST(Runtime, CloseStep) {
  EXPECT_EQ(single_step("new x { close x | wait x; close z }"), parse_process("close z"));
  EXPECT_EQ(single_step("new x { wait x; close z | close x }"), parse_process("close z"));
}

TEST(Runtime, CaseStep) {
  EXPECT_EQ(single_step("new x { x.inr; close x | case x { wait x; close w | wait x; close z } }"),
            parse_process("new x { close x | wait x; close z }"));
  EXPECT_EQ(single_step("new x { x.inl; close x | case x { wait x; close w | wait x; close z } }"),
            parse_process("new x { close x | wait x; close w }"));
}

TEST(Runtime, CommStep) {
  EXPECT_EQ(single_step("new x { x!(y){close y}{close x} | x?(y); wait y; wait x; close z }"),
            parse_process("new y { close y | new x { close x | wait y; wait x; close z } }"));
  EXPECT_EQ(single_step("new x { x!(y){close y}{close x} | x?(u); wait u; wait x; close z }"),
            parse_process("new y { close y | new x { close x | wait y; wait x; close z } }"));
}

TEST(Runtime, CommFreshensClashingChannel) {
  auto p = single_step("new x { x!(y){close y}{close x} | x?(u); wait u; wait x; close y }");
  EXPECT_EQ(pretty(p), "new y#1 { close y#1 | new x { close x | wait y#1; wait x; close y } }");
  const auto* outer = p.as<Cut>();
  ASSERT_NE(outer, nullptr);
  EXPECT_EQ(outer->channel, "y#1");
}

TEST(Runtime, NormalizeFlattensNestedCuts) {
  auto p = parse_process("new x { close x | new y { wait x; close y | wait y; close z } }");
  Soup s = Soup::normalize(p, kNoDefs, 10);
  EXPECT_EQ(s.members().size(), 3u);
  ASSERT_EQ(s.cuts().size(), 2u);
  EXPECT_EQ(s.cuts()[0].channel, "x");
  EXPECT_EQ(s.cuts()[1].channel, "y");
  expect_soup_invariant(s);
  EXPECT_EQ(s.renest(), parse_process("new y { new x { close x | wait x; close y } | wait y; close z }"));
}

TEST(Runtime, NormalizeFollowsChannelIntoRightComponent) {
  auto p = parse_process("new x { close x | new y { wait y; close z | wait x; close y } }");
  Soup s = Soup::normalize(p, kNoDefs, 10);
  expect_soup_invariant(s);
}

TEST(Runtime, NormalizeUnfoldsCalls) {
  auto program = fixture("client_server.mcp");
  Soup s = Soup::normalize(parse_process("Server(x, z)"), program, 10);
  EXPECT_EQ(s.fuel(), 9u);
  EXPECT_EQ(s.renest(), parse_process("case x { wait x; close z | Server(x, z) }"));
}

TEST(Runtime, SingletonSoup) {
  Soup s = Soup::normalize(parse_process("close x"), kNoDefs, 10);
  EXPECT_EQ(s.members().size(), 1u);
  EXPECT_TRUE(s.cuts().empty());
  EXPECT_FALSE(s.step().has_value());
}

TEST(Runtime, IllMatchedRedexIsReported) {
  Soup s = Soup::normalize(parse_process("new x { close x | x?(y); close y }"), kNoDefs, 10);
  try {
    s.step();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), codes::kIllMatchedRedex);
  }
}

TEST(Runtime, FailingPartnerDeadlocks) {
  auto r = run(parse_process("new x { fail x | close x }"), kNoDefs);
  EXPECT_EQ(r.outcome.kind, OutcomeKind::Deadlocked);
  EXPECT_TRUE(r.outcome.deadlocked);
  EXPECT_TRUE(r.trace.steps.empty());
}

TEST(Runtime, ClientServerReducesToClose) {
  auto program = fixture("client_server.mcp");
  auto r = run(program.main->body, program);
  EXPECT_EQ(r.outcome.kind, OutcomeKind::Terminated);
  EXPECT_FALSE(r.outcome.deadlocked);
  EXPECT_EQ(r.outcome.final_state, parse_process("close z"));
  EXPECT_EQ(render_trace(r),
            "STEP 1: r-case on x\n"
            "STEP 2: r-case on x\n"
            "STEP 3: r-close on x\n"
            "OUTCOME: terminated\n");
}

TEST(Runtime, AcceptedFixturesTerminate) {
  for (const char* name : kAccepted) {
    SCOPED_TRACE(name);
    auto program = fixture(name);
    auto r = run(program.main->body, program);
    EXPECT_EQ(r.outcome.kind, OutcomeKind::Terminated);
    EXPECT_EQ(r.outcome.final_state, parse_process("close z"));
    EXPECT_NO_THROW(build_derivation(program, r.outcome.final_state, {{"z", parse_type("1")}}));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      auto rs = run(program.main->body, program, o);
      EXPECT_EQ(rs.outcome.kind, OutcomeKind::Terminated) << seed;
      EXPECT_EQ(rs.outcome.final_state, parse_process("close z")) << seed;
    }
  }
}

TEST(Runtime, ErasedFixturesReachSameState) {
  for (const char* name : kAccepted) {
    SCOPED_TRACE(name);
    auto program = fixture(name);
    auto erased = erase(program, check_program(program));
    auto a = run(program.main->body, program);
    auto b = run(erased.main->body, erased);
    EXPECT_EQ(b.outcome.kind, OutcomeKind::Terminated);
    EXPECT_EQ(a.outcome.final_state, b.outcome.final_state);
  }
}

TEST(Runtime, ChatterExhaustsFuel) {
  auto program = fixture("chatter.mcp");
  RunOptions o;
  o.fuel = 10000;
  auto r = run(program.main->body, program, o);
  EXPECT_EQ(r.outcome.kind, OutcomeKind::FuelExhausted);
  EXPECT_GT(r.trace.steps.size(), 1000u);
  EXPECT_EQ(render_trace(r).substr(render_trace(r).rfind("OUTCOME")), "OUTCOME: fuel-exhausted\n");
}

TEST(Runtime, UnproductiveCallExhaustsFuel) {
  auto program = parse_program("def Spin(x : 1) = Spin(x)");
  auto r = run(parse_process("Spin(z)"), program);
  EXPECT_EQ(r.outcome.kind, OutcomeKind::FuelExhausted);
  EXPECT_TRUE(r.trace.steps.empty());
}

TEST(Runtime, Deterministic) {
  auto program = fixture("math_service.mcp");
  auto a = run(program.main->body, program);
  auto b = run(program.main->body, program);
  EXPECT_EQ(render_trace(a), render_trace(b));
  RunOptions o;
  o.seed = 5;
  EXPECT_EQ(render_trace(run(program.main->body, program, o)), render_trace(run(program.main->body, program, o)));
}

TEST(Runtime, SnapshotsKeepSoupShape) {
  for (const char* name : kAccepted) {
    SCOPED_TRACE(name);
    auto program = fixture(name);
    Soup s = Soup::normalize(program.main->body, program, 100000);
    expect_soup_invariant(s);
    std::size_t steps = 0;
    while (s.step()) {
      expect_soup_invariant(s);
      ASSERT_LT(++steps, 10000u);
    }
    RunOptions o;
    o.keep_snapshots = true;
    auto r = run(program.main->body, program, o);
    ASSERT_EQ(r.trace.steps.size(), steps);
    for (std::size_t i = 0; i < steps; ++i) {
      ASSERT_TRUE(r.trace.steps[i].state.has_value());
      EXPECT_EQ(r.trace.steps[i].snapshot, i + 1);
      EXPECT_NE(r.trace.steps[i].state, i == 0 ? std::optional<Process>(program.main->body) : r.trace.steps[i - 1].state);
    }
  }
}

}  // namespace
}  // namespace mucp
