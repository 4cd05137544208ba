#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mucp/cli.hpp"
#include "mucp/diagnostic.hpp"

namespace mucp::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::string kFixtures = MUCP_FIXTURE_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

// File names are reduced to their base name so goldens do not depend on the
// checkout location.
json normalized(const std::string& text) {
  json j = json::parse(text);
  if (j.contains("file")) j["file"] = fs::path(j["file"].get<std::string>()).filename().string();
  for (auto& d : j["diagnostics"]) {
    if (!d["span"].is_null()) d["span"]["file"] = fs::path(d["span"]["file"].get<std::string>()).filename().string();
  }
  return j;
}

json golden(const std::string& name) {
  std::ifstream in(kFixtures + "/golden/" + name);
  return json::parse(in);
}

void expect_schema(const json& j) {
  ASSERT_TRUE(j.is_object());
  ASSERT_TRUE(j.contains("command"));
  ASSERT_TRUE(j["exit_code"].is_number_integer());
  ASSERT_TRUE(j["diagnostics"].is_array());
  const auto catalog = diagnostic_catalog();
  for (const auto& d : j["diagnostics"]) {
    EXPECT_TRUE(d["severity"].is_string());
    EXPECT_NE(std::find(catalog.begin(), catalog.end(), d["code"].get<std::string>()), catalog.end());
    EXPECT_TRUE(d["message"].is_string());
    EXPECT_TRUE(d["evidence"].is_array());
    if (!d["span"].is_null()) {
      for (const char* k : {"line", "column", "start", "end"}) EXPECT_TRUE(d["span"][k].is_number_unsigned()) << k;
      EXPECT_TRUE(d["span"]["file"].is_string());
    }
  }
  const std::string command = j["command"].is_null() ? "" : j["command"].get<std::string>();
  if (command == "subtype" && j["exit_code"] != 2) {
    EXPECT_TRUE(j["holds"].is_boolean());
    EXPECT_TRUE(j["evidence"].is_array());
  } else if (command == "run" && j["exit_code"] != 2) {
    EXPECT_TRUE(j["outcome"].is_string());
    EXPECT_TRUE(j["final_state"].is_string());
    EXPECT_TRUE(j["steps"].is_number_unsigned());
  } else if (command == "check" && j["exit_code"] == 0) {
    EXPECT_TRUE(j["definitions"].is_array());
  }
}

const char* const kFixtureNames[] = {"client_server", "client_server_swapped", "math_service",
                                     "producer_consumer", "relay", "chatter"};

TEST(Cli, CheckGoldens) {
  for (const std::string name : kFixtureNames) {
    SCOPED_TRACE(name);
    auto r = cli({"--json", "check", fixture(name + ".mcp")});
    json j = normalized(r.out);
    expect_schema(j);
    EXPECT_EQ(j, golden(name + ".check.json")) << r.out;
    EXPECT_EQ(r.code, name == "chatter" ? exit_code::kNegative : exit_code::kOk);
  }
}

TEST(Cli, RunGoldens) {
  for (const std::string name : kFixtureNames) {
    SCOPED_TRACE(name);
    std::vector<std::string> args{"run", fixture(name + ".mcp"), "--trace", "--json"};
    if (name == "chatter") args.insert(args.end(), {"--fuel", "30"});
    auto r = cli(args);
    json j = normalized(r.out);
    expect_schema(j);
    EXPECT_EQ(j, golden(name + ".run.json")) << r.out;
    EXPECT_EQ(r.code, name == "chatter" ? exit_code::kFuelExhausted : exit_code::kOk);
  }
}

TEST(Cli, SubtypeHolds) {
  auto r = cli({"subtype", "mu X.(1+X)", "nu X.(1+X)"});
  EXPECT_EQ(r.code, exit_code::kOk);
  EXPECT_EQ(r.out, "holds: mu X.(1 + X) <= nu X.(1 + X)\n");
}

TEST(Cli, SubtypeFailsWithCycleEvidence) {
  auto r = cli({"subtype", "nu X.(1+X)", "mu X.(1+X)"});
  EXPECT_EQ(r.code, exit_code::kNegative);
  EXPECT_NE(r.out.find("does not hold"), std::string::npos);
  EXPECT_NE(r.out.find("1 + (nu X.(1 + X)) <= 1 + (mu X.(1 + X))"), std::string::npos);
  auto j = json::parse(cli({"--json", "subtype", "nu X.(1+X)", "mu X.(1+X)"}).out);
  expect_schema(j);
  EXPECT_FALSE(j["holds"].get<bool>());
  EXPECT_EQ(j["evidence"].size(), 5u);
}

TEST(Cli, SubtypeExhaustiveFlag) {
  auto r = cli({"--json", "subtype", "--exhaustive", "mu X.nu Y.(1 + X)", "mu X.mu Y.(1 + X)"});
  EXPECT_EQ(r.code, exit_code::kOk);
  expect_schema(json::parse(r.out));
}

TEST(Cli, SubtypeParseErrorIsUsage) {
  auto r = cli({"--json", "subtype", "mu X", "1"});
  EXPECT_EQ(r.code, exit_code::kUsage);
  auto j = json::parse(r.out);
  expect_schema(j);
  EXPECT_EQ(j["diagnostics"][0]["code"], codes::kSyntax);
}

TEST(Cli, RunClientServer) {
  auto r = cli({"run", fixture("client_server.mcp")});
  EXPECT_EQ(r.code, exit_code::kOk);
  EXPECT_EQ(r.out, "final: close z\nOUTCOME: terminated\n");
}

TEST(Cli, RunTraceLines) {
  auto r = cli({"run", fixture("client_server.mcp"), "--trace"});
  EXPECT_EQ(r.out,
            "STEP 1: r-case on x\nSTEP 2: r-case on x\nSTEP 3: r-close on x\nfinal: close z\nOUTCOME: terminated\n");
}

TEST(Cli, RunSeedIsReproducible) {
  auto a = cli({"run", fixture("relay.mcp"), "--trace", "--seed", "9"});
  auto b = cli({"run", fixture("relay.mcp"), "--trace", "--seed", "9"});
  EXPECT_EQ(a.code, exit_code::kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, RunChatterExhaustsFuel) {
  auto r = cli({"run", fixture("chatter.mcp")});
  EXPECT_EQ(r.code, exit_code::kFuelExhausted);
  EXPECT_NE(r.out.find("OUTCOME: fuel-exhausted"), std::string::npos);
  EXPECT_NE(r.err.find("fuel-exhausted"), std::string::npos);
}

TEST(Cli, RunDeadlockIsNegative) {
  const fs::path p = fs::temp_directory_path() / "mucp_cli_deadlock.mcp";
  std::ofstream(p) << "main(z : 1) = new x { fail x | close x }\n";
  auto r = cli({"--json", "run", p.string()});
  EXPECT_EQ(r.code, exit_code::kNegative);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["outcome"], "deadlocked");
  EXPECT_TRUE(j["deadlocked"].get<bool>());
}

TEST(Cli, RunWithoutMain) {
  const fs::path p = fs::temp_directory_path() / "mucp_cli_nomain.mcp";
  std::ofstream(p) << "def P(x : 1) = close x\n";
  EXPECT_EQ(cli({"run", p.string()}).code, exit_code::kUsage);
}

TEST(Cli, EraseWritesCheckedProgram) {
  const fs::path out = fs::temp_directory_path() / "mucp_cli_erased.mcp";
  fs::remove(out);
  auto r = cli({"erase", fixture("client_server.mcp"), "-o", out.string()});
  EXPECT_EQ(r.code, exit_code::kOk) << r.err;
  ASSERT_TRUE(fs::exists(out));
  EXPECT_EQ(cli({"check", out.string()}).code, exit_code::kOk);
  auto run = cli({"run", out.string()});
  EXPECT_EQ(run.code, exit_code::kOk);
  EXPECT_EQ(run.out, "final: close z\nOUTCOME: terminated\n");
}

TEST(Cli, EraseRefusesIllTyped) {
  const fs::path out = fs::temp_directory_path() / "mucp_cli_chatter.mcp";
  fs::remove(out);
  auto r = cli({"erase", fixture("chatter.mcp"), "-o", out.string()});
  EXPECT_EQ(r.code, exit_code::kNegative);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, exit_code::kUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, exit_code::kUsage);
  EXPECT_EQ(cli({"erase", fixture("relay.mcp")}).code, exit_code::kUsage);
  EXPECT_EQ(cli({"run", fixture("relay.mcp"), "--fuel", "0"}).code, exit_code::kUsage);
  auto j = json::parse(cli({"--json", "subtype", "1"}).out);
  expect_schema(j);
  EXPECT_EQ(j["diagnostics"][0]["code"], codes::kUsage);
}

TEST(Cli, MissingFile) {
  auto r = cli({"check", fixture("does_not_exist.mcp")});
  EXPECT_EQ(r.code, exit_code::kUsage);
  EXPECT_NE(r.err.find("[io]"), std::string::npos);
}

TEST(Cli, ParseErrorHasLocation) {
  const fs::path p = fs::temp_directory_path() / "mucp_cli_bad.mcp";
  std::ofstream(p) << "def P(x : 1) =\n  close\n";
  auto r = cli({"--json", "check", p.string()});
  EXPECT_EQ(r.code, exit_code::kUsage);
  auto j = json::parse(r.out);
  expect_schema(j);
  EXPECT_EQ(j["diagnostics"][0]["span"]["line"], 3);
}

TEST(Cli, Help) {
  auto r = cli({"--help"});
  EXPECT_EQ(r.code, exit_code::kOk);
  EXPECT_NE(r.out.find("subtype"), std::string::npos);
}

}  // namespace
}  // namespace mucp::cli
