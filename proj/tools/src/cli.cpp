#include "mucp/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "mucp/coercion.hpp"
#include "mucp/diagnostic.hpp"
#include "mucp/runtime.hpp"
#include "mucp/subtype.hpp"
#include "mucp/syntax.hpp"
#include "mucp/typecheck.hpp"

namespace mucp::cli {
namespace {

using json = nlohmann::ordered_json;

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
};

Location locate(const std::string& source, std::size_t offset) {
  Location at;
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++at.line;
      at.column = 1;
    } else {
      ++at.column;
    }
  }
  return at;
}

json to_json(const Diagnostic& d, const std::string& source) {
  json j;
  j["severity"] = to_string(d.severity);
  j["code"] = d.code;
  j["message"] = d.message;
  if (d.span) {
    Location at = locate(source, d.span->start);
    j["span"] = {{"file", d.span->file}, {"line", at.line}, {"column", at.column},
                 {"start", d.span->start}, {"end", d.span->end}};
  } else {
    j["span"] = nullptr;
  }
  j["evidence"] = d.evidence;
  return j;
}

/// Collects the result of one command and prints it in the chosen format.
class Report {
 public:
  Report(bool as_json, std::ostream& out, std::ostream& err) : json_(as_json), out_(out), err_(err) {
    doc_["command"] = nullptr;
  }

  void command(const std::string& name) { doc_["command"] = name; }
  json& data() { return doc_; }

  void line(const std::string& text) {
    if (!json_) out_ << text << '\n';
  }

  int fail(const Diagnostic& d, int code, const std::string& source = {}) {
    diagnostics_.push_back(to_json(d, source));
    if (!json_) err_ << render(d, source) << '\n';
    return code;
  }

  int finish(int code) {
    if (json_) {
      doc_["exit_code"] = code;
      doc_["diagnostics"] = diagnostics_;
      out_ << doc_.dump(2) << '\n';
    }
    return code;
  }

 private:
  bool json_;
  std::ostream& out_;
  std::ostream& err_;
  json doc_;
  json diagnostics_ = json::array();
};

Diagnostic diagnostic(const std::string& code, const std::string& message) {
  return Diagnostic{Severity::Error, code, message, std::nullopt, {}};
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Maps library errors to exit codes; `body` returns the exit code.
template <class F>
int guarded(Report& report, const std::string& source, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    return report.fail(e.diagnostic(), exit_code::kUsage, source);
  } catch (const InternalError& e) {
    return report.fail(e.diagnostic(), exit_code::kInternal, source);
  } catch (const Error& e) {
    int code = e.code() == codes::kIllMatchedRedex ? exit_code::kInternal : exit_code::kNegative;
    return report.fail(e.diagnostic(), code, source);
  } catch (const std::exception& e) {
    return report.fail(diagnostic(codes::kInternal, e.what()), exit_code::kInternal, source);
  }
}

struct Settings {
  bool json = false;
  std::string file;
  std::string lhs, rhs;
  std::string output;
  bool exhaustive = false;
  std::size_t fuel = 100000;
  bool trace = false;
  std::optional<std::uint64_t> seed;
};

int check_command(const Settings& s, Report& report) {
  report.command("check");
  report.data()["file"] = s.file;
  auto source = read_file(s.file);
  if (!source) return report.fail(diagnostic(codes::kIo, "cannot read '" + s.file + "'"), exit_code::kUsage);
  return guarded(report, *source, [&] {
    SourceProgram program = parse_program(*source, s.file);
    TypingDerivation d = check_program(program, {s.exhaustive});
    json defs = json::array();
    for (const auto& def : program.definitions) defs.push_back(def.name);
    report.data()["ok"] = true;
    report.data()["definitions"] = defs;
    report.data()["main"] = program.main.has_value();
    report.data()["derivation_nodes"] = d.nodes.size();
    report.line("ok: " + std::to_string(program.definitions.size()) + " definitions" +
                (program.main ? " and main" : "") + " checked (" + std::to_string(d.nodes.size()) +
                " derivation nodes)");
    return exit_code::kOk;
  });
}

int subtype_command(const Settings& s, Report& report) {
  report.command("subtype");
  report.data()["lhs"] = s.lhs;
  report.data()["rhs"] = s.rhs;
  std::optional<Type> a, b;
  for (auto [text, slot] : {std::pair{&s.lhs, &a}, std::pair{&s.rhs, &b}}) {
    try {
      *slot = parse_type(*text);
    } catch (const ParseError& e) {
      return report.fail(e.diagnostic(), exit_code::kUsage, *text);
    }
  }
  return guarded(report, {}, [&] {
    SubtypeDecision decision = subtype(*a, *b, {s.exhaustive});
    const std::string judgment = pretty(*a) + " <= " + pretty(*b);
    report.data()["holds"] = decision.holds;
    report.data()["summary"] = decision.summary();
    report.data()["unfold_order"] = decision.order == UnfoldOrder::LeftFirst ? "left-first" : "right-first";
    report.data()["derivation_nodes"] =
        decision.derivation ? json(decision.derivation->nodes.size()) : json(nullptr);
    report.data()["evidence"] = decision.evidence();
    if (decision.holds) {
      report.line("holds: " + judgment);
      return exit_code::kOk;
    }
    report.line("does not hold: " + judgment + " (" + decision.summary() + ")");
    for (const auto& e : decision.evidence()) report.line("    " + e);
    return exit_code::kNegative;
  });
}

int erase_command(const Settings& s, Report& report) {
  report.command("erase");
  report.data()["file"] = s.file;
  report.data()["output"] = s.output;
  auto source = read_file(s.file);
  if (!source) return report.fail(diagnostic(codes::kIo, "cannot read '" + s.file + "'"), exit_code::kUsage);
  return guarded(report, *source, [&] {
    SourceProgram program = parse_program(*source, s.file);
    SourceProgram erased = erase(program, check_program(program, {s.exhaustive}));
    const std::string text = pretty(erased);
    try {
      check_program(parse_program(text, s.output));
    } catch (const Error& e) {
      Diagnostic d = e.diagnostic();
      d.code = codes::kInternal;
      d.message = "erased program does not check: " + d.message;
      d.span.reset();
      return report.fail(d, exit_code::kInternal);
    }
    std::ofstream out(s.output, std::ios::binary);
    if (!(out << text)) {
      return report.fail(diagnostic(codes::kIo, "cannot write '" + s.output + "'"), exit_code::kUsage);
    }
    const std::size_t added = erased.definitions.size() - program.definitions.size();
    report.data()["coercion_definitions"] = added;
    report.line("wrote " + s.output + " (" + std::to_string(added) + " coercion definitions)");
    return exit_code::kOk;
  });
}

int run_command(const Settings& s, Report& report) {
  report.command("run");
  report.data()["file"] = s.file;
  auto source = read_file(s.file);
  if (!source) return report.fail(diagnostic(codes::kIo, "cannot read '" + s.file + "'"), exit_code::kUsage);
  return guarded(report, *source, [&] {
    SourceProgram program = parse_program(*source, s.file);
    if (!program.main) return report.fail(diagnostic(codes::kNoMain, "no main to run"), exit_code::kUsage);
    RunResult r = run(program.main->body, program, {s.fuel, s.seed, false});
    const std::string final_state = pretty(r.outcome.final_state);
    report.data()["outcome"] = to_string(r.outcome.kind);
    report.data()["deadlocked"] = r.outcome.deadlocked;
    report.data()["final_state"] = final_state;
    report.data()["steps"] = r.trace.steps.size();
    if (s.trace) {
      json steps = json::array();
      for (const auto& st : r.trace.steps) {
        steps.push_back({{"step", st.snapshot}, {"rule", to_string(st.rule)}, {"channel", st.channel}});
        report.line("STEP " + std::to_string(st.snapshot) + ": " + to_string(st.rule) + " on " + st.channel);
      }
      report.data()["trace"] = steps;
    }
    report.line("final: " + final_state);
    report.line("OUTCOME: " + to_string(r.outcome.kind));
    switch (r.outcome.kind) {
      case OutcomeKind::Terminated: return exit_code::kOk;
      case OutcomeKind::Deadlocked:
        return report.fail(diagnostic(codes::kDeadlock, "stuck with a live cut: " + final_state),
                           exit_code::kNegative);
      case OutcomeKind::FuelExhausted:
        return report.fail(diagnostic(codes::kFuelExhausted, "fuel exhausted after " +
                                                                 std::to_string(r.trace.steps.size()) + " steps"),
                           exit_code::kFuelExhausted);
    }
    return exit_code::kInternal;
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Session type checker and interpreter with fair subtyping", "mucp"};
  app.require_subcommand(1);
  app.add_flag("--json", s.json, "Print one machine-readable JSON document");

  auto* check = app.add_subcommand("check", "Parse, typecheck and validate a program");
  check->add_option("FILE", s.file, "Program file")->required();
  check->add_flag("--exhaustive", s.exhaustive, "Retry failed subtypings with the other unfold order");

  auto* sub = app.add_subcommand("subtype", "Decide LHS <= RHS");
  sub->add_option("LHS", s.lhs, "Left type")->required();
  sub->add_option("RHS", s.rhs, "Right type")->required();
  sub->add_flag("--exhaustive", s.exhaustive, "Retry with the other unfold order on failure");

  auto* er = app.add_subcommand("erase", "Replace subtyping cuts by explicit coercions");
  er->add_option("FILE", s.file, "Program file")->required();
  er->add_option("-o,--output", s.output, "Output file")->required();
  er->add_flag("--exhaustive", s.exhaustive, "Retry failed subtypings with the other unfold order");

  auto* rn = app.add_subcommand("run", "Execute main");
  rn->add_option("FILE", s.file, "Program file")->required();
  rn->add_option("--fuel", s.fuel, "Reduction and unfolding budget")->check(CLI::PositiveNumber);
  rn->add_flag("--trace", s.trace, "Print every reduction step");
  rn->add_option("--seed", s.seed, "Pick redexes at random with this seed");

  for (auto* c : {check, sub, er, rn}) c->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    const bool as_json = std::find(args.begin(), args.end(), "--json") != args.end();
    Report report(as_json, out, err);
    report.fail(diagnostic(codes::kUsage, e.what()), exit_code::kUsage);
    if (!as_json) err << app.help();
    return report.finish(exit_code::kUsage);
  }

  Report report(s.json, out, err);
  int code = exit_code::kInternal;
  if (check->parsed()) code = check_command(s, report);
  if (sub->parsed()) code = subtype_command(s, report);
  if (er->parsed()) code = erase_command(s, report);
  if (rn->parsed()) code = run_command(s, report);
  return report.finish(code);
}

}  // namespace mucp::cli
