#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mucp/process.hpp"

namespace mucp {

enum class ReductionRule { Close, Comm, Case };

/// "r-close", "r-comm" or "r-case".
std::string to_string(ReductionRule r);

/// Flattened form of a process: sequential members joined by live cuts.
///
/// Every cut remembers the member on each of its sides, so re-nesting
/// rebuilds a tree of cuts with the original orientation.
class Soup {
 public:
  struct Member {
    std::size_t id;
    Process process;
  };
  struct LiveCut {
    Channel channel;
    /// Creation order; redexes are tried in this order.
    std::size_t index;
    std::size_t left;
    std::size_t right;
  };
  struct Firing {
    ReductionRule rule;
    Channel channel;
  };

  /// Flattens `p`, unfolding top-level calls while fuel lasts.
  static Soup normalize(const Process& p, const SourceProgram& defs, std::size_t fuel);

  /// Fires one redex, the one on the oldest cut unless `rng` is given, in
  /// which case a uniformly random one. Returns nullopt when stuck. Throws
  /// Error(ill-matched-redex) when both ends of the chosen cut act on it with
  /// mismatched actions.
  std::optional<Firing> step(std::mt19937_64* rng = nullptr);

  /// Cuts whose two ends both have the cut channel as their subject.
  std::vector<std::size_t> redexes() const;

  /// Rebuilds a single process from the members and cuts.
  Process renest() const;

  const std::vector<Member>& members() const { return members_; }
  const std::vector<LiveCut>& cuts() const { return cuts_; }
  std::size_t fuel() const { return fuel_; }
  /// True once an unfolding was skipped for lack of fuel.
  bool starved() const { return starved_; }

 private:
  Soup(const SourceProgram& defs, std::size_t fuel) : defs_(&defs), fuel_(fuel) {}

  std::size_t add_member(Process p);
  std::size_t position(std::size_t id) const;
  Channel claim(const Channel& wanted);
  void settle(std::vector<std::size_t> pending);
  /// Moves anchors at `from` over to `to` for cuts whose channel is free in
  /// the process of `to` but not in that of `from`.
  void reanchor(std::size_t from, std::size_t to);
  Firing fire(std::size_t cut);

  const SourceProgram* defs_;
  std::size_t fuel_;
  bool starved_ = false;
  std::vector<Member> members_;
  std::vector<LiveCut> cuts_;
  std::size_t next_member_ = 0;
  std::size_t next_cut_ = 0;
  std::size_t next_fresh_ = 0;
  std::set<Channel> names_;
};

struct TraceStep {
  ReductionRule rule;
  Channel channel;
  /// 1-based position of the resulting snapshot in the run.
  std::size_t snapshot;
  /// Re-nested state after the step, kept only on request.
  std::optional<Process> state;
};

struct Trace {
  std::vector<TraceStep> steps;
};

enum class OutcomeKind { Terminated, Deadlocked, FuelExhausted };

/// "terminated", "deadlocked" or "fuel-exhausted".
std::string to_string(OutcomeKind k);

struct Outcome {
  OutcomeKind kind;
  /// Last state reached, re-nested.
  Process final_state;
  /// Stuck with a live cut left.
  bool deadlocked = false;
};

struct RunOptions {
  std::size_t fuel = 100000;
  /// Random redex choice instead of oldest-cut-first.
  std::optional<std::uint64_t> seed;
  bool keep_snapshots = false;
};

struct RunResult {
  Outcome outcome;
  Trace trace;
};

/// Reduces `p` until stuck or out of fuel. Both reductions and call
/// unfoldings consume one unit of fuel. Does not typecheck.
RunResult run(const Process& p, const SourceProgram& defs, RunOptions options = {});

/// One "STEP k: <rule> on <channel>" line per step, then "OUTCOME: <kind>".
std::string render_trace(const RunResult& r);

}  // namespace mucp
