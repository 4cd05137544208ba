#include "mucp/runtime.hpp"

#include <algorithm>
#include <map>

#include "mucp/diagnostic.hpp"
#include "mucp/syntax.hpp"

namespace mucp {

std::string to_string(ReductionRule r) {
  switch (r) {
    case ReductionRule::Close: return "r-close";
    case ReductionRule::Comm: return "r-comm";
    case ReductionRule::Case: return "r-case";
  }
  return "?";
}

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Terminated: return "terminated";
    case OutcomeKind::Deadlocked: return "deadlocked";
    case OutcomeKind::FuelExhausted: return "fuel-exhausted";
  }
  return "?";
}

namespace {

Process rename_one(const Process& p, const Channel& from, const Channel& to) {
  return from == to ? p : rename_channels(p, {{from, to}});
}

bool acts_on(const Process& p, const Channel& c) {
  if (p.is<Fail>()) return false;
  auto s = subject(p);
  return s && *s == c;
}

}  // namespace

Soup Soup::normalize(const Process& p, const SourceProgram& defs, std::size_t fuel) {
  Soup s(defs, fuel);
  s.names_ = free_channels(p);
  s.settle({s.add_member(p)});
  return s;
}

std::size_t Soup::add_member(Process p) {
  members_.push_back({next_member_, std::move(p)});
  return next_member_++;
}

std::size_t Soup::position(std::size_t id) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].id == id) return i;
  }
  throw InternalError("runtime: no member " + std::to_string(id));
}

Channel Soup::claim(const Channel& wanted) {
  if (names_.insert(wanted).second) return wanted;
  const Channel base = wanted.substr(0, wanted.find('#'));
  Channel name;
  do {
    name = base + "#" + std::to_string(++next_fresh_);
  } while (names_.count(name));
  names_.insert(name);
  return name;
}

void Soup::reanchor(std::size_t from, std::size_t to) {
  const auto kept = free_channels(members_[position(from)].process);
  const auto moved = free_channels(members_[position(to)].process);
  for (auto& c : cuts_) {
    for (std::size_t* side : {&c.left, &c.right}) {
      if (*side == from && moved.count(c.channel) && !kept.count(c.channel)) *side = to;
    }
  }
}

void Soup::settle(std::vector<std::size_t> pending) {
  while (!pending.empty()) {
    const std::size_t id = pending.back();
    pending.pop_back();
    while (true) {
      const Process p = members_[position(id)].process;
      if (const auto* call = p.as<Call>()) {
        if (fuel_ == 0) {
          starved_ = true;
          break;
        }
        const Definition* def = defs_->find(call->name);
        if (!def) throw Error(codes::kUnknownName, "process '" + call->name + "' is not defined");
        if (def->params.size() != call->args.size()) {
          throw Error(codes::kArity, "'" + call->name + "' expects " + std::to_string(def->params.size()) +
                                         " channels, got " + std::to_string(call->args.size()));
        }
        std::map<Channel, Channel> args;
        for (std::size_t i = 0; i < def->params.size(); ++i) args[def->params[i].channel] = call->args[i];
        --fuel_;
        members_[position(id)].process = rename_channels(def->body, args);
        continue;
      }
      if (const auto* cut = p.as<Cut>()) {
        const Channel name = claim(cut->channel);
        members_[position(id)].process = rename_one(cut->left, cut->channel, name);
        const std::size_t right = add_member(rename_one(cut->right, cut->channel, name));
        reanchor(id, right);
        cuts_.push_back({name, next_cut_++, id, right});
        pending.push_back(right);
        continue;
      }
      break;
    }
  }
}

std::vector<std::size_t> Soup::redexes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < cuts_.size(); ++k) {
    const auto& c = cuts_[k];
    if (acts_on(members_[position(c.left)].process, c.channel) &&
        acts_on(members_[position(c.right)].process, c.channel)) {
      out.push_back(k);
    }
  }
  return out;
}

std::optional<Soup::Firing> Soup::step(std::mt19937_64* rng) {
  const auto ready = redexes();
  if (ready.empty()) return std::nullopt;
  std::size_t pick = ready.front();
  if (rng) pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(*rng)];
  return fire(pick);
}

Soup::Firing Soup::fire(std::size_t k) {
  const LiveCut cut = cuts_[k];
  const Channel& x = cut.channel;
  std::size_t a = cut.left, b = cut.right;
  const Process pa = members_[position(a)].process;
  const Process pb = members_[position(b)].process;
  if (fuel_ > 0) --fuel_;

  auto oriented = [&]<class L, class R>(const L*& l, const R*& r, std::size_t& lid, std::size_t& rid) {
    l = pa.as<L>();
    r = pb.as<R>();
    lid = a;
    rid = b;
    if (!l || !r) {
      l = pb.as<L>();
      r = pa.as<R>();
      std::swap(lid, rid);
    }
    return l && r;
  };

  const Close* close = nullptr;
  const Wait* wait = nullptr;
  std::size_t cid = 0, wid = 0;
  if (oriented(close, wait, cid, wid)) {
    members_[position(wid)].process = wait->cont;
    cuts_.erase(cuts_.begin() + static_cast<std::ptrdiff_t>(k));
    for (auto& c : cuts_) {
      if (c.left == cid) c.left = wid;
      if (c.right == cid) c.right = wid;
    }
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(position(cid)));
    settle({wid});
    return {ReductionRule::Close, x};
  }

  const Send* send = nullptr;
  const Receive* recv = nullptr;
  std::size_t sid = 0, rid = 0;
  if (oriented(send, recv, sid, rid)) {
    const Channel y = claim(send->bound);
    members_[position(sid)].process = send->right;
    const std::size_t pid = add_member(rename_one(send->left, send->bound, y));
    reanchor(sid, pid);
    members_[position(rid)].process = rename_one(recv->cont, recv->bound, y);
    cuts_.push_back({y, next_cut_++, pid, rid});
    settle({sid, pid, rid});
    return {ReductionRule::Comm, x};
  }

  const Select* select = nullptr;
  const Case* choice = nullptr;
  std::size_t lid = 0, did = 0;
  if (oriented(select, choice, lid, did)) {
    members_[position(lid)].process = select->cont;
    members_[position(did)].process = select->branch == 0 ? choice->left : choice->right;
    settle({lid, did});
    return {ReductionRule::Case, x};
  }

  throw Error(codes::kIllMatchedRedex, "ill-matched redex on '" + x + "': " + pretty(pa) + " against " + pretty(pb));
}

Process Soup::renest() const {
  std::map<std::size_t, std::size_t> parent;
  std::map<std::size_t, Process> tree;
  for (const auto& m : members_) {
    parent[m.id] = m.id;
    tree.emplace(m.id, m.process);
  }
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& c : cuts_) {
    const std::size_t l = find(c.left), r = find(c.right);
    if (l == r) throw InternalError("runtime: cut on '" + c.channel + "' closes a cycle");
    tree.insert_or_assign(l, Process(Cut{c.channel, std::nullopt, std::nullopt, tree.at(l), tree.at(r)}));
    tree.erase(r);
    parent[r] = l;
  }
  if (tree.size() != 1) throw InternalError("runtime: soup is not connected");
  return tree.begin()->second;
}

RunResult run(const Process& p, const SourceProgram& defs, RunOptions options) {
  Trace trace;
  Soup soup = Soup::normalize(p, defs, options.fuel);
  std::optional<std::mt19937_64> rng;
  if (options.seed) rng.emplace(*options.seed);
  OutcomeKind kind = OutcomeKind::Terminated;
  while (true) {
    if (soup.starved()) {
      kind = OutcomeKind::FuelExhausted;
      break;
    }
    if (soup.redexes().empty()) {
      kind = soup.cuts().empty() ? OutcomeKind::Terminated : OutcomeKind::Deadlocked;
      break;
    }
    if (soup.fuel() == 0) {
      kind = OutcomeKind::FuelExhausted;
      break;
    }
    auto fired = soup.step(rng ? &*rng : nullptr);
    TraceStep s{fired->rule, fired->channel, trace.steps.size() + 1, std::nullopt};
    if (options.keep_snapshots) s.state = soup.renest();
    trace.steps.push_back(std::move(s));
  }
  return {Outcome{kind, soup.renest(), kind == OutcomeKind::Deadlocked}, std::move(trace)};
}

std::string render_trace(const RunResult& r) {
  std::string out;
  for (const auto& s : r.trace.steps) {
    out += "STEP " + std::to_string(s.snapshot) + ": " + to_string(s.rule) + " on " + s.channel + "\n";
  }
  out += "OUTCOME: " + to_string(r.outcome.kind) + "\n";
  return out;
}

}  // namespace mucp
