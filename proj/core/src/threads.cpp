#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "mucp/diagnostic.hpp"
#include "mucp/typecheck.hpp"

namespace mucp {

namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

// Every premise channel descends from at most one conclusion channel, so a
// trace graph over a path maps each end channel to its unique start channel.
// `label` is the rank of the smallest type unfolded on that thread segment.
struct Arc {
  std::uint32_t dst;
  std::uint32_t src;
  std::uint32_t label;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

using TraceGraph = std::vector<Arc>;  // sorted by dst, one arc per dst

TraceGraph compose(const TraceGraph& g, const TraceGraph& h) {
  TraceGraph out;
  out.reserve(h.size());
  for (const Arc& b : h) {
    auto a = std::lower_bound(g.begin(), g.end(), b.src, [](const Arc& x, std::uint32_t v) { return x.dst < v; });
    if (a != g.end() && a->dst == b.src) out.push_back({b.dst, a->src, std::min(a->label, b.label)});
  }
  return out;
}

class ThreadChecker {
 public:
  explicit ThreadChecker(const TypingDerivation& d) : d_(d) {
    std::vector<Type> unfolded;
    for (const auto& n : d.nodes) {
      if (n.rule != TypingRule::Fold) continue;
      const Type& t = n.context.at(n.channel);
      if (std::find(unfolded.begin(), unfolded.end(), t) == unfolded.end()) unfolded.push_back(t);
    }
    // Among the types unfolded infinitely often on a thread the least one is
    // a subterm of all others, hence strictly the smallest.
    std::stable_sort(unfolded.begin(), unfolded.end(), [](const Type& a, const Type& b) { return a.size() < b.size(); });
    for (std::size_t i = 0; i < unfolded.size(); ++i) {
      rank_.emplace(unfolded[i], static_cast<std::uint32_t>(i));
      greatest_.push_back(unfolded[i].binder() == Binder::Nu);
    }
  }

  std::optional<ThreadViolation> run() {
    std::vector<std::size_t> roots;
    std::map<std::size_t, std::size_t> root_slot;
    for (const auto& [name, r] : d_.definition_roots) {
      if (root_slot.emplace(r, roots.size()).second) roots.push_back(r);
    }
    // Every cycle passes through a definition root, since bodies are trees
    // and only calls point back to roots.
    std::vector<Entry> base;
    for (std::size_t r : roots) collect(r, r, identity_graph(r), {r}, root_slot, base);

    Adjacency root_succ(roots.size());
    for (const auto& e : base) root_succ[e.from].push_back(e.to);
    std::vector<std::size_t> component(roots.size(), SIZE_MAX);
    auto comps = cyclic_components(root_succ);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (std::size_t v : comps[c]) component[v] = c;
    }

    std::optional<ThreadViolation> best;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      std::vector<Entry> local;
      for (const auto& e : base) {
        if (component[e.from] == c && component[e.to] == c) local.push_back(e);
      }
      auto v = close(local);
      if (v && (!best || v->loop.size() < best->loop.size())) best = v;
    }
    return best;
  }

 private:
  struct Entry {
    std::size_t from;
    std::size_t to;
    TraceGraph graph;
    std::vector<std::size_t> path;
  };

  std::uint32_t vertex(const Channel& c) {
    return channel_ids_.emplace(c, static_cast<std::uint32_t>(channel_ids_.size())).first->second;
  }

  TraceGraph identity_graph(std::size_t n) {
    TraceGraph g;
    for (const auto& [c, t] : d_.nodes[n].context) {
      std::uint32_t v = vertex(c);
      g.push_back({v, v, kNone});
    }
    std::sort(g.begin(), g.end());
    return g;
  }

  TraceGraph step_graph(std::size_t n, std::size_t premise) {
    const TypingNode& node = d_.nodes[n];
    TraceGraph g;
    for (const auto& e : node.lineage[premise]) {
      std::uint32_t label = kNone;
      if (node.rule == TypingRule::Fold && node.channel == e.from) label = rank_.at(node.context.at(e.from));
      g.push_back({vertex(e.to), vertex(e.from), label});
    }
    std::sort(g.begin(), g.end());
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (g[i].dst == g[i - 1].dst) throw InternalError("channel with two ancestors in derivation lineage");
    }
    return g;
  }

  void collect(std::size_t root, std::size_t n, const TraceGraph& so_far, const std::vector<std::size_t>& path,
               const std::map<std::size_t, std::size_t>& root_slot, std::vector<Entry>& out) {
    const TypingNode& node = d_.nodes[n];
    for (std::size_t i = 0; i < node.premises.size(); ++i) {
      std::size_t k = node.premises[i];
      TraceGraph g = compose(so_far, step_graph(n, i));
      auto p = path;
      p.push_back(k);
      auto slot = root_slot.find(k);
      if (slot != root_slot.end()) {
        out.push_back({root_slot.at(root), slot->second, std::move(g), std::move(p)});
      } else {
        collect(root, k, g, p, root_slot, out);
      }
    }
  }

  // Arcs point backwards from each end to its unique start, so the threads of
  // g repeated forever eventually circle one of g's disjoint cycles. Good iff
  // the smallest label on some cycle belongs to a ν-type.
  bool repeats_well(const TraceGraph& g) const {
    std::unordered_map<std::uint32_t, const Arc*> into;
    for (const Arc& a : g) into.emplace(a.dst, &a);
    std::unordered_map<std::uint32_t, int> state;  // 1 on current walk, 2 done
    for (const Arc& start : g) {
      std::vector<std::uint32_t> walk;
      std::uint32_t v = start.dst;
      while (state[v] == 0) {
        state[v] = 1;
        walk.push_back(v);
        auto it = into.find(v);
        if (it == into.end()) break;
        v = it->second->src;
      }
      if (state[v] == 1 && into.count(v)) {
        std::uint32_t least = kNone;
        std::uint32_t u = v;
        do {
          const Arc* a = into.at(u);
          least = std::min(least, a->label);
          u = a->src;
        } while (u != v);
        if (least != kNone && greatest_[least]) return true;
      }
      for (std::uint32_t w : walk) state[w] = 2;
    }
    return false;
  }

  // Labels ordered by how much they help a cycle: small ν ranks best, then
  // no unfolding, then μ ranks with small ones worst. Taking minima of labels
  // is monotone in this order.
  std::uint32_t score(std::uint32_t label) const {
    const auto n = static_cast<std::uint32_t>(greatest_.size());
    if (label == kNone) return n;
    return greatest_[label] ? 2 * n - label : label;
  }

  // g is no better than h: each thread of g exists in h with a label at least
  // as good.
  bool below(const TraceGraph& g, const TraceGraph& h) const {
    if (g.size() > h.size()) return false;
    auto it = h.begin();
    for (const Arc& a : g) {
      while (it != h.end() && it->dst < a.dst) ++it;
      if (it == h.end() || it->dst != a.dst || it->src != a.src || score(it->label) < score(a.label)) return false;
    }
    return true;
  }

  // Searches forward from `root` over base paths, keeping per end root only
  // the worst graphs. Every periodic branch is a loop at one of its roots, so
  // the loops found here include one below each idempotent loop; those decide
  // validity exactly.
  std::optional<ThreadViolation> search(std::size_t root, const std::vector<Entry>& base,
                                        const std::map<std::size_t, std::vector<std::size_t>>& out_of) {
    struct Reached {
      std::size_t to;
      TraceGraph graph;
      std::size_t parent;  // SIZE_MAX at the start
      std::size_t via;     // base entry
    };
    std::vector<Reached> all;
    std::vector<bool> alive;
    std::map<std::size_t, std::vector<std::size_t>> frontier;
    std::deque<std::size_t> work;
    auto add = [&](Reached r) {
      auto& slot = frontier[r.to];
      for (std::size_t k : slot) {
        if (below(all[k].graph, r.graph)) return;
      }
      std::erase_if(slot, [&](std::size_t k) {
        if (!below(r.graph, all[k].graph)) return false;
        alive[k] = false;
        return true;
      });
      if (all.size() >= kMaxEntries) {
        throw InternalError("thread analysis exceeded " + std::to_string(kMaxEntries) + " trace graphs");
      }
      slot.push_back(all.size());
      work.push_back(all.size());
      alive.push_back(true);
      all.push_back(std::move(r));
    };
    auto it = out_of.find(root);
    if (it == out_of.end()) return std::nullopt;
    for (std::size_t b : it->second) add({base[b].to, base[b].graph, SIZE_MAX, b});
    while (!work.empty()) {
      std::size_t i = work.front();
      work.pop_front();
      if (!alive[i]) continue;
      auto next = out_of.find(all[i].to);
      if (next == out_of.end()) continue;
      for (std::size_t b : next->second) add({base[b].to, compose(all[i].graph, base[b].graph), i, b});
    }

    std::optional<ThreadViolation> best;
    for (std::size_t k : frontier[root]) {
      if (repeats_well(all[k].graph)) continue;
      std::vector<std::size_t> segments;
      for (std::size_t i = k; i != SIZE_MAX; i = all[i].parent) segments.push_back(all[i].via);
      ThreadViolation v;
      for (auto s = segments.rbegin(); s != segments.rend(); ++s) {
        const auto& p = base[*s].path;
        v.loop.insert(v.loop.end(), v.loop.empty() ? p.begin() : p.begin() + 1, p.end());
      }
      if (best && best->loop.size() <= v.loop.size()) continue;
      std::set<std::size_t> nodes(v.loop.begin(), v.loop.end());
      v.nodes.assign(nodes.begin(), nodes.end());
      best = std::move(v);
    }
    return best;
  }

  std::optional<ThreadViolation> close(const std::vector<Entry>& base) {
    std::map<std::size_t, std::vector<std::size_t>> out_of;
    for (std::size_t b = 0; b < base.size(); ++b) out_of[base[b].from].push_back(b);
    std::optional<ThreadViolation> best;
    for (const auto& [root, edges] : out_of) {
      auto v = search(root, base, out_of);
      if (v && (!best || v->loop.size() < best->loop.size())) best = std::move(v);
    }
    return best;
  }

  static constexpr std::size_t kMaxEntries = 2'000'000;

  const TypingDerivation& d_;
  std::unordered_map<Type, std::uint32_t> rank_;
  std::vector<bool> greatest_;
  std::unordered_map<Channel, std::uint32_t> channel_ids_;
};

}  // namespace

std::optional<ThreadViolation> check_derivation_validity(const TypingDerivation& d) { return ThreadChecker(d).run(); }

}  // namespace mucp
