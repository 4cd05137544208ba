#include "mucp/graph.hpp"

#include <algorithm>
#include <limits>

namespace mucp {

std::vector<std::vector<std::size_t>> cyclic_components(const Adjacency& succ, const std::vector<bool>& active) {
  const std::size_t n = succ.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  auto live = [&](std::size_t v) { return active.empty() || active[v]; };

  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (!live(root) || index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < succ[f.v].size()) {
        std::size_t w = succ[f.v][f.next++];
        if (!live(w)) continue;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] != index[v]) continue;
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      bool cyclic = comp.size() > 1 ||
                    std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
      if (cyclic) {
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

bool strongly_connected(const Adjacency& succ, const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) return false;
  std::vector<bool> active(succ.size(), false);
  for (std::size_t v : nodes) active[v] = true;
  auto comps = cyclic_components(succ, active);
  return comps.size() == 1 && comps.front().size() == nodes.size();
}

}  // namespace mucp
