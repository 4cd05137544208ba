#pragma once

#include <cstddef>
#include <vector>

namespace mucp {

using Adjacency = std::vector<std::vector<std::size_t>>;

/// Strongly connected components of the subgraph induced by `active`
/// (all nodes when empty) that contain at least one edge, i.e. the node sets
/// an infinite path can visit infinitely often. Iterative Tarjan.
std::vector<std::vector<std::size_t>> cyclic_components(const Adjacency& succ, const std::vector<bool>& active = {});

/// True when `nodes` induces a strongly connected subgraph with an edge.
bool strongly_connected(const Adjacency& succ, const std::vector<std::size_t>& nodes);

}  // namespace mucp
