#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "cml/graph/graph.hpp"

namespace cml::graph {

/// True iff every path between a and b is blocked by z (chains and forks
/// blocked when the middle node is in z; colliders blocked unless the
/// collider or one of its descendants is in z). Requires a != b, a, b not in z.
bool d_separated(const Dag& g, NodeId a, NodeId b, const NodeSet& z);
bool d_separated(const Dag& g, const std::string& a, const std::string& b, const std::vector<std::string>& z);

/// Simple paths between a and b left open by z, capped at `limit` paths.
std::vector<std::vector<NodeId>> open_paths(const Dag& g, NodeId a, NodeId b, const NodeSet& z,
                                            std::size_t limit = 16);

/// (a, c, b) with a -> c <- b, a < b, a and b non-adjacent.
using VStructure = std::tuple<NodeId, NodeId, NodeId>;
std::vector<VStructure> v_structures(const Dag& g);
std::vector<VStructure> v_structures(const Cpdag& g);

/// Applies Meek's four orientation rules until nothing changes. Directed
/// edges are only ever added.
Cpdag meek_orient(Cpdag g);

/// Completed PDAG of the Markov equivalence class of `dag`.
Cpdag cpdag_of(const Dag& dag);

/// Interventional essential graph: like cpdag_of, but every edge with
/// exactly one endpoint inside some intervention target is also oriented.
Cpdag icpdag_of(const Dag& dag, const std::vector<NodeSet>& targets);

/// Consistent DAG extension (same skeleton, no new v-structures) of a PDAG.
/// Sinks are chosen in node-name order. Throws GraphError when the input
/// admits no consistent extension.
Dag extend_to_dag(const Cpdag& g);

/// Same adjacencies irrespective of orientation.
bool same_skeleton(const Cpdag& a, const Cpdag& b);

}  // namespace cml::graph
