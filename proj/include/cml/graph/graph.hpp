#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cml::graph {

using NodeId = std::size_t;
/// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<NodeId>;
using Edge = std::pair<NodeId, NodeId>;

NodeSet make_node_set(std::vector<NodeId> nodes);
bool contains(const NodeSet& set, NodeId v);

/// Shared node-name bookkeeping for both graph kinds.
class NodeIndex {
public:
    NodeIndex() = default;
    explicit NodeIndex(std::vector<std::string> names);

    const std::vector<std::string>& nodes() const { return names_; }
    std::size_t size() const { return names_.size(); }
    const std::string& name(NodeId v) const { return names_.at(v); }
    std::optional<NodeId> find(std::string_view name) const;
    /// Throws GraphError("unknown node") when absent.
    NodeId index_of(std::string_view name) const;
    NodeSet indices_of(const std::vector<std::string>& names) const;
    std::vector<std::string> names_of(const NodeSet& set) const;

private:
    std::vector<std::string> names_;
};

/// Directed acyclic graph. Mutations that would create a cycle, a self-loop
/// or a duplicate edge throw GraphError.
class Dag : public NodeIndex {
public:
    Dag() = default;
    explicit Dag(std::vector<std::string> nodes);
    Dag(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& edges);

    bool has_edge(NodeId from, NodeId to) const { return adj_[from * size() + to] != 0; }
    bool adjacent(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }
    void add_edge(NodeId from, NodeId to);
    void remove_edge(NodeId from, NodeId to);

    NodeSet parents(NodeId v) const;
    NodeSet children(NodeId v) const;
    /// Sorted (from, to) pairs.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;

    /// True when a directed path from -> ... -> to exists (from == to counts).
    bool reachable(NodeId from, NodeId to) const;
    NodeSet ancestors(NodeId v) const;    ///< excluding v
    NodeSet descendants(NodeId v) const;  ///< excluding v
    std::vector<NodeId> topological_order() const;

    bool operator==(const Dag& other) const;

private:
    std::vector<std::uint8_t> adj_;
};

/// Partially directed graph: every adjacent pair is either directed or
/// undirected, never both. Used for CPDAGs and intermediate PDAGs.
class Cpdag : public NodeIndex {
public:
    Cpdag() = default;
    explicit Cpdag(std::vector<std::string> nodes);
    static Cpdag from_dag(const Dag& dag);
    /// Every DAG edge as undirected.
    static Cpdag skeleton_of(const Dag& dag);

    bool has_directed(NodeId from, NodeId to) const { return dir_[from * size() + to] != 0; }
    bool has_undirected(NodeId a, NodeId b) const { return und_[a * size() + b] != 0; }
    bool adjacent(NodeId a, NodeId b) const {
        return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
    }

    /// Both endpoints must be non-adjacent beforehand.
    void add_directed(NodeId from, NodeId to);
    void add_undirected(NodeId a, NodeId b);
    /// Removes whatever edge joins a and b; throws if none.
    void remove_edge(NodeId a, NodeId b);
    /// Turns undirected {a, b} into a -> b; throws if {a, b} is not undirected.
    void orient(NodeId from, NodeId to);

    NodeSet parents(NodeId v) const;    ///< directed into v
    NodeSet children(NodeId v) const;   ///< directed out of v
    NodeSet neighbors(NodeId v) const;  ///< undirected
    NodeSet adjacents(NodeId v) const;

    std::vector<Edge> directed_edges() const;
    /// Pairs with first < second.
    std::vector<Edge> undirected_edges() const;
    bool fully_directed() const;
    /// True when the directed part contains a cycle.
    bool has_directed_cycle() const;
    /// Requires fully_directed() and acyclicity.
    Dag to_dag() const;

    bool operator==(const Cpdag& other) const;

private:
    std::vector<std::uint8_t> dir_;
    std::vector<std::uint8_t> und_;
};

/// Subgraph of `dag` induced on `names`, in the given order.
Dag induced_subgraph(const Dag& dag, const std::vector<std::string>& names);

/// Same node names in the same order.
bool same_nodes(const NodeIndex& a, const NodeIndex& b);

}  // namespace cml::graph
