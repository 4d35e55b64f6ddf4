#include "cml/graph/graph.hpp"

#include <algorithm>
#include <set>

#include "cml/util/error.hpp"

namespace cml::graph {

NodeSet make_node_set(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

bool contains(const NodeSet& set, NodeId v) { return std::binary_search(set.begin(), set.end(), v); }

NodeIndex::NodeIndex(std::vector<std::string> names) : names_(std::move(names)) {
    std::set<std::string_view> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw GraphError("empty node name");
        if (!seen.insert(n).second) throw GraphError("duplicate node '" + n + "'");
    }
}

std::optional<NodeId> NodeIndex::find(std::string_view name) const {
    for (NodeId i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

NodeId NodeIndex::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw GraphError("unknown node '" + std::string(name) + "'");
}

NodeSet NodeIndex::indices_of(const std::vector<std::string>& names) const {
    std::vector<NodeId> out;
    for (const auto& n : names) out.push_back(index_of(n));
    return make_node_set(std::move(out));
}

std::vector<std::string> NodeIndex::names_of(const NodeSet& set) const {
    std::vector<std::string> out;
    for (NodeId v : set) out.push_back(name(v));
    return out;
}

// ---------------------------------------------------------------- Dag

Dag::Dag(std::vector<std::string> nodes) : NodeIndex(std::move(nodes)), adj_(size() * size(), 0) {}

Dag::Dag(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& edges)
    : Dag(std::move(nodes)) {
    for (const auto& [a, b] : edges) add_edge(index_of(a), index_of(b));
}

void Dag::add_edge(NodeId from, NodeId to) {
    if (from >= size() || to >= size()) throw GraphError("node index out of range");
    if (from == to) throw GraphError("self-loop on '" + name(from) + "'");
    if (has_edge(from, to)) throw GraphError("duplicate edge " + name(from) + " -> " + name(to));
    if (reachable(to, from))
        throw GraphError("edge " + name(from) + " -> " + name(to) + " would create a cycle");
    adj_[from * size() + to] = 1;
}

void Dag::remove_edge(NodeId from, NodeId to) {
    if (!has_edge(from, to)) throw GraphError("no edge " + name(from) + " -> " + name(to));
    adj_[from * size() + to] = 0;
}

NodeSet Dag::parents(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (has_edge(u, v)) out.push_back(u);
    return out;
}

NodeSet Dag::children(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (has_edge(v, u)) out.push_back(u);
    return out;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < size(); ++a)
        for (NodeId b = 0; b < size(); ++b)
            if (has_edge(a, b)) out.emplace_back(a, b);
    return out;
}

std::size_t Dag::edge_count() const { return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1)); }

bool Dag::reachable(NodeId from, NodeId to) const {
    std::vector<std::uint8_t> seen(size(), 0);
    std::vector<NodeId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (NodeId c = 0; c < size(); ++c) {
            if (has_edge(v, c) && !seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
        }
    }
    return false;
}

NodeSet Dag::ancestors(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (u != v && reachable(u, v)) out.push_back(u);
    return out;
}

NodeSet Dag::descendants(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (u != v && reachable(v, u)) out.push_back(u);
    return out;
}

std::vector<NodeId> Dag::topological_order() const {
    std::vector<std::size_t> indegree(size(), 0);
    for (const auto& [a, b] : edges()) ++indegree[b];
    std::vector<NodeId> order;
    std::vector<std::uint8_t> done(size(), 0);
    // Kahn's algorithm, smallest index first for determinism.
    while (order.size() < size()) {
        NodeId next = size();
        for (NodeId v = 0; v < size(); ++v)
            if (!done[v] && indegree[v] == 0) {
                next = v;
                break;
            }
        if (next == size()) throw GraphError("graph contains a cycle");
        done[next] = 1;
        order.push_back(next);
        for (NodeId c = 0; c < size(); ++c)
            if (has_edge(next, c)) --indegree[c];
    }
    return order;
}

bool Dag::operator==(const Dag& other) const { return nodes() == other.nodes() && adj_ == other.adj_; }

// ---------------------------------------------------------------- Cpdag

Cpdag::Cpdag(std::vector<std::string> nodes)
    : NodeIndex(std::move(nodes)), dir_(size() * size(), 0), und_(size() * size(), 0) {}

Cpdag Cpdag::from_dag(const Dag& dag) {
    Cpdag g(dag.nodes());
    for (const auto& [a, b] : dag.edges()) g.add_directed(a, b);
    return g;
}

Cpdag Cpdag::skeleton_of(const Dag& dag) {
    Cpdag g(dag.nodes());
    for (const auto& [a, b] : dag.edges()) g.add_undirected(a, b);
    return g;
}

void Cpdag::add_directed(NodeId from, NodeId to) {
    if (from >= size() || to >= size()) throw GraphError("node index out of range");
    if (from == to) throw GraphError("self-loop on '" + name(from) + "'");
    if (adjacent(from, to)) throw GraphError(name(from) + " and " + name(to) + " are already adjacent");
    dir_[from * size() + to] = 1;
}

void Cpdag::add_undirected(NodeId a, NodeId b) {
    if (a >= size() || b >= size()) throw GraphError("node index out of range");
    if (a == b) throw GraphError("self-loop on '" + name(a) + "'");
    if (adjacent(a, b)) throw GraphError(name(a) + " and " + name(b) + " are already adjacent");
    und_[a * size() + b] = und_[b * size() + a] = 1;
}

void Cpdag::remove_edge(NodeId a, NodeId b) {
    if (!adjacent(a, b)) throw GraphError("no edge between " + name(a) + " and " + name(b));
    dir_[a * size() + b] = dir_[b * size() + a] = 0;
    und_[a * size() + b] = und_[b * size() + a] = 0;
}

void Cpdag::orient(NodeId from, NodeId to) {
    if (!has_undirected(from, to))
        throw GraphError("no undirected edge " + name(from) + " - " + name(to) + " to orient");
    und_[from * size() + to] = und_[to * size() + from] = 0;
    dir_[from * size() + to] = 1;
}

NodeSet Cpdag::parents(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (has_directed(u, v)) out.push_back(u);
    return out;
}

NodeSet Cpdag::children(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (has_directed(v, u)) out.push_back(u);
    return out;
}

NodeSet Cpdag::neighbors(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (has_undirected(v, u)) out.push_back(u);
    return out;
}

NodeSet Cpdag::adjacents(NodeId v) const {
    NodeSet out;
    for (NodeId u = 0; u < size(); ++u)
        if (u != v && adjacent(u, v)) out.push_back(u);
    return out;
}

std::vector<Edge> Cpdag::directed_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < size(); ++a)
        for (NodeId b = 0; b < size(); ++b)
            if (has_directed(a, b)) out.emplace_back(a, b);
    return out;
}

std::vector<Edge> Cpdag::undirected_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < size(); ++a)
        for (NodeId b = a + 1; b < size(); ++b)
            if (has_undirected(a, b)) out.emplace_back(a, b);
    return out;
}

bool Cpdag::fully_directed() const { return std::find(und_.begin(), und_.end(), 1) == und_.end(); }

bool Cpdag::has_directed_cycle() const {
    // colour-marking DFS over directed edges
    std::vector<int> state(size(), 0);
    std::vector<std::pair<NodeId, NodeId>> stack;
    for (NodeId root = 0; root < size(); ++root) {
        if (state[root]) continue;
        stack.emplace_back(root, 0);
        state[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == size()) {
                state[v] = 2;
                stack.pop_back();
                continue;
            }
            const NodeId c = next++;
            if (!has_directed(v, c)) continue;
            if (state[c] == 1) return true;
            if (state[c] == 0) {
                state[c] = 1;
                stack.emplace_back(c, 0);
            }
        }
    }
    return false;
}

Dag Cpdag::to_dag() const {
    if (!fully_directed()) throw GraphError("graph still has undirected edges");
    Dag dag(nodes());
    for (const auto& [a, b] : directed_edges()) dag.add_edge(a, b);
    return dag;
}

bool Cpdag::operator==(const Cpdag& other) const {
    return nodes() == other.nodes() && dir_ == other.dir_ && und_ == other.und_;
}

Dag induced_subgraph(const Dag& dag, const std::vector<std::string>& names) {
    Dag out(names);
    for (NodeId a = 0; a < names.size(); ++a)
        for (NodeId b = 0; b < names.size(); ++b)
            if (a != b && dag.has_edge(dag.index_of(names[a]), dag.index_of(names[b]))) out.add_edge(a, b);
    return out;
}

bool same_nodes(const NodeIndex& a, const NodeIndex& b) { return a.nodes() == b.nodes(); }

}  // namespace cml::graph
