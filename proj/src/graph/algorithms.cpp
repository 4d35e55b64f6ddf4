#include "cml/graph/algorithms.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "cml/util/error.hpp"

namespace cml::graph {

bool d_separated(const Dag& g, NodeId a, NodeId b, const NodeSet& z) {
    const std::size_t n = g.size();
    if (a >= n || b >= n) throw GraphError("node index out of range");
    if (a == b) throw GraphError("d-separation needs two distinct nodes");
    if (contains(z, a) || contains(z, b)) throw GraphError("endpoints must not be in the conditioning set");

    // Nodes in z or with a descendant in z; a collider there is open.
    std::vector<std::uint8_t> in_z(n, 0), anc_z(n, 0);
    std::deque<NodeId> queue;
    for (NodeId v : z) {
        in_z[v] = 1;
        anc_z[v] = 1;
        queue.push_back(v);
    }
    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        for (NodeId p : g.parents(v))
            if (!anc_z[p]) {
                anc_z[p] = 1;
                queue.push_back(p);
            }
    }

    // Reachability over (node, arrived-from-child?) states.
    enum : int { kFromChild = 0, kFromParent = 1 };
    std::vector<std::uint8_t> visited(2 * n, 0);
    std::deque<std::pair<NodeId, int>> frontier{{a, kFromChild}};
    while (!frontier.empty()) {
        const auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[2 * v + dir]) continue;
        visited[2 * v + dir] = 1;
        if (v == b) return false;
        if (dir == kFromChild) {
            if (in_z[v]) continue;
            for (NodeId p : g.parents(v)) frontier.emplace_back(p, kFromChild);
            for (NodeId c : g.children(v)) frontier.emplace_back(c, kFromParent);
        } else {
            if (!in_z[v])
                for (NodeId c : g.children(v)) frontier.emplace_back(c, kFromParent);
            if (anc_z[v])
                for (NodeId p : g.parents(v)) frontier.emplace_back(p, kFromChild);
        }
    }
    return true;
}

bool d_separated(const Dag& g, const std::string& a, const std::string& b, const std::vector<std::string>& z) {
    return d_separated(g, g.index_of(a), g.index_of(b), g.indices_of(z));
}

std::vector<std::vector<NodeId>> open_paths(const Dag& g, NodeId a, NodeId b, const NodeSet& z,
                                            std::size_t limit) {
    std::vector<std::vector<NodeId>> found;
    std::vector<NodeId> path{a};
    std::vector<std::uint8_t> on_path(g.size(), 0);
    on_path[a] = 1;

    auto open_at = [&](NodeId prev, NodeId mid, NodeId next) {
        const bool collider = g.has_edge(prev, mid) && g.has_edge(next, mid);
        if (!collider) return !contains(z, mid);
        if (contains(z, mid)) return true;
        for (NodeId d : g.descendants(mid))
            if (contains(z, d)) return true;
        return false;
    };

    auto dfs = [&](auto&& self, NodeId v) -> void {
        if (found.size() >= limit) return;
        for (NodeId u = 0; u < g.size(); ++u) {
            if (on_path[u] || !g.adjacent(v, u)) continue;
            if (path.size() >= 2 && !open_at(path[path.size() - 2], v, u)) continue;
            path.push_back(u);
            if (u == b) {
                found.push_back(path);
            } else {
                on_path[u] = 1;
                self(self, u);
                on_path[u] = 0;
            }
            path.pop_back();
        }
    };
    dfs(dfs, a);
    return found;
}

std::vector<VStructure> v_structures(const Dag& g) {
    std::vector<VStructure> out;
    for (NodeId c = 0; c < g.size(); ++c) {
        const auto pa = g.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.emplace_back(pa[i], c, pa[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VStructure> v_structures(const Cpdag& g) {
    std::vector<VStructure> out;
    for (NodeId c = 0; c < g.size(); ++c) {
        const auto pa = g.parents(c);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.emplace_back(pa[i], c, pa[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Rule 1: a -> b - c, a and c non-adjacent  =>  b -> c
bool rule1(const Cpdag& g, NodeId b, NodeId c) {
    for (NodeId a : g.parents(b))
        if (a != c && !g.adjacent(a, c)) return true;
    return false;
}

// Rule 2: a -> k -> b with a - b  =>  a -> b
bool rule2(const Cpdag& g, NodeId a, NodeId b) {
    for (NodeId k : g.children(a))
        if (g.has_directed(k, b)) return true;
    return false;
}

// Rule 3: a - c -> b, a - d -> b, c and d non-adjacent, a - b  =>  a -> b
bool rule3(const Cpdag& g, NodeId a, NodeId b) {
    NodeSet cands;
    for (NodeId k : g.neighbors(a))
        if (k != b && g.has_directed(k, b)) cands.push_back(k);
    for (std::size_t i = 0; i < cands.size(); ++i)
        for (std::size_t j = i + 1; j < cands.size(); ++j)
            if (!g.adjacent(cands[i], cands[j])) return true;
    return false;
}

// Rule 4: a - k -> l -> b, k and b non-adjacent, a adjacent to l, a - b  =>  a -> b
bool rule4(const Cpdag& g, NodeId a, NodeId b) {
    for (NodeId k : g.neighbors(a)) {
        if (k == b || g.adjacent(k, b)) continue;
        for (NodeId l : g.children(k))
            if (l != a && g.has_directed(l, b) && g.adjacent(a, l)) return true;
    }
    return false;
}

}  // namespace

Cpdag meek_orient(Cpdag g) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [u, v] : g.undirected_edges()) {
            for (const auto& [a, b] : {Edge{u, v}, Edge{v, u}}) {
                if (!g.has_undirected(a, b)) continue;
                if (rule1(g, a, b) || rule2(g, a, b) || rule3(g, a, b) || rule4(g, a, b)) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
    }
    return g;
}

Cpdag cpdag_of(const Dag& dag) { return icpdag_of(dag, {}); }

Cpdag icpdag_of(const Dag& dag, const std::vector<NodeSet>& targets) {
    Cpdag g = Cpdag::skeleton_of(dag);
    for (const auto& [a, c, b] : v_structures(dag)) {
        if (g.has_undirected(a, c)) g.orient(a, c);
        if (g.has_undirected(b, c)) g.orient(b, c);
    }
    for (const auto& [from, to] : dag.edges()) {
        if (!g.has_undirected(from, to)) continue;
        const bool split = std::any_of(targets.begin(), targets.end(), [&](const NodeSet& t) {
            return contains(t, from) != contains(t, to);
        });
        if (split) g.orient(from, to);
    }
    return meek_orient(std::move(g));
}

Dag extend_to_dag(const Cpdag& input) {
    const std::size_t n = input.size();
    Cpdag work = input;
    Dag out(input.nodes());
    for (const auto& [a, b] : input.directed_edges()) {
        try {
            out.add_edge(a, b);
        } catch (const GraphError&) {
            throw GraphError("graph is not extendable: directed part has a cycle");
        }
    }

    std::vector<NodeId> by_name(n);
    std::iota(by_name.begin(), by_name.end(), 0);
    std::sort(by_name.begin(), by_name.end(),
              [&](NodeId x, NodeId y) { return input.name(x) < input.name(y); });

    std::vector<std::uint8_t> removed(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
        bool picked = false;
        for (NodeId x : by_name) {
            if (removed[x]) continue;
            bool sink = true;
            for (NodeId c = 0; c < n && sink; ++c)
                if (!removed[c] && work.has_directed(x, c)) sink = false;
            if (!sink) continue;
            // every undirected neighbour must be adjacent to all other adjacents of x
            NodeSet adj;
            for (NodeId u = 0; u < n; ++u)
                if (!removed[u] && u != x && work.adjacent(x, u)) adj.push_back(u);
            bool ok = true;
            for (NodeId y : adj) {
                if (!work.has_undirected(x, y)) continue;
                for (NodeId w : adj)
                    if (w != y && !work.adjacent(y, w)) {
                        ok = false;
                        break;
                    }
                if (!ok) break;
            }
            if (!ok) continue;
            for (NodeId y : adj)
                if (work.has_undirected(x, y)) out.add_edge(y, x);
            removed[x] = 1;
            picked = true;
            break;
        }
        if (!picked) throw GraphError("graph is not extendable to a DAG without new v-structures or cycles");
    }
    return out;
}

bool same_skeleton(const Cpdag& a, const Cpdag& b) {
    if (a.nodes() != b.nodes()) return false;
    for (NodeId i = 0; i < a.size(); ++i)
        for (NodeId j = i + 1; j < a.size(); ++j)
            if (a.adjacent(i, j) != b.adjacent(i, j)) return false;
    return true;
}

}  // namespace cml::graph
