#include "cml/discovery/pc.hpp"

#include <algorithm>

#include "cml/graph/algorithms.hpp"
#include "cml/util/error.hpp"

namespace cml::discovery {

using graph::NodeId;
using graph::NodeSet;

namespace {

/// Calls fn(subset) for each size-k subset of `pool` in lexicographic order
/// until fn returns true. Returns whether fn ever did.
template <class Fn>
bool for_each_subset(const NodeSet& pool, std::size_t k, Fn&& fn) {
    if (k > pool.size()) return false;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    NodeSet subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = pool[pick[i]];
        if (fn(subset)) return true;
        // advance
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == pool.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
}

}  // namespace

PcResult pc(const std::vector<std::string>& nodes, const CiTest& test, const DiscoveryConfig& cfg) {
    cfg.validate();
    const std::size_t n = nodes.size();
    std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 1));
    for (std::size_t v = 0; v < n; ++v) adj[v][v] = 0;

    PcResult result{graph::Cpdag(nodes), {}, 0};
    for (std::size_t level = 0; level <= cfg.max_cond_size; ++level) {
        std::vector<NodeSet> frozen(n);
        for (NodeId v = 0; v < n; ++v)
            for (NodeId u = 0; u < n; ++u)
                if (adj[v][u]) frozen[v].push_back(u);
        const bool any_testable = std::any_of(frozen.begin(), frozen.end(),
                                              [&](const NodeSet& a) { return a.size() >= level + 1; });
        if (!any_testable) break;

        std::vector<std::pair<std::pair<NodeId, NodeId>, NodeSet>> removals;
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j) {
                if (!adj[i][j]) continue;
                NodeSet sepset;
                bool separated = false;
                for (const auto& [x, y] : {std::pair{i, j}, std::pair{j, i}}) {
                    NodeSet pool;
                    for (NodeId u : frozen[x])
                        if (u != y) pool.push_back(u);
                    separated = for_each_subset(pool, level, [&](const NodeSet& s) {
                        ++result.tests_run;
                        if (test.test(i, j, s).p_value > cfg.alpha) {
                            sepset = s;
                            return true;
                        }
                        return false;
                    });
                    if (separated) break;
                }
                if (separated) removals.push_back({{i, j}, sepset});
            }
        }
        for (auto& [pair, sepset] : removals) {
            adj[pair.first][pair.second] = adj[pair.second][pair.first] = 0;
            result.sepsets[pair] = std::move(sepset);
        }
    }

    graph::Cpdag& g = result.graph;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (adj[i][j]) g.add_undirected(i, j);

    // v-structures: a - c - b, a and b non-adjacent, c outside sepset(a, b)
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            if (adj[a][b]) continue;
            const NodeSet& sep = result.sepsets.at({a, b});
            for (NodeId c = 0; c < n; ++c) {
                if (!adj[a][c] || !adj[b][c] || graph::contains(sep, c)) continue;
                if (g.has_undirected(a, c)) g.orient(a, c);
                if (g.has_undirected(b, c)) g.orient(b, c);
            }
        }
    }
    g = graph::meek_orient(std::move(g));
    return result;
}

PcResult pc(const data::Cohort& data, const DiscoveryConfig& cfg) {
    const FisherZTest test(data);
    return pc(data.names(), test, cfg);
}

}  // namespace cml::discovery
