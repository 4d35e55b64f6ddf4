#include "cml/discovery/ges.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cml/graph/algorithms.hpp"
#include "cml/util/error.hpp"

namespace cml::discovery {

using graph::Cpdag;
using graph::Dag;
using graph::NodeId;
using graph::NodeSet;

namespace {

constexpr std::size_t kMaxSubsetPool = 20;

struct Candidate {
    double delta = 0.0;
    bool insert = true;
    NodeId x = 0, y = 0;
    NodeSet subset;  // T for insert, H for delete
    std::vector<std::string> key;
};

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
    NodeSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

NodeSet subset_of(const NodeSet& pool, std::uint64_t mask) {
    NodeSet out;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (mask & (std::uint64_t{1} << i)) out.push_back(pool[i]);
    return out;
}

bool is_clique(const Cpdag& g, const NodeSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (!g.adjacent(s[i], s[j])) return false;
    return true;
}

/// True when every semi-directed path from `from` to `to` passes through `block`.
bool semi_directed_paths_blocked(const Cpdag& g, NodeId from, NodeId to, const NodeSet& block) {
    std::vector<bool> seen(g.size(), false);
    std::deque<NodeId> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId w = 0; w < g.size(); ++w) {
            if (seen[w] || !(g.has_directed(u, w) || g.has_undirected(u, w))) continue;
            if (w == to) return false;
            if (graph::contains(block, w)) continue;
            seen[w] = true;
            queue.push_back(w);
        }
    }
    return true;
}

std::vector<std::string> candidate_key(const Cpdag& g, NodeId x, NodeId y, const NodeSet& subset) {
    std::vector<std::string> names = g.names_of(subset);
    std::sort(names.begin(), names.end());
    names.insert(names.begin(), {g.name(x), g.name(y)});
    return names;
}

bool ranks_before(const Candidate& a, const Candidate& b) {
    const double tol = 1e-9 * std::max({1.0, std::abs(a.delta), std::abs(b.delta)});
    if (a.delta > b.delta + tol) return true;
    if (b.delta > a.delta + tol) return false;
    return a.key < b.key;
}

std::vector<Candidate> insert_candidates(const Cpdag& g, const GaussianBicScore& score) {
    std::vector<Candidate> out;
    const std::size_t p = g.size();
    for (NodeId y = 0; y < p; ++y) {
        const NodeSet pa = g.parents(y);
        const NodeSet ne = g.neighbors(y);
        for (NodeId x = 0; x < p; ++x) {
            if (x == y || g.adjacent(x, y)) continue;
            NodeSet na, pool;
            for (NodeId t : ne) (g.adjacent(t, x) ? na : pool).push_back(t);
            if (pool.size() > kMaxSubsetPool) throw DiscoveryError("neighbourhood too large for exhaustive GES");
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
                const NodeSet t = subset_of(pool, mask);
                const NodeSet s = set_union(na, t);
                if (!is_clique(g, s) || !semi_directed_paths_blocked(g, y, x, s)) continue;
                const NodeSet base = set_union(pa, s);
                const double delta = score.local(y, set_union(base, {x})) - score.local(y, base);
                out.push_back({delta, true, x, y, t, candidate_key(g, x, y, t)});
            }
        }
    }
    return out;
}

std::vector<Candidate> delete_candidates(const Cpdag& g, const GaussianBicScore& score) {
    std::vector<Candidate> out;
    const std::size_t p = g.size();
    for (NodeId y = 0; y < p; ++y) {
        const NodeSet pa = g.parents(y);
        const NodeSet ne = g.neighbors(y);
        for (NodeId x = 0; x < p; ++x) {
            if (x == y || !(g.has_directed(x, y) || g.has_undirected(x, y))) continue;
            NodeSet na;
            for (NodeId h : ne)
                if (h != x && g.adjacent(h, x)) na.push_back(h);
            if (na.size() > kMaxSubsetPool) throw DiscoveryError("neighbourhood too large for exhaustive GES");
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << na.size()); ++mask) {
                const NodeSet h = subset_of(na, mask);
                const NodeSet s = set_minus(na, h);
                if (!is_clique(g, s)) continue;
                const NodeSet with_x = set_union(set_union(pa, s), {x});
                const double delta = score.local(y, set_minus(with_x, {x})) - score.local(y, with_x);
                out.push_back({delta, false, x, y, h, candidate_key(g, x, y, h)});
            }
        }
    }
    return out;
}

Cpdag apply(Cpdag g, const Candidate& c) {
    if (c.insert) {
        g.add_directed(c.x, c.y);
        for (NodeId t : c.subset) g.orient(t, c.y);
    } else {
        g.remove_edge(c.x, c.y);
        for (NodeId h : c.subset) {
            if (g.has_undirected(c.y, h)) g.orient(c.y, h);
            if (g.has_undirected(c.x, h)) g.orient(c.x, h);
        }
    }
    return g;
}

Cpdag complete(const Dag& dag, const std::vector<NodeSet>& targets) {
    return targets.empty() ? graph::cpdag_of(dag) : graph::icpdag_of(dag, targets);
}

/// Runs one phase to exhaustion. Returns the per-step totals.
std::vector<double> run_phase(Cpdag& g, double& current, bool forward, const GaussianBicScore& score,
                              const std::vector<NodeSet>& targets) {
    std::vector<double> trace;
    while (true) {
        auto cands = forward ? insert_candidates(g, score) : delete_candidates(g, score);
        std::erase_if(cands, [](const Candidate& c) { return !(c.delta > 0.0); });
        std::sort(cands.begin(), cands.end(), ranks_before);
        bool applied = false;
        for (const auto& c : cands) {
            Dag dag;
            try {
                dag = graph::extend_to_dag(apply(g, c));
            } catch (const GraphError&) {
                continue;
            }
            const double total = score.total(dag);
            if (!(total > current)) continue;
            g = complete(dag, targets);
            current = total;
            trace.push_back(total);
            applied = true;
            break;
        }
        if (!applied) return trace;
    }
}

}  // namespace

GesResult greedy_equivalence_search(const std::vector<std::string>& nodes, const GaussianBicScore& score,
                                    const std::vector<NodeSet>& targets) {
    if (nodes.size() != score.node_count()) throw DiscoveryError("node names and score disagree on node count");
    GesResult result{Cpdag(nodes), 0.0, {}, {}};
    Cpdag g(nodes);
    double current = score.total(Dag(nodes));
    result.forward_scores.push_back(current);
    auto fwd = run_phase(g, current, true, score, targets);
    result.forward_scores.insert(result.forward_scores.end(), fwd.begin(), fwd.end());
    result.backward_scores.push_back(current);
    auto bwd = run_phase(g, current, false, score, targets);
    result.backward_scores.insert(result.backward_scores.end(), bwd.begin(), bwd.end());
    result.graph = std::move(g);
    result.score = current;
    return result;
}

GesResult ges(const data::Cohort& data, const DiscoveryConfig& cfg) {
    cfg.validate();
    const auto names = data.names();
    const GaussianBicScore score(data.matrix(names), cfg.bic_penalty);
    return greedy_equivalence_search(names, score);
}

GesResult gies(const data::Cohort& data, const DiscoveryConfig& cfg, std::span<const std::size_t> regimes) {
    cfg.validate();
    const auto names = data.names();
    std::vector<NodeSet> targets;
    for (const auto& set : cfg.intervention_targets) {
        std::vector<NodeId> ids;
        for (const auto& name : set) {
            auto id = data.find(name);
            if (!id) throw DiscoveryError("intervention target names unknown node: " + name);
            ids.push_back(*id);
        }
        targets.push_back(graph::make_node_set(std::move(ids)));
    }
    if (!regimes.empty() && regimes.size() != data.rows())
        throw DiscoveryError("regime vector length must match row count");
    const bool interventional =
        !targets.empty() && std::any_of(regimes.begin(), regimes.end(), [](std::size_t r) { return r != 0; });
    if (!interventional) return ges(data, cfg);

    std::vector<std::vector<bool>> intervened(names.size());
    for (std::size_t row = 0; row < regimes.size(); ++row) {
        const std::size_t r = regimes[row];
        if (r == 0) continue;
        if (r > targets.size()) throw DiscoveryError("regime index exceeds the number of intervention targets");
        for (NodeId v : targets[r - 1]) {
            if (intervened[v].empty()) intervened[v].assign(data.rows(), false);
            intervened[v][row] = true;
        }
    }
    const GaussianBicScore score(data.matrix(names), cfg.bic_penalty, std::move(intervened));
    return greedy_equivalence_search(names, score, targets);
}

}  // namespace cml::discovery
