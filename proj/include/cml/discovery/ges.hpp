#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cml/data/cohort.hpp"
#include "cml/discovery/config.hpp"
#include "cml/discovery/score.hpp"
#include "cml/graph/graph.hpp"

namespace cml::discovery {

struct GesResult {
    graph::Cpdag graph;
    double score = 0.0;
    /// Total score after each accepted step, starting with the empty graph.
    std::vector<double> forward_scores;
    std::vector<double> backward_scores;
};

/// Two-phase greedy equivalence search (forward inserts, then backward
/// deletes) with Chickering's Insert/Delete operators. Candidates are ranked
/// by score gain, ties broken by lexicographic (from, to, subset) names.
/// `targets` non-empty switches completion to interventional essential graphs.
GesResult greedy_equivalence_search(const std::vector<std::string>& nodes, const GaussianBicScore& score,
                                    const std::vector<graph::NodeSet>& targets = {});

/// GES over every column of a standardized, complete cohort.
GesResult ges(const data::Cohort& data, const DiscoveryConfig& cfg);

/// GIES: regimes[row] selects the intervention target set for that row
/// (0 = observational, k = cfg.intervention_targets[k - 1]). With no targets
/// this is exactly ges().
GesResult gies(const data::Cohort& data, const DiscoveryConfig& cfg, std::span<const std::size_t> regimes = {});

}  // namespace cml::discovery
