#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cml/data/cohort.hpp"
#include "cml/discovery/config.hpp"
#include "cml/discovery/fisher_z.hpp"
#include "cml/graph/graph.hpp"

namespace cml::discovery {

struct PcResult {
    graph::Cpdag graph;
    /// Separating set for every removed pair (i < j).
    std::map<std::pair<graph::NodeId, graph::NodeId>, graph::NodeSet> sepsets;
    std::size_t tests_run = 0;
};

/// Stable PC: removals within a conditioning-size level are decided against
/// the adjacencies frozen at the start of the level and applied together.
/// An edge is removed when some test has p > alpha. Then v-structures from
/// the separating sets and Meek closure.
PcResult pc(const std::vector<std::string>& nodes, const CiTest& test, const DiscoveryConfig& cfg);

/// Fisher-z PC over every column of a standardized, complete cohort.
PcResult pc(const data::Cohort& data, const DiscoveryConfig& cfg);

}  // namespace cml::discovery
