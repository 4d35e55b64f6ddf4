#pragma once

#include <vector>

#include "cml/graph/graph.hpp"

namespace cml::graph {

struct BackdoorResult {
    NodeSet adjustment;
    /// Backdoor criterion checked by d-separation of treatment and outcome
    /// given `adjustment` once the treatment's outgoing edges are removed.
    bool verified = false;
    /// Backdoor paths left open (empty when verified).
    std::vector<std::vector<NodeId>> open_paths;
};

/// Canonical adjustment set: parents of the treatment.
BackdoorResult backdoor_set(const Dag& g, NodeId treatment, NodeId outcome);

/// Nodes on at least one directed path treatment -> ... -> outcome,
/// endpoints excluded.
NodeSet mediators(const Dag& g, NodeId treatment, NodeId outcome);

}  // namespace cml::graph
