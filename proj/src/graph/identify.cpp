#include "cml/graph/identify.hpp"

#include <algorithm>
#include <iterator>

#include "cml/graph/algorithms.hpp"
#include "cml/util/error.hpp"

namespace cml::graph {

BackdoorResult backdoor_set(const Dag& g, NodeId treatment, NodeId outcome) {
    if (treatment >= g.size() || outcome >= g.size()) throw GraphError("node index out of range");
    if (treatment == outcome) throw GraphError("treatment and outcome must differ");

    BackdoorResult result;
    result.adjustment = g.parents(treatment);
    if (contains(result.adjustment, outcome)) {
        // outcome causes treatment; no adjustment can separate them
        result.verified = false;
        result.open_paths.push_back({treatment, outcome});
        return result;
    }
    Dag cut = g;
    for (NodeId c : g.children(treatment)) cut.remove_edge(treatment, c);
    result.verified = d_separated(cut, treatment, outcome, result.adjustment);
    if (!result.verified) result.open_paths = open_paths(cut, treatment, outcome, result.adjustment);
    return result;
}

NodeSet mediators(const Dag& g, NodeId treatment, NodeId outcome) {
    if (treatment >= g.size() || outcome >= g.size()) throw GraphError("node index out of range");
    if (treatment == outcome) throw GraphError("treatment and outcome must differ");
    const NodeSet desc = g.descendants(treatment);
    const NodeSet anc = g.ancestors(outcome);
    NodeSet out;
    std::set_intersection(desc.begin(), desc.end(), anc.begin(), anc.end(), std::back_inserter(out));
    std::erase(out, treatment);
    std::erase(out, outcome);
    return out;
}

}  // namespace cml::graph
