#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cml/graph/graph.hpp"

namespace cml::graph {

struct EditCommand {
    enum class Kind { AddEdge, RemoveEdge, Orient };

    Kind kind = Kind::AddEdge;
    std::string from;
    std::string to;
    /// Source line in the script file; 0 for programmatically built commands.
    int line = 0;

    bool operator==(const EditCommand& o) const { return kind == o.kind && from == o.from && to == o.to; }
};

using EditScript = std::vector<EditCommand>;

/// Line-based format, one command per line, '#' starts a comment:
///   add A -> B
///   remove A -> B
///   orient A - B as A -> B
EditScript parse_edit_script(std::string_view text);
std::string format_edit_script(const EditScript& script);

/// Commands are applied in order and the first failing one aborts with an
/// EditError carrying its line. Orient needs an undirected edge, so it always
/// fails on a Dag. Adds and orientations are rejected when they close a
/// directed path; cycles already present in the input are left alone.
Dag apply_edits(Dag g, const EditScript& script);
Cpdag apply_edits(Cpdag g, const EditScript& script);

/// Script that turns `from` into the fully directed `target` (same node set):
/// removals first, then orientations, then additions.
EditScript edits_toward(const Cpdag& from, const Dag& target);

}  // namespace cml::graph
