#include "cml/graph/edits.hpp"

#include <regex>
#include <sstream>
#include <vector>

#include "cml/util/error.hpp"

namespace cml::graph {

namespace {

std::string strip_comment(std::string line) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    return line;
}

NodeId lookup(const NodeIndex& g, const std::string& name, int line) {
    if (auto v = g.find(name)) return *v;
    throw EditError("unknown node '" + name + "'", line);
}

int command_line(const EditCommand& cmd, std::size_t position) {
    return cmd.line > 0 ? cmd.line : static_cast<int>(position + 1);
}

bool directed_path(const Cpdag& g, NodeId from, NodeId to) {
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::vector<NodeId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (NodeId c : g.children(v))
            if (!seen[c]) {
                seen[c] = 1;
                stack.push_back(c);
            }
    }
    return false;
}

}  // namespace

EditScript parse_edit_script(std::string_view text) {
    static const std::regex add_re(R"(^\s*add\s+([A-Za-z_]\w*)\s*->\s*([A-Za-z_]\w*)\s*$)");
    static const std::regex remove_re(R"(^\s*remove\s+([A-Za-z_]\w*)\s*->\s*([A-Za-z_]\w*)\s*$)");
    static const std::regex orient_re(
        R"(^\s*orient\s+([A-Za-z_]\w*)\s*-\s*([A-Za-z_]\w*)\s+as\s+([A-Za-z_]\w*)\s*->\s*([A-Za-z_]\w*)\s*$)");
    static const std::regex blank_re(R"(^\s*$)");

    EditScript script;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_comment(raw);
        std::smatch m;
        if (std::regex_match(line, blank_re)) continue;
        if (std::regex_match(line, m, add_re)) {
            script.push_back({EditCommand::Kind::AddEdge, m[1], m[2], line_no});
        } else if (std::regex_match(line, m, remove_re)) {
            script.push_back({EditCommand::Kind::RemoveEdge, m[1], m[2], line_no});
        } else if (std::regex_match(line, m, orient_re)) {
            const std::string a = m[1], b = m[2], from = m[3], to = m[4];
            const bool same_pair = (from == a && to == b) || (from == b && to == a);
            if (!same_pair) throw EditError("orient target must be the pair " + a + " - " + b, line_no);
            script.push_back({EditCommand::Kind::Orient, from, to, line_no});
        } else {
            throw EditError("cannot parse edit command '" + raw + "'", line_no);
        }
    }
    return script;
}

std::string format_edit_script(const EditScript& script) {
    std::ostringstream out;
    for (const auto& cmd : script) {
        switch (cmd.kind) {
            case EditCommand::Kind::AddEdge: out << "add " << cmd.from << " -> " << cmd.to << '\n'; break;
            case EditCommand::Kind::RemoveEdge: out << "remove " << cmd.from << " -> " << cmd.to << '\n'; break;
            case EditCommand::Kind::Orient:
                out << "orient " << cmd.from << " - " << cmd.to << " as " << cmd.from << " -> " << cmd.to << '\n';
                break;
        }
    }
    return out.str();
}

Dag apply_edits(Dag g, const EditScript& script) {
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto& cmd = script[i];
        const int line = command_line(cmd, i);
        const NodeId a = lookup(g, cmd.from, line);
        const NodeId b = lookup(g, cmd.to, line);
        switch (cmd.kind) {
            case EditCommand::Kind::AddEdge:
                if (g.adjacent(a, b)) throw EditError(cmd.from + " and " + cmd.to + " are already adjacent", line);
                if (a == b || g.reachable(b, a))
                    throw EditError("adding " + cmd.from + " -> " + cmd.to + " introduces a cycle", line);
                g.add_edge(a, b);
                break;
            case EditCommand::Kind::RemoveEdge:
                if (!g.has_edge(a, b)) throw EditError("cannot remove absent edge " + cmd.from + " -> " + cmd.to, line);
                g.remove_edge(a, b);
                break;
            case EditCommand::Kind::Orient:
                throw EditError("no undirected edge " + cmd.from + " - " + cmd.to + " to orient", line);
        }
    }
    return g;
}

Cpdag apply_edits(Cpdag g, const EditScript& script) {
    for (std::size_t i = 0; i < script.size(); ++i) {
        const auto& cmd = script[i];
        const int line = command_line(cmd, i);
        const NodeId a = lookup(g, cmd.from, line);
        const NodeId b = lookup(g, cmd.to, line);
        if (a == b) throw EditError("self-loop on '" + cmd.from + "'", line);
        switch (cmd.kind) {
            case EditCommand::Kind::AddEdge:
                if (g.adjacent(a, b)) throw EditError(cmd.from + " and " + cmd.to + " are already adjacent", line);
                if (directed_path(g, b, a))
                    throw EditError("command " + cmd.from + " -> " + cmd.to + " introduces a cycle", line);
                g.add_directed(a, b);
                break;
            case EditCommand::Kind::RemoveEdge:
                if (!g.has_directed(a, b) && !g.has_undirected(a, b))
                    throw EditError("cannot remove absent edge " + cmd.from + " -> " + cmd.to, line);
                g.remove_edge(a, b);
                break;
            case EditCommand::Kind::Orient:
                if (!g.has_undirected(a, b))
                    throw EditError("no undirected edge " + cmd.from + " - " + cmd.to + " to orient", line);
                if (directed_path(g, b, a))
                    throw EditError("command " + cmd.from + " -> " + cmd.to + " introduces a cycle", line);
                g.orient(a, b);
                break;
        }
    }
    return g;
}

EditScript edits_toward(const Cpdag& from, const Dag& target) {
    if (!same_nodes(from, target)) throw GraphError("edit target must have the same nodes in the same order");
    using K = EditCommand::Kind;
    EditScript removes, orients, adds;
    const std::size_t n = from.size();
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = 0; b < n; ++b) {
            if (a == b) continue;
            if (from.has_directed(a, b) && !target.has_edge(a, b))
                removes.push_back({K::RemoveEdge, from.name(a), from.name(b)});
            if (a < b && from.has_undirected(a, b)) {
                if (target.has_edge(a, b))
                    orients.push_back({K::Orient, from.name(a), from.name(b)});
                else if (target.has_edge(b, a))
                    orients.push_back({K::Orient, from.name(b), from.name(a)});
                else
                    removes.push_back({K::RemoveEdge, from.name(a), from.name(b)});
            }
            if (target.has_edge(a, b) && !from.has_directed(a, b) && !from.has_undirected(a, b))
                adds.push_back({K::AddEdge, from.name(a), from.name(b)});
        }
    }
    EditScript script = std::move(removes);
    script.insert(script.end(), orients.begin(), orients.end());
    script.insert(script.end(), adds.begin(), adds.end());
    return script;
}

}  // namespace cml::graph
