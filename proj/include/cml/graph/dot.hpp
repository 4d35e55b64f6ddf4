#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "cml/graph/graph.hpp"

namespace cml::graph {

using AnyGraph = std::variant<Dag, Cpdag>;

/// DOT subset. `digraph NAME { ... }` holds `A -> B;` statements and parses
/// to a Dag. `graph NAME { ... }` parses to a Cpdag and holds `A -- B;`
/// (undirected) as well as `A -> B;` (directed) statements. `A;` declares a
/// node. Once any node is declared, edges may only name declared nodes.
AnyGraph parse_graph(std::string_view text);
AnyGraph load_graph(const std::filesystem::path& path);

std::string serialize_graph(const Dag& g, std::string_view name = "g");
std::string serialize_graph(const Cpdag& g, std::string_view name = "g");
std::string serialize_graph(const AnyGraph& g, std::string_view name = "g");

/// Cpdag view of either graph kind.
Cpdag as_cpdag(const AnyGraph& g);

}  // namespace cml::graph
