#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cml/graph/graph.hpp"

namespace oracle {

using Adj = std::vector<std::vector<bool>>;  // adj[a][b]: a -> b

std::vector<std::string> node_names(std::size_t n);

/// Random DAG over n nodes: each pair connected with probability p in a
/// random causal order.
cml::graph::Dag random_dag(std::size_t n, double p, std::mt19937_64& rng);

Adj adjacency(const cml::graph::Dag& g);
bool acyclic(const Adj& adj);
std::vector<bool> descendants_or_self(const Adj& adj, std::size_t v);

/// d-separation by enumerating every simple path of the skeleton.
bool d_separated_by_paths(const Adj& adj, std::size_t a, std::size_t b, const std::vector<std::size_t>& z);

/// Sorted (a, c, b) triples with a < b, a -> c <- b, a and b non-adjacent.
std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> v_structures(const Adj& adj);

/// Every DAG sharing skeleton and v-structures with `adj`.
std::vector<Adj> equivalence_class(const Adj& adj);

/// CPDAG by intersecting the orientations of the whole equivalence class.
cml::graph::Cpdag cpdag_by_enumeration(const cml::graph::Dag& g);

/// -(n/2) ln(RSS/n) - penalty (|P| + 1) ln(n) / 2 from a QR least-squares fit with intercept.
double gaussian_bic_local(const Eigen::MatrixXd& data, std::size_t v, const std::vector<std::size_t>& parents,
                          double penalty, const std::vector<bool>& skip_rows = {});

/// Every DAG on n nodes.
std::vector<cml::graph::Dag> all_dags(std::size_t n);

/// Two-sided normal tail by Simpson integration of the density.
double normal_two_sided_tail(double z);

/// Linear-Gaussian data from a DAG: each node = sum of 0.8 * parents + N(0, 1).
Eigen::MatrixXd linear_gaussian_data(const cml::graph::Dag& g, std::size_t n, std::uint64_t seed,
                                     double weight = 0.8);

}  // namespace oracle
