#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cml/graph/graph.hpp"

namespace cml::discovery {

/// Decomposable Gaussian BIC. Local score of node v with parents P:
///   -(n_v / 2) ln(residual variance of v on P) - penalty * (|P| + 1) ln(n) / 2
/// where the residual variance is the maximum-likelihood (divisor n_v) one
/// from an intercept regression, and n_v counts the rows in which v was not
/// intervened on (all rows for observational data). Not thread-safe: local
/// scores are memoised.
class GaussianBicScore {
public:
    /// `data` is rows x nodes.
    GaussianBicScore(const Eigen::MatrixXd& data, double penalty);
    /// `intervened[v][row]` marks rows whose value of v was set by intervention.
    GaussianBicScore(const Eigen::MatrixXd& data, double penalty, std::vector<std::vector<bool>> intervened);

    std::size_t node_count() const { return static_cast<std::size_t>(data_cols_); }
    std::size_t sample_size() const { return n_; }

    double local(graph::NodeId v, const graph::NodeSet& parents) const;
    /// Sum of local scores over the DAG's parent sets.
    double total(const graph::Dag& dag) const;

private:
    const Eigen::MatrixXd& covariance_for(graph::NodeId v) const;

    Eigen::Index data_cols_ = 0;
    std::size_t n_ = 0;
    double penalty_ = 1.0;
    Eigen::MatrixXd cov_;
    std::vector<std::size_t> node_rows_;
    std::vector<int> cov_slot_;  // -1 = shared observational covariance
    std::vector<Eigen::MatrixXd> masked_cov_;
    mutable std::vector<std::unordered_map<std::uint64_t, double>> cache_;
};

}  // namespace cml::discovery
