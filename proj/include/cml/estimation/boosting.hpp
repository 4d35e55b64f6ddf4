#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cml::estimation {

struct TreeParams {
    std::size_t max_depth = 2;
    std::size_t min_child_samples = 60;
    std::size_t n_trees = 100;
    double learning_rate = 0.1;

    void validate() const;
};

struct TreeNode {
    /// -1 marks a leaf.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    /// Mean residual for leaves.
    double value = 0.0;
    std::size_t samples = 0;
    std::size_t depth = 0;

    bool is_leaf() const { return feature < 0; }
};

/// Axis-aligned regression tree; rows with x[feature] <= threshold go left.
class RegressionTree {
public:
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    using Row = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;
    double predict(const Row& row) const;
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const;

private:
    std::vector<TreeNode> nodes_;
};

struct BoostedTreeModel {
    double base_value = 0.0;
    std::vector<RegressionTree> trees;
    TreeParams params;
    std::size_t n_features = 0;
};

/// Squared-error gradient boosting. Each tree is grown level by level with
/// greedy variance-reduction splits at midpoints between distinct values;
/// a split needs min_child_samples rows per side. Boosting stops early once
/// a tree finds no admissible split. Fitting has no random step, so `seed`
/// only exists to be recorded alongside the model.
BoostedTreeModel fit_boosted_trees(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                   const TreeParams& params, std::uint64_t seed = 0);

Eigen::VectorXd predict(const BoostedTreeModel& model, const Eigen::MatrixXd& features);

}  // namespace cml::estimation
