#include "cml/estimation/boosting.hpp"

#include <algorithm>
#include <numeric>

#include "cml/util/error.hpp"

namespace cml::estimation {

void TreeParams::validate() const {
    if (max_depth < 1) throw EstimationError("max_depth must be at least 1");
    if (min_child_samples < 1) throw EstimationError("min_child_samples must be at least 1");
    if (n_trees < 1) throw EstimationError("n_trees must be at least 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw EstimationError("learning_rate must lie in (0, 1]");
}

double RegressionTree::predict(const Row& row) const {
    if (nodes_.empty()) return 0.0;
    std::size_t k = 0;
    while (!nodes_[k].is_leaf()) {
        const TreeNode& n = nodes_[k];
        k = static_cast<std::size_t>(row(n.feature) <= n.threshold ? n.left : n.right);
    }
    return nodes_[k].value;
}

std::size_t RegressionTree::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.depth);
    return d;
}

namespace {

struct NodeStats {
    std::size_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
};

struct Split {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

/// Rows sorted by each feature, with the matching values laid out contiguously.
struct Presorted {
    std::vector<std::vector<std::size_t>> order;
    std::vector<std::vector<double>> values;
    /// inv[k] = 1 / k
    std::vector<double> inv;
};

/// One tree on the current residuals; `leaf_of` receives each row's leaf.
std::vector<TreeNode> grow_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& resid, const Presorted& pre,
                                const TreeParams& params, std::vector<int>& leaf_of) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto m = params.min_child_samples;
    std::vector<TreeNode> nodes(1);
    std::vector<NodeStats> stats(1);
    for (std::size_t r = 0; r < n; ++r) {
        stats[0].count++;
        stats[0].sum += resid(static_cast<Eigen::Index>(r));
        stats[0].sumsq += resid(static_cast<Eigen::Index>(r)) * resid(static_cast<Eigen::Index>(r));
    }
    nodes[0].samples = n;
    std::vector<int> node_of(n, 0);
    std::vector<int> active{0};

    for (std::size_t depth = 0; depth < params.max_depth && !active.empty(); ++depth) {
        std::vector<int> slot(nodes.size(), -1);
        for (std::size_t i = 0; i < active.size(); ++i) slot[static_cast<std::size_t>(active[i])] = static_cast<int>(i);
        std::vector<Split> best(active.size());

        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            const auto& order = pre.order[static_cast<std::size_t>(f)];
            const auto& values = pre.values[static_cast<std::size_t>(f)];
            std::vector<NodeStats> acc(active.size());
            std::vector<double> last(active.size(), 0.0);
            std::vector<double> parent_term(active.size());
            for (std::size_t i = 0; i < active.size(); ++i) {
                const NodeStats& tot = stats[static_cast<std::size_t>(active[i])];
                parent_term[i] = tot.sum * tot.sum * pre.inv[tot.count];
            }
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = order[i];
                const int s = slot[static_cast<std::size_t>(node_of[r])];
                if (s < 0) continue;
                const auto si = static_cast<std::size_t>(s);
                const double v = values[i];
                NodeStats& a = acc[si];
                if (a.count >= m && v > last[si]) {
                    const NodeStats& tot = stats[static_cast<std::size_t>(active[si])];
                    const std::size_t right = tot.count - a.count;
                    if (right >= m) {
                        const double sl = a.sum, sr = tot.sum - a.sum;
                        const double gain = sl * sl * pre.inv[a.count] + sr * sr * pre.inv[right] - parent_term[si];
                        if (gain > best[si].gain) {
                            double thr = 0.5 * (last[si] + v);
                            if (!(thr < v)) thr = last[si];
                            best[si] = {gain, static_cast<int>(f), thr};
                        }
                    }
                }
                const double rv = resid(static_cast<Eigen::Index>(r));
                a.count++;
                a.sum += rv;
                a.sumsq += rv * rv;
                last[si] = v;
            }
        }

        std::vector<int> next;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const auto k = static_cast<std::size_t>(active[i]);
            const NodeStats& tot = stats[k];
            const double sse = std::max(0.0, tot.sumsq - tot.sum * tot.sum / static_cast<double>(tot.count));
            if (best[i].feature < 0 || !(best[i].gain > 1e-10 * sse)) continue;
            nodes[k].feature = best[i].feature;
            nodes[k].threshold = best[i].threshold;
            for (int side = 0; side < 2; ++side) {
                TreeNode child;
                child.depth = depth + 1;
                nodes.push_back(child);
                stats.emplace_back();
                (side == 0 ? nodes[k].left : nodes[k].right) = static_cast<int>(nodes.size() - 1);
                next.push_back(static_cast<int>(nodes.size() - 1));
            }
        }
        if (next.empty()) break;
        for (std::size_t r = 0; r < n; ++r) {
            const TreeNode& parent = nodes[static_cast<std::size_t>(node_of[r])];
            if (parent.is_leaf() || slot[static_cast<std::size_t>(node_of[r])] < 0) continue;
            const int child = x(static_cast<Eigen::Index>(r), parent.feature) <= parent.threshold ? parent.left : parent.right;
            node_of[r] = child;
            NodeStats& cs = stats[static_cast<std::size_t>(child)];
            const double rv = resid(static_cast<Eigen::Index>(r));
            cs.count++;
            cs.sum += rv;
            cs.sumsq += rv * rv;
        }
        active = std::move(next);
    }

    if (nodes[0].is_leaf()) return {};
    leaf_of = node_of;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        nodes[k].samples = stats[k].count;
        if (nodes[k].is_leaf()) nodes[k].value = stats[k].sum / static_cast<double>(stats[k].count);
    }
    return nodes;
}

}  // namespace

BoostedTreeModel fit_boosted_trees(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                   const TreeParams& params, std::uint64_t /*seed*/) {
    params.validate();
    if (features.rows() == 0 || targets.size() == 0) throw EstimationError("empty training data");
    if (features.rows() != targets.size()) throw EstimationError("feature and target row counts differ");
    if (!features.allFinite() || !targets.allFinite()) throw EstimationError("training data has missing cells");

    const auto n = static_cast<std::size_t>(features.rows());
    BoostedTreeModel model;
    model.params = params;
    model.n_features = static_cast<std::size_t>(features.cols());
    model.base_value = targets.mean();

    Presorted pre;
    pre.order.assign(model.n_features, std::vector<std::size_t>(n));
    pre.values.assign(model.n_features, std::vector<double>(n));
    for (std::size_t f = 0; f < model.n_features; ++f) {
        auto& o = pre.order[f];
        std::iota(o.begin(), o.end(), std::size_t{0});
        const auto col = features.col(static_cast<Eigen::Index>(f));
        std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) {
            return col(static_cast<Eigen::Index>(a)) < col(static_cast<Eigen::Index>(b));
        });
        for (std::size_t i = 0; i < n; ++i) pre.values[f][i] = col(static_cast<Eigen::Index>(o[i]));
    }
    pre.inv.assign(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) pre.inv[k] = 1.0 / static_cast<double>(k);

    Eigen::VectorXd pred = Eigen::VectorXd::Constant(features.rows(), model.base_value);
    Eigen::VectorXd resid(features.rows());
    std::vector<int> leaf_of;
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        resid = targets - pred;
        auto nodes = grow_tree(features, resid, pre, params, leaf_of);
        if (nodes.empty()) break;
        for (std::size_t r = 0; r < n; ++r)
            pred(static_cast<Eigen::Index>(r)) += params.learning_rate * nodes[static_cast<std::size_t>(leaf_of[r])].value;
        model.trees.emplace_back(std::move(nodes));
    }
    return model;
}

Eigen::VectorXd predict(const BoostedTreeModel& model, const Eigen::MatrixXd& features) {
    if (static_cast<std::size_t>(features.cols()) != model.n_features)
        throw EstimationError("feature count does not match the fitted model");
    Eigen::VectorXd out(features.rows());
    for (Eigen::Index r = 0; r < features.rows(); ++r) {
        double sum = 0.0;
        for (const auto& tree : model.trees) sum += tree.predict(features.row(r));
        out(r) = model.base_value + model.params.learning_rate * sum;
    }
    return out;
}

}  // namespace cml::estimation
