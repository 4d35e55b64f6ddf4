#include "cml/discovery/score.hpp"

#include <cmath>

#include "cml/util/error.hpp"

namespace cml::discovery {

using graph::NodeId;
using graph::NodeSet;

namespace {

Eigen::MatrixXd ml_covariance(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows());
    return (cov + cov.transpose()) * 0.5;
}

}  // namespace

GaussianBicScore::GaussianBicScore(const Eigen::MatrixXd& data, double penalty)
    : GaussianBicScore(data, penalty, {}) {}

GaussianBicScore::GaussianBicScore(const Eigen::MatrixXd& data, double penalty,
                                   std::vector<std::vector<bool>> intervened)
    : data_cols_(data.cols()), n_(static_cast<std::size_t>(data.rows())), penalty_(penalty) {
    if (data.rows() < 2) throw DiscoveryError("BIC score needs at least two rows");
    if (data.cols() > 64) throw DiscoveryError("BIC score supports at most 64 variables");
    if (!(penalty > 0.0)) throw DiscoveryError("bic_penalty must be positive");
    if (!data.allFinite()) throw DiscoveryError("BIC score data must be finite");
    const auto p = static_cast<std::size_t>(data.cols());
    if (!intervened.empty() && intervened.size() != p)
        throw DiscoveryError("intervention mask must have one entry per node");

    cov_ = ml_covariance(data);
    node_rows_.assign(p, n_);
    cov_slot_.assign(p, -1);
    cache_.assign(p, {});

    std::vector<std::vector<bool>> slot_masks;
    for (std::size_t v = 0; v < intervened.size(); ++v) {
        const auto& mask = intervened[v];
        if (mask.empty()) continue;
        if (mask.size() != n_) throw DiscoveryError("intervention mask length must match row count");
        std::size_t kept = 0;
        for (bool b : mask) kept += b ? 0 : 1;
        if (kept == n_) continue;
        if (kept < 2) throw DiscoveryError("a node is intervened on in almost every row");
        node_rows_[v] = kept;
        int slot = -1;
        for (std::size_t s = 0; s < slot_masks.size(); ++s)
            if (slot_masks[s] == mask) slot = static_cast<int>(s);
        if (slot < 0) {
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(kept), data.cols());
            Eigen::Index r = 0;
            for (std::size_t row = 0; row < n_; ++row)
                if (!mask[row]) sub.row(r++) = data.row(static_cast<Eigen::Index>(row));
            slot_masks.push_back(mask);
            masked_cov_.push_back(ml_covariance(sub));
            slot = static_cast<int>(masked_cov_.size() - 1);
        }
        cov_slot_[v] = slot;
    }
}

const Eigen::MatrixXd& GaussianBicScore::covariance_for(NodeId v) const {
    return cov_slot_[v] < 0 ? cov_ : masked_cov_[static_cast<std::size_t>(cov_slot_[v])];
}

double GaussianBicScore::local(NodeId v, const NodeSet& parents) const {
    const auto p = static_cast<NodeId>(data_cols_);
    if (v >= p) throw DiscoveryError("node index out of range");
    std::uint64_t key = 0;
    for (NodeId u : parents) {
        if (u >= p || u == v) throw DiscoveryError("invalid parent set");
        key |= std::uint64_t{1} << u;
    }
    if (auto it = cache_[v].find(key); it != cache_[v].end()) return it->second;

    const Eigen::MatrixXd& c = covariance_for(v);
    const auto vi = static_cast<Eigen::Index>(v);
    double resid = c(vi, vi);
    if (!parents.empty()) {
        const auto k = static_cast<Eigen::Index>(parents.size());
        Eigen::MatrixXd cpp(k, k);
        Eigen::VectorXd cpv(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto pa = static_cast<Eigen::Index>(parents[static_cast<std::size_t>(a)]);
            cpv(a) = c(pa, vi);
            for (Eigen::Index b = 0; b < k; ++b) cpp(a, b) = c(pa, static_cast<Eigen::Index>(parents[static_cast<std::size_t>(b)]));
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(cpp);
        const double scale = cpp.diagonal().maxCoeff();
        if (llt.info() != Eigen::Success || !(scale > 0.0) ||
            llt.matrixLLT().diagonal().array().square().minCoeff() < 1e-12 * scale)
            throw DiscoveryError("singular regression (collinear parents)");
        resid -= cpv.dot(llt.solve(cpv));
    }
    if (!(resid > 1e-12 * std::max(c(vi, vi), 1e-300)))
        throw DiscoveryError("singular regression (collinear parents)");

    const double nv = static_cast<double>(node_rows_[v]);
    const double score = -0.5 * nv * std::log(resid) -
                         penalty_ * static_cast<double>(parents.size() + 1) * std::log(static_cast<double>(n_)) / 2.0;
    cache_[v].emplace(key, score);
    return score;
}

double GaussianBicScore::total(const graph::Dag& dag) const {
    if (dag.size() != node_count()) throw DiscoveryError("graph and score disagree on node count");
    double sum = 0.0;
    for (NodeId v = 0; v < dag.size(); ++v) sum += local(v, dag.parents(v));
    return sum;
}

}  // namespace cml::discovery
