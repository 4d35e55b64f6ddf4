#include "cml/discovery/fisher_z.hpp"

#include <algorithm>
#include <cmath>

#include "cml/graph/algorithms.hpp"
#include "cml/util/error.hpp"
#include "cml/util/stats.hpp"

namespace cml::discovery {

using graph::NodeId;
using graph::NodeSet;

CiTestResult fisher_z_from_r(double r, std::size_t n, std::size_t k) {
    if (n <= k + 3) throw DiscoveryError("insufficient sample size for Fisher z test");
    r = std::clamp(r, -kCorrelationClamp, kCorrelationClamp);
    const double z = 0.5 * std::log((1.0 + r) / (1.0 - r)) * std::sqrt(static_cast<double>(n - k - 3));
    return {z, stats::two_sided_normal_p(z), k};
}

double partial_correlation(const Eigen::MatrixXd& corr, NodeId i, NodeId j, const NodeSet& s) {
    const NodeId lo = std::min(i, j), hi = std::max(i, j);
    if (s.empty()) return corr(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi));

    std::vector<Eigen::Index> idx{static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi)};
    for (NodeId v : s) idx.push_back(static_cast<Eigen::Index>(v));
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = corr(idx[a], idx[b]);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < 1e-10 * eig.eigenvalues().maxCoeff())
        throw DiscoveryError("singular correlation submatrix in conditional-independence test");
    const Eigen::MatrixXd prec = sub.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    return -prec(0, 1) / std::sqrt(prec(0, 0) * prec(1, 1));
}

FisherZTest::FisherZTest(Eigen::MatrixXd correlation, std::size_t n) : corr_(std::move(correlation)), n_(n) {
    if (corr_.rows() != corr_.cols()) throw DiscoveryError("correlation matrix must be square");
}

FisherZTest::FisherZTest(const data::Cohort& data)
    : FisherZTest(data::correlation_from_covariance(data::covariance_matrix(data)), data.rows()) {}

CiTestResult FisherZTest::test(NodeId i, NodeId j, const NodeSet& s) const {
    const auto p = static_cast<NodeId>(corr_.rows());
    if (i >= p || j >= p) throw DiscoveryError("variable index out of range");
    if (i == j) throw DiscoveryError("CI test needs two distinct variables");
    if (graph::contains(s, i) || graph::contains(s, j))
        throw DiscoveryError("tested variables must not be in the conditioning set");
    if (n_ <= s.size() + 3) throw DiscoveryError("insufficient sample size for Fisher z test");
    return fisher_z_from_r(partial_correlation(corr_, i, j, s), n_, s.size());
}

CiTestResult fisher_z_test(const data::Cohort& data, const std::string& i, const std::string& j,
                           const std::vector<std::string>& s) {
    const FisherZTest test(data);
    std::vector<NodeId> cond;
    for (const auto& name : s) cond.push_back(data.index_of(name));
    return test.test(data.index_of(i), data.index_of(j), graph::make_node_set(cond));
}

CiTestResult DSeparationOracle::test(NodeId i, NodeId j, const NodeSet& s) const {
    const bool sep = graph::d_separated(truth_, i, j, s);
    return {0.0, sep ? 1.0 : 0.0, s.size()};
}

}  // namespace cml::discovery
