#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cml/data/cohort.hpp"
#include "cml/graph/graph.hpp"

namespace cml::discovery {

struct CiTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t conditioning_size = 0;
};

/// Conditional-independence test over node indices.
class CiTest {
public:
    virtual ~CiTest() = default;
    virtual CiTestResult test(graph::NodeId i, graph::NodeId j, const graph::NodeSet& s) const = 0;
};

inline constexpr double kCorrelationClamp = 1.0 - 1e-12;

/// z = atanh(r) * sqrt(n - k - 3) with |r| clamped to kCorrelationClamp,
/// two-sided standard-normal p-value.
CiTestResult fisher_z_from_r(double r, std::size_t n, std::size_t k);

/// Partial correlation of i and j given s from the inverse of the
/// correlation submatrix over {i, j} u s (built in canonical order, so the
/// result is exactly symmetric in i and j).
double partial_correlation(const Eigen::MatrixXd& corr, graph::NodeId i, graph::NodeId j, const graph::NodeSet& s);

class FisherZTest final : public CiTest {
public:
    FisherZTest(Eigen::MatrixXd correlation, std::size_t n);
    /// Uses every column of a complete (standardized) cohort.
    explicit FisherZTest(const data::Cohort& data);

    CiTestResult test(graph::NodeId i, graph::NodeId j, const graph::NodeSet& s) const override;

    std::size_t sample_size() const { return n_; }
    const Eigen::MatrixXd& correlation() const { return corr_; }

private:
    Eigen::MatrixXd corr_;
    std::size_t n_;
};

CiTestResult fisher_z_test(const data::Cohort& data, const std::string& i, const std::string& j,
                           const std::vector<std::string>& s);

/// Perfect oracle: p = 1 when i and j are d-separated by s in `truth`, else 0.
class DSeparationOracle final : public CiTest {
public:
    explicit DSeparationOracle(graph::Dag truth) : truth_(std::move(truth)) {}
    CiTestResult test(graph::NodeId i, graph::NodeId j, const graph::NodeSet& s) const override;

private:
    graph::Dag truth_;
};

}  // namespace cml::discovery
