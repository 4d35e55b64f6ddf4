#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cml/data/cohort.hpp"
#include "cml/graph/graph.hpp"

namespace cml::sim {

enum class MechanismKind { LinearGaussian, BernoulliLogistic, Categorical };

struct Mechanism {
    MechanismKind kind = MechanismKind::LinearGaussian;
    std::vector<std::string> parents;
    /// One per parent (linear and logistic kinds).
    std::vector<double> coefficients;
    double intercept = 0.0;
    double noise_sd = 0.0;
    /// Linear only: result clamped to [first, second].
    std::optional<std::pair<double, double>> clamp;
    /// Categorical only: one probability row per parent configuration, the
    /// first parent varying slowest. Parents must be discrete.
    std::vector<std::vector<double>> table;
    std::size_t levels = 0;
};

struct ScmNode {
    std::string name;
    data::Role role = data::Role::Covariate;
    std::string units;
    Mechanism mechanism;
};

/// Nodes in topological order; each mechanism may only reference earlier nodes.
class Scm {
public:
    explicit Scm(std::vector<ScmNode> nodes);

    const std::vector<ScmNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const ScmNode& node(std::size_t i) const { return nodes_.at(i); }
    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws ScmError for an unknown node.
    std::size_t index_of(std::string_view name) const;
    std::vector<std::string> names() const;

    graph::Dag graph() const;
    data::Schema schema() const;

    /// Replaces the coefficient on parent -> child (linear and logistic kinds).
    void set_coefficient(const std::string& parent, const std::string& child, double value);
    double coefficient(const std::string& parent, const std::string& child) const;

private:
    std::vector<ScmNode> nodes_;
};

/// Ancestral sampling. Every node consumes exactly one variate per row even
/// when intervened on, so runs with the same seed share their noise.
data::Cohort sample(const Scm& scm, std::size_t n, std::uint64_t seed,
                    data::Timepoint timepoint = data::Timepoint::GestWeek15);
data::Cohort sample(const Scm& scm, std::size_t n, std::uint64_t seed, const std::map<std::string, double>& interventions,
                    data::Timepoint timepoint = data::Timepoint::GestWeek15);

struct EffectEstimate {
    double value = 0.0;
    double std_error = 0.0;
    /// True for the closed-form path sum.
    bool exact = false;
};

/// Sum over directed treatment -> outcome paths of coefficient products when
/// every node on those paths is linear (clamps are ignored); otherwise a
/// do-operator Monte Carlo estimate with `mc_rows` rows.
EffectEstimate true_ate(const Scm& scm, const std::string& treatment, const std::string& outcome,
                        std::size_t mc_rows = 200000, std::uint64_t seed = 0);

/// Mean over rows of Y(do(T=1)) - Y(do(T=0)) with common random numbers.
EffectEstimate do_ate_monte_carlo(const Scm& scm, const std::string& treatment, const std::string& outcome,
                                  std::size_t rows, std::uint64_t seed);

/// Path sum restricted to paths through the direct edge treatment -> outcome.
double direct_coefficient(const Scm& scm, const std::string& treatment, const std::string& outcome);

nlohmann::json scm_to_json(const Scm& scm);
Scm scm_from_json(const nlohmann::json& j);
Scm load_scm(const std::filesystem::path& path);

}  // namespace cml::sim
