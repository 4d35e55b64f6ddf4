#include "cml/sim/scm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "cml/util/error.hpp"
#include "cml/util/random.hpp"
#include "cml/util/stats.hpp"

namespace cml::sim {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::size_t level_count(const ScmNode& node) {
    switch (node.mechanism.kind) {
        case MechanismKind::BernoulliLogistic: return 2;
        case MechanismKind::Categorical: return node.mechanism.levels;
        default: return 0;
    }
}

std::string_view kind_name(MechanismKind kind) {
    switch (kind) {
        case MechanismKind::LinearGaussian: return "linear_gaussian";
        case MechanismKind::BernoulliLogistic: return "bernoulli_logistic";
        case MechanismKind::Categorical: return "categorical";
    }
    return "?";
}

MechanismKind parse_kind_name(const std::string& s) {
    if (s == "linear_gaussian") return MechanismKind::LinearGaussian;
    if (s == "bernoulli_logistic") return MechanismKind::BernoulliLogistic;
    if (s == "categorical") return MechanismKind::Categorical;
    throw ScmError("unknown mechanism kind: " + s);
}

}  // namespace

Scm::Scm(std::vector<ScmNode> nodes) : nodes_(std::move(nodes)) {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ScmNode& node = nodes_[i];
        const Mechanism& m = node.mechanism;
        const std::string where = "node '" + node.name + "': ";
        if (node.name.empty()) throw ScmError("node name must not be empty");
        if (seen.count(node.name)) throw ScmError("duplicate node " + node.name);
        std::set<std::string> distinct(m.parents.begin(), m.parents.end());
        if (distinct.size() != m.parents.size()) throw ScmError(where + "duplicate parent");
        for (const auto& p : m.parents)
            if (!seen.count(p)) throw ScmError(where + "parent '" + p + "' is not an earlier node");

        if (m.kind == MechanismKind::Categorical) {
            if (m.levels < 2) throw ScmError(where + "categorical node needs at least two levels");
            std::size_t configs = 1;
            for (const auto& p : m.parents) {
                const std::size_t k = level_count(nodes_[seen.at(p)]);
                if (k == 0) throw ScmError(where + "categorical node needs discrete parents");
                configs *= k;
            }
            if (m.table.size() != configs) throw ScmError(where + "probability table has the wrong number of rows");
            for (const auto& row : m.table) {
                if (row.size() != m.levels) throw ScmError(where + "probability row has the wrong length");
                double sum = 0.0;
                for (double v : row) {
                    if (!(v >= 0.0 && v <= 1.0)) throw ScmError(where + "probabilities must lie in [0, 1]");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > kRowSumTolerance) throw ScmError(where + "probability row does not sum to 1");
            }
        } else {
            if (m.coefficients.size() != m.parents.size())
                throw ScmError(where + "one coefficient per parent is required");
            if (!std::all_of(m.coefficients.begin(), m.coefficients.end(), [](double c) { return std::isfinite(c); }) ||
                !std::isfinite(m.intercept))
                throw ScmError(where + "coefficients must be finite");
            if (m.kind == MechanismKind::LinearGaussian) {
                if (!(m.noise_sd >= 0.0) || !std::isfinite(m.noise_sd)) throw ScmError(where + "noise sd must be >= 0");
                if (m.clamp && !(m.clamp->first <= m.clamp->second)) throw ScmError(where + "clamp bounds are inverted");
            }
        }
        seen.emplace(node.name, i);
    }
}

std::optional<std::size_t> Scm::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Scm::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw ScmError("unknown SCM node: " + std::string(name));
}

std::vector<std::string> Scm::names() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_) out.push_back(n.name);
    return out;
}

graph::Dag Scm::graph() const {
    graph::Dag g(names());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (const auto& p : nodes_[i].mechanism.parents) g.add_edge(index_of(p), i);
    return g;
}

data::Schema Scm::schema() const {
    data::Schema schema;
    for (const auto& n : nodes_) {
        data::VariableSchema var{n.name, data::VarKind::Continuous, n.role, n.units, {}};
        if (n.mechanism.kind == MechanismKind::BernoulliLogistic) var.kind = data::VarKind::Binary;
        if (n.mechanism.kind == MechanismKind::Categorical) {
            var.kind = data::VarKind::Categorical;
            for (std::size_t k = 0; k < n.mechanism.levels; ++k) var.levels.push_back(std::to_string(k));
        }
        schema.push_back(std::move(var));
    }
    return schema;
}

void Scm::set_coefficient(const std::string& parent, const std::string& child, double value) {
    Mechanism& m = nodes_[index_of(child)].mechanism;
    if (m.kind == MechanismKind::Categorical) throw ScmError("categorical node '" + child + "' has no coefficients");
    auto it = std::find(m.parents.begin(), m.parents.end(), parent);
    if (it == m.parents.end()) throw ScmError("no edge " + parent + " -> " + child);
    m.coefficients[static_cast<std::size_t>(it - m.parents.begin())] = value;
}

double Scm::coefficient(const std::string& parent, const std::string& child) const {
    const Mechanism& m = nodes_[index_of(child)].mechanism;
    auto it = std::find(m.parents.begin(), m.parents.end(), parent);
    if (it == m.parents.end() || m.kind == MechanismKind::Categorical) return 0.0;
    return m.coefficients[static_cast<std::size_t>(it - m.parents.begin())];
}

data::Cohort sample(const Scm& scm, std::size_t n, std::uint64_t seed, data::Timepoint timepoint) {
    return sample(scm, n, seed, {}, timepoint);
}

data::Cohort sample(const Scm& scm, std::size_t n, std::uint64_t seed, const std::map<std::string, double>& interventions,
                    data::Timepoint timepoint) {
    if (n == 0) throw ScmError("sample size must be at least 1");
    const std::size_t p = scm.size();
    std::vector<std::optional<double>> fixed(p);
    for (const auto& [name, value] : interventions) {
        const std::size_t i = scm.index_of(name);
        const std::size_t k = level_count(scm.node(i));
        if (k > 0 && (value != std::floor(value) || value < 0 || value >= static_cast<double>(k)))
            throw ScmError("intervention value out of range for discrete node " + name);
        fixed[i] = value;
    }
    std::vector<std::vector<std::size_t>> parent_idx(p);
    for (std::size_t i = 0; i < p; ++i)
        for (const auto& par : scm.node(i).mechanism.parents) parent_idx[i].push_back(scm.index_of(par));

    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            const Mechanism& m = scm.node(i).mechanism;
            double value = 0.0;
            switch (m.kind) {
                case MechanismKind::LinearGaussian: {
                    const double eps = normal(rng);
                    value = m.intercept;
                    for (std::size_t k = 0; k < parent_idx[i].size(); ++k) value += m.coefficients[k] * cols[parent_idx[i][k]][r];
                    value += m.noise_sd * eps;
                    if (m.clamp) value = std::clamp(value, m.clamp->first, m.clamp->second);
                    break;
                }
                case MechanismKind::BernoulliLogistic: {
                    const double u = uniform(rng);
                    double eta = m.intercept;
                    for (std::size_t k = 0; k < parent_idx[i].size(); ++k) eta += m.coefficients[k] * cols[parent_idx[i][k]][r];
                    value = u < stats::sigmoid(eta) ? 1.0 : 0.0;
                    break;
                }
                case MechanismKind::Categorical: {
                    const double u = uniform(rng);
                    std::size_t config = 0;
                    for (std::size_t pi : parent_idx[i])
                        config = config * level_count(scm.node(pi)) + static_cast<std::size_t>(cols[pi][r]);
                    const auto& row = m.table[config];
                    double cum = 0.0;
                    std::size_t level = m.levels - 1;
                    for (std::size_t k = 0; k + 1 < m.levels; ++k) {
                        cum += row[k];
                        if (u < cum) {
                            level = k;
                            break;
                        }
                    }
                    value = static_cast<double>(level);
                    break;
                }
            }
            cols[i][r] = fixed[i] ? *fixed[i] : value;
        }
    }
    return data::Cohort(scm.schema(), std::move(cols), timepoint);
}

namespace {

std::size_t check_binary_treatment(const Scm& scm, const std::string& treatment) {
    const std::size_t t = scm.index_of(treatment);
    if (level_count(scm.node(t)) != 2) throw ScmError("treatment '" + treatment + "' is not binary");
    return t;
}

}  // namespace

EffectEstimate do_ate_monte_carlo(const Scm& scm, const std::string& treatment, const std::string& outcome,
                                  std::size_t rows, std::uint64_t seed) {
    check_binary_treatment(scm, treatment);
    scm.index_of(outcome);
    const auto y1 = sample(scm, rows, seed, {{treatment, 1.0}});
    const auto y0 = sample(scm, rows, seed, {{treatment, 0.0}});
    const auto a = y1.column(outcome), b = y0.column(outcome);
    std::vector<double> diff(rows);
    for (std::size_t r = 0; r < rows; ++r) diff[r] = a[r] - b[r];
    return {stats::mean(diff), stats::sample_sd(diff) / std::sqrt(static_cast<double>(rows)), false};
}

EffectEstimate true_ate(const Scm& scm, const std::string& treatment, const std::string& outcome, std::size_t mc_rows,
                        std::uint64_t seed) {
    const std::size_t t = check_binary_treatment(scm, treatment);
    const std::size_t y = scm.index_of(outcome);
    const graph::Dag g = scm.graph();
    if (t == y || !g.reachable(t, y)) return {0.0, 0.0, true};

    const graph::NodeSet anc = g.ancestors(y);
    std::vector<double> effect(scm.size(), 0.0);
    effect[t] = 1.0;
    for (std::size_t i = t + 1; i < scm.size(); ++i) {
        if (!g.reachable(t, i) || (i != y && !graph::contains(anc, i))) continue;
        const Mechanism& m = scm.node(i).mechanism;
        if (m.kind != MechanismKind::LinearGaussian) return do_ate_monte_carlo(scm, treatment, outcome, mc_rows, seed);
        for (std::size_t k = 0; k < m.parents.size(); ++k) effect[i] += m.coefficients[k] * effect[scm.index_of(m.parents[k])];
    }
    return {effect[y], 0.0, true};
}

double direct_coefficient(const Scm& scm, const std::string& treatment, const std::string& outcome) {
    return scm.coefficient(treatment, outcome);
}

nlohmann::json scm_to_json(const Scm& scm) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : scm.nodes()) {
        const Mechanism& m = n.mechanism;
        nlohmann::json j{{"name", n.name},
                         {"role", data::to_string(n.role)},
                         {"units", n.units},
                         {"mechanism", kind_name(m.kind)},
                         {"parents", m.parents}};
        if (m.kind == MechanismKind::Categorical) {
            j["levels"] = m.levels;
            j["table"] = m.table;
        } else {
            j["coefficients"] = m.coefficients;
            j["intercept"] = m.intercept;
            if (m.kind == MechanismKind::LinearGaussian) {
                j["noise_sd"] = m.noise_sd;
                if (m.clamp) j["clamp"] = {m.clamp->first, m.clamp->second};
            }
        }
        nodes.push_back(std::move(j));
    }
    return {{"nodes", nodes}};
}

Scm scm_from_json(const nlohmann::json& j) {
    try {
        std::vector<ScmNode> nodes;
        for (const auto& jn : j.at("nodes")) {
            ScmNode n;
            n.name = jn.at("name").get<std::string>();
            n.role = data::parse_role(jn.value("role", std::string("covariate")));
            n.units = jn.value("units", std::string());
            Mechanism& m = n.mechanism;
            m.kind = parse_kind_name(jn.at("mechanism").get<std::string>());
            m.parents = jn.value("parents", std::vector<std::string>{});
            if (m.kind == MechanismKind::Categorical) {
                m.levels = jn.at("levels").get<std::size_t>();
                m.table = jn.at("table").get<std::vector<std::vector<double>>>();
            } else {
                m.coefficients = jn.value("coefficients", std::vector<double>{});
                m.intercept = jn.value("intercept", 0.0);
                if (m.kind == MechanismKind::LinearGaussian) {
                    m.noise_sd = jn.value("noise_sd", 0.0);
                    if (jn.contains("clamp")) {
                        const auto c = jn.at("clamp").get<std::vector<double>>();
                        if (c.size() != 2) throw ScmError("clamp must be [low, high]");
                        m.clamp = std::pair{c[0], c[1]};
                    }
                }
            }
            nodes.push_back(std::move(n));
        }
        return Scm(std::move(nodes));
    } catch (const nlohmann::json::exception& e) {
        throw ScmError(std::string("invalid SCM description: ") + e.what());
    } catch (const DataError& e) {
        throw ScmError(std::string("invalid SCM description: ") + e.what());
    }
}

Scm load_scm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScmError("cannot open SCM file " + path.string());
    try {
        return scm_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ScmError("invalid SCM file " + path.string() + ": " + e.what());
    }
}

}  // namespace cml::sim
