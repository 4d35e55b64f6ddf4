#include "cml/sim/study_template.hpp"

#include <algorithm>

#include "cml/util/error.hpp"
#include "cml/util/stats.hpp"

namespace cml::sim {

namespace {

using data::Role;

ScmNode gaussian(std::string name, Role role, std::string units, double mean, double sd) {
    return {std::move(name), role, std::move(units), {MechanismKind::LinearGaussian, {}, {}, mean, sd, std::nullopt, {}, 0}};
}

ScmNode bernoulli(std::string name, Role role, double p) {
    return {std::move(name), role, "", {MechanismKind::BernoulliLogistic, {}, {}, stats::logit(p), 0.0, std::nullopt, {}, 0}};
}

struct Term {
    std::string parent;
    double coef;
    double parent_mean;
};

/// Linear node whose intercept puts its mean at `target_mean` given the parent means.
ScmNode linear(std::string name, Role role, std::string units, const std::vector<Term>& terms, double target_mean,
               double sd, std::optional<std::pair<double, double>> clamp = std::nullopt) {
    Mechanism m{MechanismKind::LinearGaussian, {}, {}, target_mean, sd, clamp, {}, 0};
    for (const auto& t : terms) {
        m.parents.push_back(t.parent);
        m.coefficients.push_back(t.coef);
        m.intercept -= t.coef * t.parent_mean;
    }
    return {std::move(name), role, std::move(units), std::move(m)};
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

Scm study_template(const std::map<std::string, double>& effect_overrides) {
    constexpr double age = 29.3, bmi = 30.69, children = 1.2, work = 0.792, relationship = 0.979;
    constexpr double p_active = 0.46;
    constexpr double steps = 6500.0 + 1200.0 * p_active;
    constexpr double met = 1.55 + 0.15 * p_active;
    constexpr double epds = 6.1;

    std::vector<ScmNode> nodes;
    nodes.push_back(gaussian("age", Role::Covariate, "years", age, 4.6));
    nodes.push_back(gaussian("bmi", Role::Covariate, "kg/m2", bmi, 4.74));
    nodes.push_back(gaussian("children", Role::Covariate, "count", children, 1.6));
    nodes.push_back(bernoulli("work", Role::Covariate, work));
    nodes.push_back(bernoulli("relationship", Role::Covariate, relationship));

    {
        const std::vector<Term> terms{{"age", 0.02, age}, {"bmi", -0.08, bmi}, {"children", 0.05, children},
                                      {"work", 0.6, work}, {"relationship", 0.3, relationship}};
        Mechanism m{MechanismKind::BernoulliLogistic, {}, {}, stats::logit(p_active), 0.0, std::nullopt, {}, 0};
        for (const auto& t : terms) {
            m.parents.push_back(t.parent);
            m.coefficients.push_back(t.coef);
            m.intercept -= t.coef * t.parent_mean;
        }
        nodes.push_back({"active", Role::Treatment, "", std::move(m)});
    }

    nodes.push_back(linear("steps", Role::Mediator, "steps/day", {{"active", 1200.0, p_active}}, steps, 2000.0));
    nodes.push_back(linear("average_met", Role::Mediator, "MET", {{"active", 0.15, p_active}}, met, 0.25));
    nodes.push_back(linear("epds", Role::Mediator, "score", {{"active", -1.2, p_active}}, epds, 4.05));

    const std::pair<double, double> qol_range{0.0, 100.0};
    nodes.push_back(linear("qol_physical", Role::Outcome, "score",
                           {{"active", 5.5, p_active},
                            {"steps", 0.0005, steps},
                            {"average_met", 4.0, met},
                            {"epds", -0.5, epds},
                            {"age", -0.1, age},
                            {"bmi", -0.2, bmi},
                            {"children", -0.5, children},
                            {"work", 2.0, work},
                            {"relationship", 3.0, relationship}},
                           68.0, 8.0, qol_range));
    nodes.push_back(linear("qol_psychological", Role::Auxiliary, "score",
                           {{"active", 1.21, p_active},
                            {"steps", 0.0002, steps},
                            {"average_met", 1.0, met},
                            {"epds", -1.5, epds},
                            {"age", -0.05, age},
                            {"bmi", -0.1, bmi},
                            {"children", -0.3, children},
                            {"work", 1.0, work},
                            {"relationship", 1.5, relationship}},
                           65.0, 7.0, qol_range));

    Scm scm(std::move(nodes));
    for (const auto& [key, value] : effect_overrides) {
        const auto arrow = key.find("->");
        if (arrow == std::string::npos) throw ScmError("unknown override '" + key + "' (expected parent->child)");
        const std::string parent = trim(key.substr(0, arrow)), child = trim(key.substr(arrow + 2));
        const auto c = scm.find(child);
        const auto& parents = c ? scm.node(*c).mechanism.parents : std::vector<std::string>{};
        if (std::find(parents.begin(), parents.end(), parent) == parents.end())
            throw ScmError("unknown override '" + key + "': no such edge in the template");
        scm.set_coefficient(parent, child, value);
    }
    return scm;
}

}  // namespace cml::sim
