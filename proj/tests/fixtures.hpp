#pragma once

#include <optional>

#include "cml/sim/discrete.hpp"
#include "cml/sim/scm.hpp"

namespace fixture {

inline cml::sim::ScmNode root(std::string name, cml::data::Role role, double mean, double sd) {
    using namespace cml::sim;
    return {std::move(name), role, "", {MechanismKind::LinearGaussian, {}, {}, mean, sd, std::nullopt, {}, 0}};
}

/// C ~ N(0,1); T ~ Bernoulli(sigmoid(confounding C)); Y = effect T + 3 C + N(0,1).
inline cml::sim::Scm linear_scm(double effect = 10.0, double confounding = 0.5) {
    using namespace cml::sim;
    using cml::data::Role;
    std::vector<ScmNode> nodes;
    nodes.push_back(root("C", Role::Covariate, 0.0, 1.0));
    nodes.push_back({"T", Role::Treatment, "", {MechanismKind::BernoulliLogistic, {"C"}, {confounding}, 0.0, 0.0, std::nullopt, {}, 0}});
    nodes.push_back({"Y", Role::Outcome, "", {MechanismKind::LinearGaussian, {"T", "C"}, {effect, 3.0}, 0.0, 1.0, std::nullopt, {}, 0}});
    return Scm(std::move(nodes));
}

/// P(z=1|x=0)=0.2, P(z=1|x=1)=0.8, E[Y|x,z]=2x+3z.
inline cml::sim::DiscreteScm binary_mediator() {
    cml::sim::DiscreteScm d;
    d.p_treatment = 0.5;
    d.mediator_given_treatment = {{0.8, 0.2}, {0.2, 0.8}};
    d.outcome_mean = {{0.0, 3.0}, {2.0, 5.0}};
    d.outcome_noise_sd = 1.0;
    return d;
}

}  // namespace fixture
