#pragma once

#include <cstdint>
#include <vector>

#include "cml/data/cohort.hpp"
#include "cml/estimation/mediation.hpp"

namespace cml::sim {

/// Binary treatment x, one discrete mediator z (joint mediator states can be
/// encoded as levels), and an outcome with a mean per (x, z) cell plus
/// Gaussian noise. Cohort columns are "x", "z", "y".
struct DiscreteScm {
    double p_treatment = 0.5;
    /// mediator_given_treatment[x][z] = P(z | x).
    std::vector<std::vector<double>> mediator_given_treatment;
    /// outcome_mean[x][z] = E[Y | x, z].
    std::vector<std::vector<double>> outcome_mean;
    double outcome_noise_sd = 1.0;

    std::size_t mediator_levels() const { return mediator_given_treatment.empty() ? 0 : mediator_given_treatment[0].size(); }
    /// Throws ScmError on malformed tables.
    void validate() const;
};

struct OracleMediation {
    estimation::MediationResult effects;
    /// E[Y | do(x)] and E[Y | do(x')].
    double do_y_x = 0.0;
    double do_y_x_prime = 0.0;
    double do_te = 0.0;
};

/// Exact enumeration: NDE_{x,x'}, NIE_{x,x'}, NIE_{x',x}, TE = NDE_{x,x'} - NIE_{x',x},
/// and the do-operator total effect. effects.ate holds the do-operator value.
OracleMediation oracle_mediation(const DiscreteScm& scm, int x, int x_prime);

data::Cohort sample(const DiscreteScm& scm, std::size_t n, std::uint64_t seed);

}  // namespace cml::sim
