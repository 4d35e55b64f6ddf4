#pragma once

#include "cml/data/cohort.hpp"
#include "cml/estimation/tlearner.hpp"

namespace cml::estimation {

struct MediationResult {
    double nde = 0.0;          ///< NDE_{x,x'}
    double nie = 0.0;          ///< NIE_{x,x'}
    double nie_reverse = 0.0;  ///< NIE_{x',x}
    double te = 0.0;           ///< NDE_{x,x'} - NIE_{x',x}
    double ate = 0.0;
    int x = 0;
    int x_prime = 1;
};

/// Mean over rows with treatment x of mu_{x'} - mu_x.
double nde(const TLearner& learner, const data::Cohort& cohort, int x, int x_prime);

/// Mean of mu_x over rows with treatment x' minus its mean over rows with treatment x.
double nie(const TLearner& learner, const data::Cohort& cohort, int x, int x_prime);

double total_effect(double nde_x_xprime, double nie_xprime_x);

MediationResult mediation(const TLearner& learner, const data::Cohort& cohort, int x = 0, int x_prime = 1);

}  // namespace cml::estimation
