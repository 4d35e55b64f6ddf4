#include "cml/estimation/mediation.hpp"

#include "cml/util/error.hpp"

namespace cml::estimation {

namespace {

void check_arm(int x) {
    if (x != 0 && x != 1) throw EstimationError("treatment level must be 0 or 1");
}

/// Mean of `values` over rows whose label is `arm`.
double arm_mean(const Eigen::VectorXd& values, const std::vector<int>& labels, int arm) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (labels[r] != arm) continue;
        sum += values(static_cast<Eigen::Index>(r));
        ++count;
    }
    if (count == 0) throw EstimationError("treatment arm " + std::to_string(arm) + " is empty");
    return sum / static_cast<double>(count);
}

}  // namespace

double nde(const TLearner& learner, const data::Cohort& cohort, int x, int x_prime) {
    check_arm(x);
    check_arm(x_prime);
    const auto labels = treatment_labels(cohort, learner.treatment);
    const Eigen::VectorXd diff = arm_predictions(learner, cohort, x_prime) - arm_predictions(learner, cohort, x);
    return arm_mean(diff, labels, x);
}

double nie(const TLearner& learner, const data::Cohort& cohort, int x, int x_prime) {
    check_arm(x);
    check_arm(x_prime);
    const auto labels = treatment_labels(cohort, learner.treatment);
    const Eigen::VectorXd mu = arm_predictions(learner, cohort, x);
    return arm_mean(mu, labels, x_prime) - arm_mean(mu, labels, x);
}

double total_effect(double nde_x_xprime, double nie_xprime_x) { return nde_x_xprime - nie_xprime_x; }

MediationResult mediation(const TLearner& learner, const data::Cohort& cohort, int x, int x_prime) {
    MediationResult r;
    r.x = x;
    r.x_prime = x_prime;
    r.nde = nde(learner, cohort, x, x_prime);
    r.nie = nie(learner, cohort, x, x_prime);
    r.nie_reverse = nie(learner, cohort, x_prime, x);
    r.te = total_effect(r.nde, r.nie_reverse);
    r.ate = ate(learner, cohort);
    return r;
}

}  // namespace cml::estimation
