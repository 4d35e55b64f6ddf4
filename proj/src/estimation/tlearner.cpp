#include "cml/estimation/tlearner.hpp"

#include <algorithm>

#include "cml/util/error.hpp"

namespace cml::estimation {

std::vector<int> treatment_labels(const data::Cohort& cohort, const std::string& treatment) {
    const auto col = cohort.column(treatment);
    std::vector<int> labels(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (col[r] == 0.0) labels[r] = 0;
        else if (col[r] == 1.0) labels[r] = 1;
        else throw EstimationError("treatment column '" + treatment + "' must be binary with no missing cells");
    }
    return labels;
}

TLearner fit_t_learner(const data::Cohort& cohort, const std::string& treatment, const std::string& outcome,
                       const std::vector<std::string>& features, const TreeParams& params, std::uint64_t seed) {
    for (const auto& f : features)
        if (f == treatment || f == outcome) throw EstimationError("features must exclude treatment and outcome");
    const auto labels = treatment_labels(cohort, treatment);
    const auto y = cohort.column(outcome);
    if (std::any_of(y.begin(), y.end(), data::is_missing))
        throw EstimationError("outcome '" + outcome + "' has missing values");

    const Eigen::MatrixXd x = cohort.matrix(features);
    TLearner learner;
    learner.feature_names = features;
    learner.treatment = treatment;
    learner.outcome = outcome;
    for (int arm = 0; arm < 2; ++arm) {
        std::vector<Eigen::Index> rows;
        for (std::size_t r = 0; r < labels.size(); ++r)
            if (labels[r] == arm) rows.push_back(static_cast<Eigen::Index>(r));
        if (rows.empty()) throw EstimationError(arm == 0 ? "control arm is empty" : "treated arm is empty");
        Eigen::MatrixXd xa(static_cast<Eigen::Index>(rows.size()), x.cols());
        Eigen::VectorXd ya(static_cast<Eigen::Index>(rows.size()));
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rows.size()); ++i) {
            xa.row(i) = x.row(rows[static_cast<std::size_t>(i)]);
            ya(i) = y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
        }
        (arm == 0 ? learner.mu0 : learner.mu1) = fit_boosted_trees(xa, ya, params, seed);
    }
    return learner;
}

Eigen::VectorXd arm_predictions(const TLearner& learner, const data::Cohort& cohort, int arm) {
    if (arm != 0 && arm != 1) throw EstimationError("treatment arm must be 0 or 1");
    const Eigen::MatrixXd x = cohort.matrix(learner.feature_names);
    return predict(arm == 0 ? learner.mu0 : learner.mu1, x);
}

double ate(const TLearner& learner, const data::Cohort& cohort) {
    return (arm_predictions(learner, cohort, 1) - arm_predictions(learner, cohort, 0)).mean();
}

}  // namespace cml::estimation
