#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cml/data/cohort.hpp"
#include "cml/estimation/boosting.hpp"

namespace cml::estimation {

struct TLearner {
    BoostedTreeModel mu0;
    BoostedTreeModel mu1;
    std::vector<std::string> feature_names;
    std::string treatment;
    std::string outcome;
};

/// mu0 on rows with treatment 0, mu1 on rows with treatment 1.
TLearner fit_t_learner(const data::Cohort& cohort, const std::string& treatment, const std::string& outcome,
                       const std::vector<std::string>& features, const TreeParams& params, std::uint64_t seed = 0);

/// mu_x evaluated on every row of `cohort`.
Eigen::VectorXd arm_predictions(const TLearner& learner, const data::Cohort& cohort, int arm);

/// Mean over all rows of mu1 - mu0.
double ate(const TLearner& learner, const data::Cohort& cohort);

/// Treatment column as 0/1 ints; throws EstimationError on missing or non-binary cells.
std::vector<int> treatment_labels(const data::Cohort& cohort, const std::string& treatment);

}  // namespace cml::estimation
