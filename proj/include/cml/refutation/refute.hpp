#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cml/data/cohort.hpp"
#include "cml/estimation/boosting.hpp"

namespace cml::refutation {

enum class RefutationMethod { PlaceboTreatment, DataSubset, AddRandomCommonCause, UnobservedCommonCause };
enum class Verdict { Passed, Failed, NotApplicable };

inline constexpr double kSignificance = 0.05;

std::string_view to_string(RefutationMethod m);
std::string_view to_string(Verdict v);
/// Accepts the JSON names and the short CLI names (placebo, subset, random_cause, unobserved).
RefutationMethod parse_method(std::string_view text);
Verdict parse_verdict(std::string_view text);
/// Row label used in reports, e.g. "Placebo treatment".
std::string_view display_name(RefutationMethod m);

struct StrengthPoint {
    double kappa_t = 0.0;
    double kappa_y = 0.0;
    double new_effect = 0.0;
    bool operator==(const StrengthPoint&) const = default;
};

struct RefutationResult {
    RefutationMethod method = RefutationMethod::PlaceboTreatment;
    double original_effect = 0.0;
    /// Replicate mean; for the unobserved cause, the effect at the grid point
    /// deviating most from the original.
    double new_effect = 0.0;
    std::optional<double> p_value;
    std::size_t replicates = 0;
    std::vector<double> replicate_effects;
    std::vector<StrengthPoint> strengths;
    std::optional<double> robustness_bound;
    Verdict verdict = Verdict::NotApplicable;
    std::uint64_t seed = 0;

    bool operator==(const RefutationResult&) const = default;
};

nlohmann::json to_json(const RefutationResult& r);
RefutationResult refutation_from_json(const nlohmann::json& j);

/// Re-estimates the effect on a perturbed cohort with the given adjustment features.
class EffectEstimator {
public:
    virtual ~EffectEstimator() = default;
    virtual double estimate(const data::Cohort& cohort, const std::vector<std::string>& features) const = 0;
};

/// T-learner ATE.
class TLearnerAteEstimator final : public EffectEstimator {
public:
    TLearnerAteEstimator(std::string treatment, std::string outcome, estimation::TreeParams params, std::uint64_t seed = 0)
        : treatment_(std::move(treatment)), outcome_(std::move(outcome)), params_(params), seed_(seed) {}
    double estimate(const data::Cohort& cohort, const std::vector<std::string>& features) const override;

private:
    std::string treatment_, outcome_;
    estimation::TreeParams params_;
    std::uint64_t seed_;
};

/// Ignores the data entirely.
class ConstantEstimator final : public EffectEstimator {
public:
    explicit ConstantEstimator(double value) : value_(value) {}
    double estimate(const data::Cohort&, const std::vector<std::string>&) const override { return value_; }

private:
    double value_;
};

struct Pipeline {
    std::shared_ptr<const EffectEstimator> estimator;
    std::string treatment;
    std::string outcome;
    std::vector<std::string> features;
    double original_effect = 0.0;
};

/// Builds a pipeline and computes its original effect on `cohort`.
Pipeline make_pipeline(std::shared_ptr<const EffectEstimator> estimator, const data::Cohort& cohort, std::string treatment,
                       std::string outcome, std::vector<std::string> features);

/// Treatment replaced by independent Bernoulli(treated fraction) draws; p-value
/// of 0 under the normal fitted to replicate effects.
RefutationResult refute_placebo(const Pipeline& pipeline, const data::Cohort& cohort, std::size_t replicates,
                                std::uint64_t seed);

/// Effects on random row subsets; p-value of the original effect.
RefutationResult refute_subset(const Pipeline& pipeline, const data::Cohort& cohort, double fraction,
                               std::size_t replicates, std::uint64_t seed);

/// Standard-normal column appended to the features; p-value of the original effect.
RefutationResult refute_random_common_cause(const Pipeline& pipeline, const data::Cohort& cohort,
                                            std::size_t replicates, std::uint64_t seed);

/// Per strength pair a latent U ~ N(0, 1) per row: treatment set to sign(U)
/// with probability kappa_t * |U| / max|U|, and kappa_y * U added to the
/// outcome. No p-value; passes when every grid point stays within `bound`.
RefutationResult refute_unobserved_common_cause(const Pipeline& pipeline, const data::Cohort& cohort,
                                                const std::vector<std::pair<double, double>>& strengths, double bound,
                                                std::uint64_t seed);

struct RefutationSettings {
    std::size_t replicates = 100;
    double subset_fraction = 0.8;
    std::vector<std::pair<double, double>> strengths{{0.1, 1.0}};
    double robustness_bound = 1.0;
    std::vector<RefutationMethod> methods{RefutationMethod::PlaceboTreatment, RefutationMethod::AddRandomCommonCause,
                                          RefutationMethod::DataSubset, RefutationMethod::UnobservedCommonCause};
};

/// Runs the selected methods in order; method seeds derive from `seed`.
std::vector<RefutationResult> run_refutations(const Pipeline& pipeline, const data::Cohort& cohort,
                                              const RefutationSettings& settings, std::uint64_t seed);

/// Passed iff no method Failed.
Verdict aggregate_verdict(const std::vector<RefutationResult>& results);

}  // namespace cml::refutation
