#include "cml/refutation/refute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cml/estimation/tlearner.hpp"
#include "cml/util/error.hpp"
#include "cml/util/parallel.hpp"
#include "cml/util/random.hpp"
#include "cml/util/stats.hpp"

namespace cml::refutation {

namespace {

constexpr int kPlaceboRetries = 10;
constexpr const char* kRandomCauseColumn = "random_common_cause";

}  // namespace

std::string_view to_string(RefutationMethod m) {
    switch (m) {
        case RefutationMethod::PlaceboTreatment: return "placebo_treatment";
        case RefutationMethod::DataSubset: return "data_subset";
        case RefutationMethod::AddRandomCommonCause: return "random_common_cause";
        case RefutationMethod::UnobservedCommonCause: return "unobserved_common_cause";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Passed: return "passed";
        case Verdict::Failed: return "failed";
        case Verdict::NotApplicable: return "not_applicable";
    }
    return "?";
}

RefutationMethod parse_method(std::string_view text) {
    if (text == "placebo" || text == "placebo_treatment") return RefutationMethod::PlaceboTreatment;
    if (text == "subset" || text == "data_subset") return RefutationMethod::DataSubset;
    if (text == "random_cause" || text == "random_common_cause") return RefutationMethod::AddRandomCommonCause;
    if (text == "unobserved" || text == "unobserved_common_cause") return RefutationMethod::UnobservedCommonCause;
    throw RefutationError("unknown refutation method: " + std::string(text));
}

Verdict parse_verdict(std::string_view text) {
    if (text == "passed") return Verdict::Passed;
    if (text == "failed") return Verdict::Failed;
    if (text == "not_applicable") return Verdict::NotApplicable;
    throw RefutationError("unknown verdict: " + std::string(text));
}

std::string_view display_name(RefutationMethod m) {
    switch (m) {
        case RefutationMethod::PlaceboTreatment: return "Placebo treatment";
        case RefutationMethod::DataSubset: return "Data subset";
        case RefutationMethod::AddRandomCommonCause: return "Add random cause";
        case RefutationMethod::UnobservedCommonCause: return "Unobserved random cause";
    }
    return "?";
}

nlohmann::json to_json(const RefutationResult& r) {
    nlohmann::json j{{"method", to_string(r.method)},
                     {"original_effect", r.original_effect},
                     {"new_effect", r.new_effect},
                     {"replicates", r.replicates},
                     {"replicate_effects", r.replicate_effects},
                     {"verdict", to_string(r.verdict)},
                     {"seed", r.seed}};
    if (r.p_value) j["p_value"] = *r.p_value;
    if (r.robustness_bound) j["robustness_bound"] = *r.robustness_bound;
    if (r.method == RefutationMethod::UnobservedCommonCause) {
        nlohmann::json s = nlohmann::json::array();
        for (const auto& p : r.strengths)
            s.push_back({{"kappa_t", p.kappa_t}, {"kappa_y", p.kappa_y}, {"new_effect", p.new_effect}});
        j["strengths"] = s;
    }
    return j;
}

RefutationResult refutation_from_json(const nlohmann::json& j) {
    try {
        RefutationResult r;
        r.method = parse_method(j.at("method").get<std::string>());
        r.original_effect = j.at("original_effect").get<double>();
        r.new_effect = j.at("new_effect").get<double>();
        r.replicates = j.value("replicates", std::size_t{0});
        r.replicate_effects = j.value("replicate_effects", std::vector<double>{});
        r.verdict = parse_verdict(j.at("verdict").get<std::string>());
        r.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("p_value") && !j.at("p_value").is_null()) r.p_value = j.at("p_value").get<double>();
        if (j.contains("robustness_bound")) r.robustness_bound = j.at("robustness_bound").get<double>();
        if (j.contains("strengths"))
            for (const auto& s : j.at("strengths"))
                r.strengths.push_back({s.at("kappa_t").get<double>(), s.at("kappa_y").get<double>(),
                                       s.at("new_effect").get<double>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw RefutationError(std::string("malformed refutation record: ") + e.what());
    }
}

double TLearnerAteEstimator::estimate(const data::Cohort& cohort, const std::vector<std::string>& features) const {
    const auto learner = estimation::fit_t_learner(cohort, treatment_, outcome_, features, params_, seed_);
    return estimation::ate(learner, cohort);
}

Pipeline make_pipeline(std::shared_ptr<const EffectEstimator> estimator, const data::Cohort& cohort, std::string treatment,
                       std::string outcome, std::vector<std::string> features) {
    if (!estimator) throw RefutationError("pipeline needs an estimator");
    Pipeline p{std::move(estimator), std::move(treatment), std::move(outcome), std::move(features), 0.0};
    p.original_effect = p.estimator->estimate(cohort, p.features);
    return p;
}

namespace {

void check_replicates(std::size_t b) {
    if (b == 0) throw RefutationError("at least one replicate is required");
}

/// Runs `fn(i)` for every replicate and summarises against `target`.
template <class Fn>
RefutationResult replicate_test(RefutationMethod method, const Pipeline& pipeline, std::size_t b, std::uint64_t seed,
                                double target, Fn&& fn) {
    check_replicates(b);
    RefutationResult r;
    r.method = method;
    r.original_effect = pipeline.original_effect;
    r.replicates = b;
    r.seed = seed;
    r.replicate_effects.assign(b, 0.0);
    parallel_for(b, [&](std::size_t i) { r.replicate_effects[i] = fn(i); });
    r.new_effect = stats::mean(r.replicate_effects);
    r.p_value = stats::normal_tail_p(target, r.new_effect, stats::sample_sd(r.replicate_effects));
    r.verdict = *r.p_value < kSignificance ? Verdict::Failed : Verdict::Passed;
    return r;
}

}  // namespace

RefutationResult refute_placebo(const Pipeline& pipeline, const data::Cohort& cohort, std::size_t replicates,
                                std::uint64_t seed) {
    const auto labels = estimation::treatment_labels(cohort, pipeline.treatment);
    const double p_hat = static_cast<double>(std::accumulate(labels.begin(), labels.end(), 0)) /
                         static_cast<double>(labels.size());
    if (p_hat <= 0.0 || p_hat >= 1.0) throw RefutationError("placebo needs both treatment arms in the data");
    return replicate_test(RefutationMethod::PlaceboTreatment, pipeline, replicates, seed, 0.0, [&](std::size_t i) {
        Rng rng(derive_seed(seed, "placebo", i));
        std::bernoulli_distribution draw(p_hat);
        std::vector<double> placebo(labels.size());
        for (int attempt = 0; attempt < kPlaceboRetries; ++attempt) {
            std::size_t treated = 0;
            for (auto& v : placebo) {
                v = draw(rng) ? 1.0 : 0.0;
                treated += v == 1.0;
            }
            if (treated > 0 && treated < placebo.size())
                return pipeline.estimator->estimate(cohort.with_values(pipeline.treatment, placebo), pipeline.features);
        }
        throw RefutationError("placebo draw kept producing a single treatment arm");
    });
}

RefutationResult refute_subset(const Pipeline& pipeline, const data::Cohort& cohort, double fraction,
                               std::size_t replicates, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw RefutationError("subset fraction must lie in (0, 1]");
    const std::size_t n = cohort.rows();
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (k < 2) throw RefutationError("subset too small to fit models");
    return replicate_test(RefutationMethod::DataSubset, pipeline, replicates, seed, pipeline.original_effect,
                          [&](std::size_t i) {
                              std::vector<std::size_t> rows(n);
                              std::iota(rows.begin(), rows.end(), std::size_t{0});
                              if (k < n) {
                                  Rng rng(derive_seed(seed, "subset", i));
                                  std::shuffle(rows.begin(), rows.end(), rng);
                                  rows.resize(k);
                                  std::sort(rows.begin(), rows.end());
                              }
                              try {
                                  return pipeline.estimator->estimate(cohort.select_rows(rows), pipeline.features);
                              } catch (const EstimationError& e) {
                                  throw RefutationError(std::string("subset too small to fit models: ") + e.what());
                              }
                          });
}

RefutationResult refute_random_common_cause(const Pipeline& pipeline, const data::Cohort& cohort,
                                            std::size_t replicates, std::uint64_t seed) {
    std::string column = kRandomCauseColumn;
    while (cohort.find(column)) column += "_";
    auto features = pipeline.features;
    features.push_back(column);
    return replicate_test(RefutationMethod::AddRandomCommonCause, pipeline, replicates, seed, pipeline.original_effect,
                          [&](std::size_t i) {
                              Rng rng(derive_seed(seed, "random_common_cause", i));
                              std::normal_distribution<double> normal(0.0, 1.0);
                              std::vector<double> noise(cohort.rows());
                              for (auto& v : noise) v = normal(rng);
                              const data::VariableSchema var{column, data::VarKind::Continuous, data::Role::Covariate, "", {}};
                              return pipeline.estimator->estimate(cohort.with_column(var, std::move(noise)), features);
                          });
}

RefutationResult refute_unobserved_common_cause(const Pipeline& pipeline, const data::Cohort& cohort,
                                                const std::vector<std::pair<double, double>>& strengths, double bound,
                                                std::uint64_t seed) {
    if (strengths.empty()) throw RefutationError("unobserved common cause needs at least one strength pair");
    if (!(bound >= 0.0)) throw RefutationError("robustness bound must be >= 0");
    for (const auto& [kt, ky] : strengths) {
        if (!(kt >= 0.0 && kt < 1.0)) throw RefutationError("kappa_t must lie in [0, 1)");
        if (!std::isfinite(ky)) throw RefutationError("kappa_y must be finite");
    }
    const auto labels = estimation::treatment_labels(cohort, pipeline.treatment);
    const auto y = cohort.column(pipeline.outcome);

    RefutationResult r;
    r.method = RefutationMethod::UnobservedCommonCause;
    r.original_effect = pipeline.original_effect;
    r.replicates = strengths.size();
    r.seed = seed;
    r.robustness_bound = bound;
    r.strengths.resize(strengths.size());
    r.replicate_effects.assign(strengths.size(), 0.0);
    parallel_for(strengths.size(), [&](std::size_t g) {
        const auto [kt, ky] = strengths[g];
        Rng rng(derive_seed(seed, "unobserved_common_cause", g));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::vector<double> u(labels.size());
        double max_abs = 0.0;
        for (auto& v : u) {
            v = normal(rng);
            max_abs = std::max(max_abs, std::abs(v));
        }
        std::vector<double> t(labels.size()), yy(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const double flip = max_abs > 0.0 ? kt * std::abs(u[i]) / max_abs : 0.0;
            t[i] = uniform(rng) < flip ? (u[i] > 0.0 ? 1.0 : 0.0) : static_cast<double>(labels[i]);
            yy[i] = y[i] + ky * u[i];
        }
        const auto perturbed = cohort.with_values(pipeline.treatment, std::move(t)).with_values(pipeline.outcome, std::move(yy));
        const double effect = pipeline.estimator->estimate(perturbed, pipeline.features);
        r.strengths[g] = {kt, ky, effect};
        r.replicate_effects[g] = effect;
    });
    double worst = -1.0;
    for (const auto& p : r.strengths) {
        const double dev = std::abs(p.new_effect - r.original_effect);
        if (dev > worst) {
            worst = dev;
            r.new_effect = p.new_effect;
        }
    }
    r.verdict = worst <= bound ? Verdict::Passed : Verdict::Failed;
    return r;
}

std::vector<RefutationResult> run_refutations(const Pipeline& pipeline, const data::Cohort& cohort,
                                              const RefutationSettings& settings, std::uint64_t seed) {
    std::vector<RefutationResult> out;
    for (RefutationMethod m : settings.methods) {
        const std::uint64_t s = derive_seed(seed, to_string(m));
        switch (m) {
            case RefutationMethod::PlaceboTreatment:
                out.push_back(refute_placebo(pipeline, cohort, settings.replicates, s));
                break;
            case RefutationMethod::DataSubset:
                out.push_back(refute_subset(pipeline, cohort, settings.subset_fraction, settings.replicates, s));
                break;
            case RefutationMethod::AddRandomCommonCause:
                out.push_back(refute_random_common_cause(pipeline, cohort, settings.replicates, s));
                break;
            case RefutationMethod::UnobservedCommonCause:
                out.push_back(refute_unobserved_common_cause(pipeline, cohort, settings.strengths,
                                                             settings.robustness_bound, s));
                break;
        }
    }
    return out;
}

Verdict aggregate_verdict(const std::vector<RefutationResult>& results) {
    for (const auto& r : results)
        if (r.verdict == Verdict::Failed) return Verdict::Failed;
    return Verdict::Passed;
}

}  // namespace cml::refutation
