#include <cmath>
#include <memory>

#include "doctest.h"

#include "cml/refutation/refute.hpp"
#include "cml/sim/scm.hpp"
#include "cml/util/error.hpp"
#include "cml/util/stats.hpp"
#include "fixtures.hpp"

using namespace cml;
using namespace cml::refutation;

namespace {

Pipeline linear_pipeline(const data::Cohort& c) {
    estimation::TreeParams p;
    return make_pipeline(std::make_shared<TLearnerAteEstimator>("T", "Y", p), c, "T", "Y", {"C"});
}

void check_verdict_rule(const RefutationResult& r) {
    if (r.p_value) {
        CHECK(*r.p_value >= 0.0);
        CHECK(*r.p_value <= 1.0);
        CHECK((r.verdict == Verdict::Failed) == (*r.p_value < kSignificance));
    }
}

}  // namespace

TEST_CASE("zero replicates and empty grids are rejected") {
    const auto c = sim::sample(fixture::linear_scm(), 300, 1);
    const auto p = make_pipeline(std::make_shared<ConstantEstimator>(1.0), c, "T", "Y", {"C"});
    CHECK_THROWS_AS(refute_placebo(p, c, 0, 1), RefutationError);
    CHECK_THROWS_AS(refute_subset(p, c, 0.8, 0, 1), RefutationError);
    CHECK_THROWS_AS(refute_random_common_cause(p, c, 0, 1), RefutationError);
    CHECK_THROWS_AS(refute_unobserved_common_cause(p, c, {}, 1.0, 1), RefutationError);
    CHECK_THROWS_AS(refute_subset(p, c, 0.0, 5, 1), RefutationError);
    CHECK_THROWS_AS(refute_subset(p, c, 1.2, 5, 1), RefutationError);
}

TEST_CASE("full subsets reproduce the original effect") {
    const auto c = sim::sample(fixture::linear_scm(), 600, 2);
    const auto p = linear_pipeline(c);
    const auto r = refute_subset(p, c, 1.0, 5, 3);
    for (double e : r.replicate_effects) CHECK(e == p.original_effect);
    CHECK(r.new_effect == p.original_effect);
    CHECK(r.verdict == Verdict::Passed);
}

TEST_CASE("a null unobserved cause changes nothing") {
    const auto c = sim::sample(fixture::linear_scm(), 600, 4);
    const auto p = linear_pipeline(c);
    const auto r = refute_unobserved_common_cause(p, c, {{0.0, 0.0}}, 1.0, 5);
    CHECK(r.new_effect == p.original_effect);
    CHECK(!r.p_value);
    CHECK(r.verdict == Verdict::Passed);
    REQUIRE(r.strengths.size() == 1);
    CHECK(r.strengths[0].new_effect == p.original_effect);
}

TEST_CASE("a strong unobserved cause breaches a tight bound") {
    const auto c = sim::sample(fixture::linear_scm(), 1500, 4);
    const auto p = linear_pipeline(c);
    const auto r = refute_unobserved_common_cause(p, c, {{0.0, 0.0}, {0.9, 20.0}}, 0.5, 5);
    CHECK(r.strengths.size() == 2);
    CHECK(r.verdict == Verdict::Failed);
    CHECK(std::abs(r.new_effect - p.original_effect) > 0.5);
}

TEST_CASE("a constant pipeline is undisturbed by a random cause") {
    const auto c = sim::sample(fixture::linear_scm(), 400, 6);
    const auto p = make_pipeline(std::make_shared<ConstantEstimator>(0.0), c, "T", "Y", {"C"});
    const auto r = refute_random_common_cause(p, c, 10, 7);
    CHECK(r.original_effect == 0.0);
    CHECK(r.new_effect == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("placebo flags a hard-coded nonzero estimate") {
    const auto c = sim::sample(fixture::linear_scm(), 400, 8);
    const auto p = make_pipeline(std::make_shared<ConstantEstimator>(5.0), c, "T", "Y", {"C"});
    const auto r = refute_placebo(p, c, 20, 9);
    CHECK(r.new_effect == 5.0);
    CHECK(*r.p_value < kSignificance);
    CHECK(r.verdict == Verdict::Failed);
}

TEST_CASE("refutations are deterministic per seed and satisfy the verdict rule") {
    const auto c = sim::sample(fixture::linear_scm(), 1000, 10);
    const auto p = linear_pipeline(c);
    RefutationSettings s;
    s.replicates = 8;
    const auto a = run_refutations(p, c, s, 99);
    const auto b = run_refutations(p, c, s, 99);
    CHECK(a == b);
    REQUIRE(a.size() == 4);
    CHECK(a[0].method == RefutationMethod::PlaceboTreatment);
    CHECK(a[3].method == RefutationMethod::UnobservedCommonCause);
    for (const auto& r : a) {
        check_verdict_rule(r);
        CHECK(r.p_value.has_value() == (r.method != RefutationMethod::UnobservedCommonCause));
        CHECK(refutation_from_json(to_json(r)) == r);
    }
    const auto other = run_refutations(p, c, s, 100);
    CHECK(!(other[0] == a[0]));
}

TEST_CASE("p-value follows the normal fit of the replicates") {
    const auto c = sim::sample(fixture::linear_scm(), 800, 12);
    const auto p = linear_pipeline(c);
    const auto r = refute_random_common_cause(p, c, 10, 13);
    const double m = stats::mean(r.replicate_effects);
    CHECK(r.new_effect == m);
    CHECK(*r.p_value == stats::normal_tail_p(p.original_effect, m, stats::sample_sd(r.replicate_effects)));
    const auto pl = refute_placebo(p, c, 10, 13);
    CHECK(*pl.p_value == stats::normal_tail_p(0.0, pl.new_effect, stats::sample_sd(pl.replicate_effects)));
}

TEST_CASE("method names and verdict aggregation") {
    for (auto m : {RefutationMethod::PlaceboTreatment, RefutationMethod::DataSubset,
                   RefutationMethod::AddRandomCommonCause, RefutationMethod::UnobservedCommonCause})
        CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_method("subset") == RefutationMethod::DataSubset);
    CHECK(display_name(RefutationMethod::PlaceboTreatment) == "Placebo treatment");
    CHECK_THROWS_AS(parse_method("bootstrap"), RefutationError);

    RefutationResult ok, bad;
    ok.verdict = Verdict::Passed;
    bad.verdict = Verdict::Failed;
    CHECK(aggregate_verdict({ok, ok}) == Verdict::Passed);
    CHECK(aggregate_verdict({ok, bad}) == Verdict::Failed);
}

TEST_CASE("placebo on a pure-noise outcome rarely fails") {
    auto scm = fixture::linear_scm(0.0);
    scm.set_coefficient("C", "Y", 0.0);
    int passed = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto c = sim::sample(scm, 300, 1000 + seed);
        const auto p = linear_pipeline(c);
        const auto r = refute_placebo(p, c, 20, seed);
        passed += *r.p_value >= kSignificance;
    }
    CHECK(passed >= 90);
}
