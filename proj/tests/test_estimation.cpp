#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "cml/estimation/boosting.hpp"
#include "cml/estimation/mediation.hpp"
#include "cml/estimation/tlearner.hpp"
#include "cml/util/error.hpp"
#include "fixtures.hpp"

using namespace cml;
using namespace cml::estimation;

namespace {

data::Cohort scaled_outcome(const data::Cohort& c, const std::string& y, double factor) {
    const auto col = c.column(y);
    std::vector<double> v(col.begin(), col.end());
    for (auto& x : v) x *= factor;
    return c.with_values(y, v);
}

data::Cohort swapped_treatment(const data::Cohort& c, const std::string& t) {
    const auto col = c.column(t);
    std::vector<double> v(col.begin(), col.end());
    for (auto& x : v) x = 1.0 - x;
    return c.with_values(t, v);
}

std::size_t leaf_samples_total(const RegressionTree& tree) {
    std::size_t s = 0;
    for (const auto& n : tree.nodes())
        if (n.is_leaf()) s += n.samples;
    return s;
}

}  // namespace

TEST_CASE("constant targets give empty trees and exact predictions") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(300, 3);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(300, 5.0);
    const auto m = fit_boosted_trees(x, y, {});
    CHECK(m.base_value == 5.0);
    for (const auto& t : m.trees) CHECK(t.nodes().size() == 1);
    const Eigen::VectorXd p = predict(m, x);
    for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == 5.0);
}

TEST_CASE("boosting approximates a linear function") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd x(1000, 1);
    Eigen::VectorXd y(1000);
    for (int i = 0; i < 1000; ++i) {
        x(i, 0) = u(rng);
        y(i) = 2.0 * x(i, 0);
    }
    const auto m = fit_boosted_trees(x, y, {});
    Eigen::MatrixXd grid(81, 1);
    for (int i = 0; i < 81; ++i) grid(i, 0) = 0.1 + 0.01 * i;
    const Eigen::VectorXd p = predict(m, grid);
    for (int i = 0; i < 81; ++i) CHECK(std::abs(p(i) - 2.0 * grid(i, 0)) <= 0.2);
}

TEST_CASE("too few rows to split predicts the mean") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, 2);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(50, 0.0, 49.0);
    const auto m = fit_boosted_trees(x, y, {});
    const Eigen::VectorXd p = predict(m, x);
    for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p(i) == doctest::Approx(24.5).epsilon(1e-12));
}

TEST_CASE("boosting input validation") {
    CHECK_THROWS_AS(fit_boosted_trees(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), {}), EstimationError);
    CHECK_THROWS_AS(fit_boosted_trees(Eigen::MatrixXd::Zero(10, 2), Eigen::VectorXd::Zero(9), {}), EstimationError);
    const auto m = fit_boosted_trees(Eigen::MatrixXd::Random(200, 2), Eigen::VectorXd::Random(200), {});
    CHECK_THROWS_AS(predict(m, Eigen::MatrixXd::Zero(3, 3)), EstimationError);
    TreeParams bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), EstimationError);
}

TEST_CASE("predict is order-equivariant and deterministic") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> e;
    Eigen::MatrixXd x(600, 3);
    Eigen::VectorXd y(600);
    for (int i = 0; i < 600; ++i) {
        for (int j = 0; j < 3; ++j) x(i, j) = e(rng);
        y(i) = x(i, 0) * x(i, 1) + std::sin(x(i, 2)) + 0.1 * e(rng);
    }
    const auto m = fit_boosted_trees(x, y, {});
    const Eigen::VectorXd p = predict(m, x);
    std::vector<int> perm(600);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd xp(600, 3);
    for (int i = 0; i < 600; ++i) xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd pp = predict(m, xp);
    for (int i = 0; i < 600; ++i) CHECK(pp(i) == p(perm[static_cast<std::size_t>(i)]));

    const auto again = fit_boosted_trees(x, y, {});
    CHECK(predict(again, x) == p);
}

TEST_CASE("structural audit: leaf sizes and depth") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> e;
    for (std::size_t min_child : {10u, 60u, 150u}) {
        Eigen::MatrixXd x(700, 4);
        Eigen::VectorXd y(700);
        for (int i = 0; i < 700; ++i) {
            for (int j = 0; j < 4; ++j) x(i, j) = e(rng);
            y(i) = 3.0 * (x(i, 0) > 0.3) + x(i, 1) * x(i, 2) + e(rng);
        }
        TreeParams params;
        params.min_child_samples = min_child;
        params.max_depth = 3;
        const auto m = fit_boosted_trees(x, y, params);
        for (const auto& t : m.trees) {
            CHECK(t.depth() <= params.max_depth);
            CHECK(leaf_samples_total(t) == 700);
            for (const auto& n : t.nodes()) {
                if (n.is_leaf()) CHECK(n.samples >= min_child);
                CHECK(n.depth <= params.max_depth);
            }
        }
    }
}

TEST_CASE("t-learner on study-sized arms") {
    data::Schema s{{"t", data::VarKind::Binary, data::Role::Treatment, "", {}},
                   {"y", data::VarKind::Continuous, data::Role::Outcome, "", {}},
                   {"w", data::VarKind::Continuous, data::Role::Covariate, "", {}}};
    std::vector<double> t, y, w;
    for (int i = 0; i < 48; ++i) {
        const bool treated = i < 22;
        t.push_back(treated ? 1.0 : 0.0);
        y.push_back(treated ? 70.0 + (i % 5) : 60.0 + (i % 7));
        w.push_back(i * 0.5);
    }
    const data::Cohort c(s, {t, y, w});
    const auto l = fit_t_learner(c, "t", "y", {"w"}, {});
    double m1 = 0, m0 = 0;
    for (int i = 0; i < 48; ++i) (i < 22 ? m1 : m0) += y[static_cast<std::size_t>(i)];
    m1 /= 22;
    m0 /= 26;
    CHECK(ate(l, c) == doctest::Approx(m1 - m0).epsilon(1e-12));

    std::vector<double> ones(48, 1.0);
    CHECK_THROWS_AS(fit_t_learner(c.with_values("t", ones), "t", "y", {"w"}, {}), EstimationError);
    CHECK_THROWS_AS(fit_t_learner(c, "t", "y", {"y"}, {}), EstimationError);
}

TEST_CASE("identical arm models give zero effects") {
    const data::Cohort c = sim::sample(fixture::linear_scm(), 800, 3);
    auto l = fit_t_learner(c, "T", "Y", {"C"}, {});
    l.mu1 = l.mu0;
    CHECK(ate(l, c) == 0.0);
    CHECK(nde(l, c, 0, 1) == 0.0);
    const auto r = mediation(l, c);
    CHECK(r.nde == 0.0);
}

TEST_CASE("ate on a linear SCM") {
    const data::Cohort c = sim::sample(fixture::linear_scm(), 5000, 17);
    const auto l = fit_t_learner(c, "T", "Y", {"C"}, {});
    CHECK(std::abs(ate(l, c) - 10.0) <= 1.0);
}

TEST_CASE("without mediators NDE and TE track the ATE") {
    // TE reduces to the arm-mean difference here, so the treatment is unconfounded
    const data::Cohort c = sim::sample(fixture::linear_scm(10.0, 0.0), 5000, 17);
    const auto r = mediation(fit_t_learner(c, "T", "Y", {"C"}, {}), c);
    CHECK(std::abs(r.ate - 10.0) <= 1.0);
    CHECK(std::abs(r.te - r.ate) <= 1.0);
    CHECK(std::abs(r.nde - r.ate) <= 1.0);
}

TEST_CASE("outcome-scale equivariance") {
    const data::Cohort c = sim::sample(fixture::linear_scm(), 2000, 5);
    const auto base = mediation(fit_t_learner(c, "T", "Y", {"C"}, {}), c);
    const auto two = mediation(fit_t_learner(scaled_outcome(c, "Y", 2.0), "T", "Y", {"C"}, {}), c);
    CHECK(two.ate == 2.0 * base.ate);
    CHECK(two.nde == 2.0 * base.nde);
    CHECK(two.nie == 2.0 * base.nie);
    CHECK(two.te == 2.0 * base.te);
    const auto three = mediation(fit_t_learner(scaled_outcome(c, "Y", 3.0), "T", "Y", {"C"}, {}), c);
    CHECK(three.ate == doctest::Approx(3.0 * base.ate).epsilon(1e-9));
    CHECK(three.te == doctest::Approx(3.0 * base.te).epsilon(1e-9));
}

TEST_CASE("label-swap antisymmetry") {
    const data::Cohort c = sim::sample(fixture::linear_scm(), 2000, 6);
    const data::Cohort s = swapped_treatment(c, "T");
    const double a = ate(fit_t_learner(c, "T", "Y", {"C"}, {}), c);
    const double b = ate(fit_t_learner(s, "T", "Y", {"C"}, {}), s);
    CHECK(b == -a);
}

TEST_CASE("mediation plug-ins match exact enumeration") {
    const auto d = fixture::binary_mediator();
    const auto truth = sim::oracle_mediation(d, 0, 1);
    const data::Cohort c = sim::sample(d, 20000, 2024);
    const auto l = fit_t_learner(c, "x", "y", {"z"}, {});
    const auto r = mediation(l, c, 0, 1);
    CHECK(std::abs(r.nde - truth.effects.nde) <= 0.05);
    CHECK(std::abs(r.nie - truth.effects.nie) <= 0.05);
    CHECK(std::abs(r.nie_reverse - truth.effects.nie_reverse) <= 0.05);
    CHECK(std::abs(r.te - truth.effects.te) <= 0.05);
    CHECK(r.te == total_effect(r.nde, r.nie_reverse));
}

TEST_CASE("outcome constant in the mediator gives zero indirect effect") {
    auto d = fixture::binary_mediator();
    d.outcome_mean = {{1.0, 1.0}, {4.0, 4.0}};
    d.outcome_noise_sd = 0.0;
    const data::Cohort c = sim::sample(d, 3000, 8);
    const auto l = fit_t_learner(c, "x", "y", {"z"}, {});
    CHECK(nie(l, c, 0, 1) == 0.0);
    CHECK(nde(l, c, 0, 1) == doctest::Approx(3.0).epsilon(1e-12));
}
