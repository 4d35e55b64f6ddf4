#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "cml/util/parallel.hpp"
#include "cml/util/random.hpp"
#include "cml/util/stats.hpp"
#include "oracles.hpp"

using namespace cml;

TEST_CASE("normal tail matches Simpson integration") {
    for (double z : {0.0, 0.3, 1.0, 1.959963984540054, 2.5, 4.0})
        CHECK(stats::two_sided_normal_p(z) == doctest::Approx(oracle::normal_two_sided_tail(z)).epsilon(1e-9));
    CHECK(stats::two_sided_normal_p(-1.0) == stats::two_sided_normal_p(1.0));
    CHECK(stats::normal_cdf(0.0) == 0.5);
}

TEST_CASE("normal_tail_p with zero spread") {
    CHECK(stats::normal_tail_p(3.0, 3.0, 0.0) == 1.0);
    CHECK(stats::normal_tail_p(0.0, 3.0, 0.0) == 0.0);
    CHECK(stats::normal_tail_p(0.0, 0.0, 1.0) == 1.0);
    CHECK(stats::normal_tail_p(1.96, 0.0, 1.0) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("mean and sample sd") {
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(stats::mean(v) == 2.5);
    CHECK(stats::sample_sd(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(stats::sample_sd(std::vector<double>{7}) == 0.0);
}

TEST_CASE("logit inverts sigmoid") {
    for (double p : {0.01, 0.46, 0.5, 0.979}) CHECK(stats::sigmoid(stats::logit(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("derive_seed is stable and tag-sensitive") {
    CHECK(derive_seed(7, "placebo", 3) == derive_seed(7, "placebo", 3));
    CHECK(derive_seed(7, "placebo", 3) != derive_seed(7, "placebo", 4));
    CHECK(derive_seed(7, "placebo", 3) != derive_seed(7, "subset", 3));
    CHECK(derive_seed(7, "placebo", 3) != derive_seed(8, "placebo", 3));
}

TEST_CASE("parallel_for visits each index once and rethrows the lowest failure") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);

    try {
        parallel_for(50, [](std::size_t i) {
            if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
}
