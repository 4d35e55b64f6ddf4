// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include <fmt/core.h>

#include "cml/app/config.hpp"
#include "cml/app/stages.hpp"
#include "cml/data/cohort.hpp"
#include "cml/discovery/fisher_z.hpp"
#include "cml/discovery/ges.hpp"
#include "cml/discovery/pc.hpp"
#include "cml/discovery/score.hpp"
#include "cml/estimation/boosting.hpp"
#include "cml/estimation/mediation.hpp"
#include "cml/estimation/tlearner.hpp"
#include "cml/graph/algorithms.hpp"
#include "cml/refutation/refute.hpp"
#include "cml/sim/discrete.hpp"
#include "cml/sim/study_template.hpp"
#include "cml/util/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cml;
using graph::Dag;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / fmt::format("cml_accept_{}_{}", name, ::getpid());
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

data::Cohort to_cohort(const Eigen::MatrixXd& m, const std::vector<std::string>& names) {
    data::Schema schema;
    std::vector<std::vector<double>> cols;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        schema.push_back({names[static_cast<std::size_t>(j)], data::VarKind::Continuous, data::Role::Covariate, "", {}});
        cols.emplace_back(m.col(j).data(), m.col(j).data() + m.rows());
    }
    return data::Cohort(schema, cols);
}

refutation::Pipeline linear_pipeline(const data::Cohort& c) {
    return refutation::make_pipeline(std::make_shared<refutation::TLearnerAteEstimator>("T", "Y", estimation::TreeParams{}),
                                     c, "T", "Y", {"C"});
}

Outcome mediation_oracle() {
    const auto d = fixture::binary_mediator();
    const auto o = sim::oracle_mediation(d, 0, 1);
    const bool exact = std::abs(o.effects.nde - 2.0) <= 1e-9 && std::abs(o.effects.nie_reverse + 1.8) <= 1e-9 &&
                       std::abs(o.effects.te - 3.8) <= 1e-9 && std::abs(o.do_y_x_prime - 4.4) <= 1e-12 &&
                       std::abs(o.do_y_x - 0.6) <= 1e-12 && o.effects.te == o.do_te && o.effects.te == 4.4 - 0.6;
    const auto c = sim::sample(d, 20000, 1);
    const auto l = estimation::fit_t_learner(c, "x", "y", {"z"}, {});
    const auto m = estimation::mediation(l, c, 0, 1);
    const double worst = std::max({std::abs(m.nde - o.effects.nde), std::abs(m.nie - o.effects.nie),
                                   std::abs(m.nie_reverse - o.effects.nie_reverse), std::abs(m.te - o.effects.te)});
    return {exact && worst <= 0.05,
            fmt::format("oracle NDE {:.3f} NIE(1,0) {:.3f} TE {:.3f} do {:.1f}-{:.1f}; plug-in max error {:.4f}",
                        o.effects.nde, o.effects.nie_reverse, o.effects.te, o.do_y_x_prime, o.do_y_x, worst)};
}

Outcome graph_recovery() {
    const std::vector<std::pair<std::string, Dag>> shapes{
        {"chain", Dag({"X", "Z", "Y"}, {{"X", "Z"}, {"Z", "Y"}})},
        {"fork", Dag({"X", "Z", "Y"}, {{"Z", "X"}, {"Z", "Y"}})},
        {"collider", Dag({"X", "Z", "Y"}, {{"X", "Z"}, {"Y", "Z"}})},
    };
    bool pass = true;
    std::string detail;
    for (const auto& [name, dag] : shapes) {
        const auto truth = graph::cpdag_of(dag);
        int pc_ok = 0, ges_ok = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto c = data::standardize(to_cohort(oracle::linear_gaussian_data(dag, 50000, 100 + seed), dag.nodes())).cohort;
            pc_ok += discovery::pc(c, {}).graph == truth;
            ges_ok += discovery::ges(c, {}).graph == truth;
        }
        pass = pass && pc_ok >= 9 && ges_ok >= 9;
        detail += fmt::format("{} pc {}/10 ges {}/10; ", name, pc_ok, ges_ok);
    }
    return {pass, detail};
}

Outcome perfect_oracle_pc() {
    std::mt19937_64 rng(2024);
    discovery::DiscoveryConfig cfg;
    cfg.max_cond_size = 5;
    int ok = 0;
    for (int i = 0; i < 100; ++i) {
        const Dag d = oracle::random_dag(2 + static_cast<std::size_t>(i % 4), 0.5, rng);
        ok += discovery::pc(d.nodes(), discovery::DSeparationOracle(d), cfg).graph == oracle::cpdag_by_enumeration(d);
    }
    return {ok == 100, fmt::format("{}/100 CPDAGs recovered", ok)};
}

Outcome study_replication() {
    const fs::path root = scratch("study");
    int ok = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        app::SimulateOptions opts;
        opts.n = 5000;
        opts.seed = seed;
        opts.out = root / fmt::format("sim{}", seed);
        app::cmd_simulate(opts);
        bool seed_ok = true;
        double worst_ate = 0.0, worst_te = 0.0;
        for (const char* tp : {"week15", "week34", "postpartum12"}) {
            auto cfg = app::load_config(opts.out / fmt::format("config_{}.json", tp));
            cfg.out = opts.out / fmt::format("run_{}", tp);
            const auto data = app::load_analysis_data(cfg);
            const auto found = app::discover(data, cfg);
            const auto edited = app::edit(found.graph, cfg);
            const auto est = app::estimate(data, edited.graph, cfg, app::stage_seed(cfg.seed, "estimate"));
            const double ate_err = std::abs(est.at("ate").get<double>() - sim::kTemplatePhysicalEffect) / sim::kTemplatePhysicalEffect;
            const double te_err = std::abs(est.at("te").get<double>() - sim::kTemplatePhysicalEffect) / sim::kTemplatePhysicalEffect;
            worst_ate = std::max(worst_ate, ate_err);
            worst_te = std::max(worst_te, te_err);
            seed_ok = seed_ok && ate_err <= 0.15 && te_err <= 0.20;
        }
        ok += seed_ok;
        detail += fmt::format("s{} {:.0f}%/{:.0f}% ", seed, 100 * worst_ate, 100 * worst_te);
    }
    fs::remove_all(root);
    return {ok >= 8, fmt::format("{}/10 seeds within tolerance on all timepoints (worst ATE/TE error: {})", ok, detail)};
}

Outcome refutation_behaviour() {
    int placebo = 0, subset = 0, random_cause = 0, unobserved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c = sim::sample(fixture::linear_scm(), 5000, 500 + seed);
        const auto p = linear_pipeline(c);
        const auto pl = refutation::refute_placebo(p, c, 100, derive_seed(seed, "placebo"));
        placebo += *pl.p_value >= 0.05 && std::abs(pl.new_effect) <= 1.0;
        const auto sb = refutation::refute_subset(p, c, 0.8, 100, derive_seed(seed, "subset"));
        subset += *sb.p_value >= 0.05 && std::abs(sb.new_effect - p.original_effect) <= 1.5;
        const auto rc = refutation::refute_random_common_cause(p, c, 100, derive_seed(seed, "random"));
        random_cause += *rc.p_value >= 0.05 && std::abs(rc.new_effect - p.original_effect) <= 1.5;
        const auto uc = refutation::refute_unobserved_common_cause(p, c, {{0.0, 5.0}}, 1.0, derive_seed(seed, "unobserved"));
        unobserved += std::abs(uc.new_effect - p.original_effect) <= 1.0;
    }
    return {placebo >= 9 && subset >= 9 && random_cause >= 9 && unobserved >= 9,
            fmt::format("placebo {}/10, subset {}/10, random cause {}/10, unobserved {}/10", placebo, subset,
                        random_cause, unobserved)};
}

Outcome refutation_sensitivity() {
    int flagged = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c = sim::sample(fixture::linear_scm(), 2000, 900 + seed);
        const auto p = refutation::make_pipeline(std::make_shared<refutation::ConstantEstimator>(4.2), c, "T", "Y", {"C"});
        flagged += *refutation::refute_placebo(p, c, 100, seed).p_value < 0.05;
    }
    return {flagged >= 9, fmt::format("constant estimator flagged in {}/10 seeds", flagged)};
}

Outcome invariants() {
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) failed.emplace_back(what);
    };

    std::mt19937_64 rng(7);
    bool dsep = true;
    for (int g = 0; g < 200; ++g) {
        const Dag d = oracle::random_dag(3 + static_cast<std::size_t>(g % 4), 0.4, rng);
        const auto adj = oracle::adjacency(d);
        const std::size_t n = d.size();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                for (unsigned mask = 0; mask < (1u << n); ++mask) {
                    if (mask & ((1u << a) | (1u << b))) continue;
                    graph::NodeSet z;
                    for (std::size_t v = 0; v < n; ++v)
                        if (mask & (1u << v)) z.push_back(v);
                    dsep = dsep && graph::d_separated(d, a, b, z) == oracle::d_separated_by_paths(adj, a, b, z);
                }
    }
    expect(dsep, "d-separation");

    bool decomposable = true, monotone = true;
    for (int t = 0; t < 10; ++t) {
        const Dag d = oracle::random_dag(5, 0.5, rng);
        const auto c = data::standardize(to_cohort(oracle::linear_gaussian_data(d, 1000, 40 + t), d.nodes())).cohort;
        const discovery::GaussianBicScore s(c.matrix(c.names()), 1.0);
        double sum = 0.0;
        for (graph::NodeId v = 0; v < 5; ++v) sum += s.local(v, d.parents(v));
        decomposable = decomposable && std::abs(s.total(d) - sum) <= 1e-9 * std::abs(sum);
        const auto r = discovery::ges(c, {});
        for (std::size_t k = 1; k < r.forward_scores.size(); ++k) monotone = monotone && r.forward_scores[k] > r.forward_scores[k - 1];
        for (std::size_t k = 1; k < r.backward_scores.size(); ++k) monotone = monotone && r.backward_scores[k] > r.backward_scores[k - 1];
    }
    expect(decomposable, "BIC decomposability");
    expect(monotone, "GES phase monotonicity");

    const auto c = sim::sample(fixture::linear_scm(), 2000, 3);
    const double base = estimation::ate(estimation::fit_t_learner(c, "T", "Y", {"C"}, {}), c);
    std::vector<double> y(c.column("Y").begin(), c.column("Y").end()), t(c.column("T").begin(), c.column("T").end());
    for (auto& v : y) v *= 2.0;
    for (auto& v : t) v = 1.0 - v;
    const auto scaled = c.with_values("Y", y);
    expect(estimation::ate(estimation::fit_t_learner(scaled, "T", "Y", {"C"}, {}), scaled) == 2.0 * base, "scale equivariance");
    const auto swapped = c.with_values("T", t);
    expect(estimation::ate(estimation::fit_t_learner(swapped, "T", "Y", {"C"}, {}), swapped) == -base, "label swap");

    const auto cov = data::covariance_matrix(data::standardize(sim::sample(sim::study_template(), 3000, 4)
                                                                   .select_columns(std::vector<std::string>{"age", "bmi", "steps", "epds"}))
                                                 .cohort);
    expect((cov.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12, "unit diagonal");

    estimation::TreeParams params;
    Eigen::MatrixXd x = c.matrix(std::vector<std::string>{"C", "T"});
    Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(c.column("Y").data(), static_cast<Eigen::Index>(c.rows()));
    bool audit = true;
    for (const auto& tree : estimation::fit_boosted_trees(x, target, params).trees)
        for (const auto& node : tree.nodes())
            audit = audit && (!node.is_leaf() || node.samples >= params.min_child_samples) && node.depth <= params.max_depth;
    expect(audit, "min_child_samples audit");

    const fs::path root = scratch("rerun");
    std::string first;
    bool identical = true;
    for (int run = 0; run < 2; ++run) {
        app::SimulateOptions opts;
        opts.n = 800;
        opts.seed = 11;
        opts.out = root / "sim";
        app::cmd_simulate(opts);
        auto cfg = app::load_config(opts.out / "config_week15.json");
        cfg.refutation.replicates = 5;
        app::cmd_pipeline(cfg);
        std::string bytes;
        for (const char* f : {"cohort_week15.csv", "manifest.json"}) bytes += slurp(opts.out / f);
        for (const char* f : {"graph.dot", "graph_edited.dot", "discovery.json", "estimate.json", "refute.json", "report.md"})
            bytes += slurp(cfg.out / f);
        if (run == 0)
            first = bytes;
        else
            identical = bytes == first;
    }
    fs::remove_all(root);
    expect(identical, "byte-identical reruns");

    std::string detail = failed.empty() ? "all suites hold" : "violated:";
    for (const auto& f : failed) detail += " " + f;
    return {failed.empty(), detail};
}

Outcome report_fidelity() {
    const fs::path root = scratch("report");
    for (const char* f : {"config.json", "estimate.json", "refute.json"})
        fs::copy_file(fs::path(CML_FIXTURE_DIR) / "report_week15" / f, root / f);
    const std::string md = slurp(app::cmd_report(root));
    fs::remove_all(root);
    const bool row = md.find("| Placebo treatment | 10.08 | 0.48 | 0.38 |") != std::string::npos;
    const bool dash = md.find("| Unobserved random cause | 10.08 | 10.04 | — |") != std::string::npos;
    return {row && dash, fmt::format("placebo row {}, unobserved dash {}", row ? "found" : "missing", dash ? "found" : "missing")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "mediation oracle equivalence", 10, mediation_oracle},
        {2, "graph recovery (PC, GES)", 60, graph_recovery},
        {3, "perfect-oracle PC completeness", 30, perfect_oracle_pc},
        {4, "synthetic study replication", 300, study_replication},
        {5, "refutation behaviour on valid data", 600, refutation_behaviour},
        {6, "refutation sensitivity (negative control)", 0, refutation_sensitivity},
        {7, "invariant suites", 0, invariants},
        {8, "report fidelity", 0, report_fidelity},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::cout << fmt::format("{} [{}] {}: {} ({:.1f} s{})", pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs,
                                 c.limit_s > 0 ? fmt::format(", limit {:.0f} s", c.limit_s) : "")
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
