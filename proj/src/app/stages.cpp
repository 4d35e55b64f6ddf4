#include "cml/app/stages.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "cml/data/activity.hpp"
#include "cml/data/qol_band.hpp"
#include "cml/discovery/ges.hpp"
#include "cml/discovery/pc.hpp"
#include "cml/estimation/mediation.hpp"
#include "cml/graph/algorithms.hpp"
#include "cml/graph/dot.hpp"
#include "cml/graph/identify.hpp"
#include "cml/sim/scm.hpp"
#include "cml/sim/study_template.hpp"
#include "cml/util/error.hpp"
#include "cml/util/random.hpp"

namespace cml::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) { return derive_seed(seed, stage); }

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json edge_lists(const graph::Cpdag& g) {
    json directed = json::array(), undirected = json::array();
    for (auto [a, b] : g.directed_edges()) directed.push_back({g.name(a), g.name(b)});
    for (auto [a, b] : g.undirected_edges()) undirected.push_back({g.name(a), g.name(b)});
    return {{"directed", directed}, {"undirected", undirected}};
}

/// Two decimals, without a "-0.00".
std::string fixed2(double v) {
    std::string s = fmt::format("{:.2f}", v);
    return s == "-0.00" ? "0.00" : s;
}

std::string path_text(const graph::Dag& g, const std::vector<graph::NodeId>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += g.has_edge(path[i - 1], path[i]) ? " -> " : " <- ";
        out += g.name(path[i]);
    }
    return out;
}

}  // namespace

AnalysisData load_analysis_data(const PipelineConfig& cfg) {
    const data::Schema schema = data::load_schema(cfg.schema);
    data::Cohort cohort = data::load_cohort(cfg.cohort, schema, cfg.timepoint).cohort.with_roles(cfg.roles);
    const std::string treatment = cohort.single_role(data::Role::Treatment);
    const std::string outcome = cohort.single_role(data::Role::Outcome);
    if (cfg.daily_activity) {
        const auto records = data::load_daily_activity(*cfg.daily_activity);
        cohort = data::assign_activity_treatment(cohort, records, cfg.participant_column, treatment,
                                                 cfg.activity_threshold, cfg.activity_window);
    }

    std::vector<std::string> analysis;
    for (const auto& var : cohort.schema())
        if (var.role != data::Role::Auxiliary) analysis.push_back(var.name);

    std::vector<std::string> required = analysis;
    if (cfg.regime_column) {
        if (!cohort.find(*cfg.regime_column)) throw ConfigError("unknown regime column " + *cfg.regime_column);
        if (std::find(analysis.begin(), analysis.end(), *cfg.regime_column) != analysis.end())
            throw ConfigError("the regime column must have the auxiliary role");
        required.push_back(*cfg.regime_column);
    }
    auto dropped = data::drop_incomplete(cohort, required);

    AnalysisData out{std::move(dropped.cohort), std::move(analysis), treatment, outcome, dropped.dropped, {}};
    if (cfg.regime_column) {
        for (double v : out.cohort.column(*cfg.regime_column)) {
            if (v < 0 || v != std::floor(v)) throw ConfigError("regime values must be non-negative integers");
            out.regimes.push_back(static_cast<std::size_t>(v));
        }
    }
    return out;
}

DiscoverOutput discover(const AnalysisData& data, const PipelineConfig& cfg) {
    const data::Cohort sub = data::standardize(data.cohort.select_columns(data.analysis_columns)).cohort;
    json diagnostics;
    graph::Cpdag g;
    switch (cfg.algorithm) {
        case Algorithm::Pc: {
            auto r = discovery::pc(sub, cfg.discovery);
            json sepsets = json::array();
            for (const auto& [pair, set] : r.sepsets)
                sepsets.push_back({{"pair", {r.graph.name(pair.first), r.graph.name(pair.second)}},
                                   {"separating_set", r.graph.names_of(set)}});
            diagnostics = {{"tests_run", r.tests_run}, {"removed_edges", r.sepsets.size()}, {"sepsets", sepsets}};
            g = std::move(r.graph);
            break;
        }
        case Algorithm::Ges:
        case Algorithm::Gies: {
            auto r = cfg.algorithm == Algorithm::Ges ? discovery::ges(sub, cfg.discovery)
                                                     : discovery::gies(sub, cfg.discovery, data.regimes);
            diagnostics = {{"score", r.score},
                           {"forward_steps", r.forward_scores.size() - 1},
                           {"backward_steps", r.backward_scores.size() - 1}};
            g = std::move(r.graph);
            break;
        }
    }
    // conflicting v-structures can leave PC with a directed cycle
    diagnostics["directed_cycle"] = g.has_directed_cycle();
    json manifest{{"algorithm", to_string(cfg.algorithm)},
                  {"config",
                   {{"alpha", cfg.discovery.alpha},
                    {"max_cond_size", cfg.discovery.max_cond_size},
                    {"bic_penalty", cfg.discovery.bic_penalty},
                    {"intervention_targets", cfg.discovery.intervention_targets}}},
                  {"timepoint", data::to_string(data.cohort.timepoint())},
                  {"rows", data.cohort.rows()},
                  {"dropped_rows", data.dropped},
                  {"nodes", g.nodes()},
                  {"edges", edge_lists(g)},
                  {"diagnostics", diagnostics}};
    return {std::move(g), std::move(manifest)};
}

EditOutput edit(const graph::Cpdag& discovered, const PipelineConfig& cfg, const graph::EditScript& script) {
    EditOutput out{discovered, {}};
    if (cfg.expert_graph) {
        const auto any = graph::load_graph(*cfg.expert_graph);
        if (!std::holds_alternative<graph::Dag>(any))
            throw ConfigError("expert graph must be a directed graph (digraph)");
        const graph::Dag expert = graph::induced_subgraph(std::get<graph::Dag>(any), discovered.nodes());
        out.applied = graph::edits_toward(discovered, expert);
        out.graph = graph::apply_edits(out.graph, out.applied);
    }
    out.graph = graph::apply_edits(out.graph, script);
    out.applied.insert(out.applied.end(), script.begin(), script.end());
    return out;
}

json estimate(const AnalysisData& data, const graph::Cpdag& g, const PipelineConfig& cfg, std::uint64_t seed) {
    if (!g.find(data.treatment) || !g.find(data.outcome))
        throw EstimationError("graph must contain the treatment and the outcome");
    const graph::Dag dag = graph::extend_to_dag(g);
    const auto t = dag.index_of(data.treatment), y = dag.index_of(data.outcome);
    const auto bd = graph::backdoor_set(dag, t, y);
    if (!bd.verified) {
        std::string msg = "identification failed: backdoor paths remain open";
        for (const auto& p : bd.open_paths) msg += "; " + path_text(dag, p);
        if (bd.open_paths.empty()) msg += "; the outcome is a parent of the treatment";
        throw EstimationError(msg);
    }
    const auto adjustment = dag.names_of(bd.adjustment);
    const auto mediator_names = dag.names_of(graph::mediators(dag, t, y));
    auto mediation_features = mediator_names;
    mediation_features.insert(mediation_features.end(), adjustment.begin(), adjustment.end());

    const auto ate_learner = estimation::fit_t_learner(data.cohort, data.treatment, data.outcome, adjustment, cfg.tree, seed);
    const double ate = estimation::ate(ate_learner, data.cohort);
    const double baseline = estimation::arm_predictions(ate_learner, data.cohort, 0).mean();
    const auto med_learner =
        mediator_names.empty()
            ? ate_learner
            : estimation::fit_t_learner(data.cohort, data.treatment, data.outcome, mediation_features, cfg.tree, seed);
    const auto med = estimation::mediation(med_learner, data.cohort, cfg.x, cfg.x_prime);

    return json{{"timepoint", data::to_string(data.cohort.timepoint())},
                {"treatment", data.treatment},
                {"outcome", data.outcome},
                {"rows", data.cohort.rows()},
                {"dropped_rows", data.dropped},
                {"graph", graph::serialize_graph(dag, "estimation")},
                {"adjustment", adjustment},
                {"mediators", mediator_names},
                {"ate", ate},
                {"nde", med.nde},
                {"nie", med.nie},
                {"nie_reverse", med.nie_reverse},
                {"te", med.te},
                {"transition", {cfg.x, cfg.x_prime}},
                {"baseline_mean", baseline},
                {"params",
                 {{"max_depth", cfg.tree.max_depth},
                  {"min_child_samples", cfg.tree.min_child_samples},
                  {"n_trees", cfg.tree.n_trees},
                  {"learning_rate", cfg.tree.learning_rate}}},
                {"seed", seed}};
}

json refute(const AnalysisData& data, const json& estimate_record, const PipelineConfig& cfg, std::uint64_t seed) {
    try {
        const auto treatment = estimate_record.at("treatment").get<std::string>();
        const auto outcome = estimate_record.at("outcome").get<std::string>();
        const auto features = estimate_record.at("adjustment").get<std::vector<std::string>>();
        const auto fit_seed = estimate_record.at("seed").get<std::uint64_t>();
        auto estimator = std::make_shared<refutation::TLearnerAteEstimator>(treatment, outcome, cfg.tree, fit_seed);
        const auto pipeline = refutation::make_pipeline(estimator, data.cohort, treatment, outcome, features);
        const auto results = refutation::run_refutations(pipeline, data.cohort, cfg.refutation, seed);
        json rows = json::array();
        for (const auto& r : results) rows.push_back(refutation::to_json(r));
        return json{{"timepoint", estimate_record.value("timepoint", std::string())},
                    {"treatment", treatment},
                    {"outcome", outcome},
                    {"original_effect", pipeline.original_effect},
                    {"results", rows},
                    {"verdict", refutation::to_string(refutation::aggregate_verdict(results))},
                    {"seed", seed}};
    } catch (const json::exception& e) {
        throw RefutationError(std::string("malformed estimation record: ") + e.what());
    }
}

std::string render_report(const json& est, const json& ref, const std::string& digest) {
    try {
        std::string out = "# Causal effect validation\n\n";
        out += fmt::format("Timepoint: {}\n", est.value("timepoint", std::string("unknown")));
        out += fmt::format("Treatment: {}\n", est.at("treatment").get<std::string>());
        out += fmt::format("Outcome: {}\n\n", est.at("outcome").get<std::string>());
        out += "| Method | Estimated effect | New estimated effect | p-value |\n";
        out += "|---|---|---|---|\n";
        for (const auto& jr : ref.at("results")) {
            const auto r = refutation::refutation_from_json(jr);
            out += fmt::format("| {} | {} | {} | {} |\n", refutation::display_name(r.method), fixed2(r.original_effect),
                               fixed2(r.new_effect), r.p_value ? fixed2(*r.p_value) : std::string("—"));
        }
        out += "\n";
        const double ate = est.at("ate").get<double>();
        out += fmt::format("Effects: ATE {}, NDE {}, NIE {}, TE {}\n", fixed2(ate), fixed2(est.value("nde", 0.0)),
                           fixed2(est.value("nie", 0.0)), fixed2(est.value("te", 0.0)));
        if (est.contains("baseline_mean")) {
            const double before = est.at("baseline_mean").get<double>();
            const double after = before + ate;
            if (before >= 0.0 && before <= 100.0 && after >= 0.0 && after <= 100.0)
                out += fmt::format("QoL band: {} → {} ({} → {})\n", data::label(data::qol_band(before)),
                                   data::label(data::qol_band(after)), fixed2(before), fixed2(after));
            else
                out += "QoL band: not applicable (outside the 0-100 scale)\n";
        }
        out += fmt::format("Aggregate verdict: {}\n", ref.value("verdict", std::string("unknown")));
        out += fmt::format("Manifest digest (SHA-256): {}\n", digest);
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed report inputs: ") + e.what());
    }
}

std::string digest_files(const std::vector<fs::path>& files) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 unavailable");
    }
    for (const auto& f : files) {
        if (!fs::exists(f)) continue;
        const std::string bytes = read_text(f);
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

namespace {

void prepare_run_dir(const PipelineConfig& cfg) {
    fs::create_directories(cfg.out);
    write_json(cfg.out / "config.json", config_to_json(cfg));
}

graph::EditScript configured_script(const PipelineConfig& cfg) {
    if (!cfg.edits) return {};
    return graph::parse_edit_script(read_text(*cfg.edits));
}

graph::Cpdag discovered_graph(const PipelineConfig& cfg) {
    const fs::path p = cfg.out / "graph.dot";
    if (!fs::exists(p)) throw ConfigError("missing " + p.string() + ": run discover first");
    return graph::as_cpdag(graph::load_graph(p));
}

/// Shared by edit and estimate so both see the same edited graph.
graph::Cpdag edited_graph(const PipelineConfig& cfg) {
    const auto result = edit(discovered_graph(cfg), cfg, configured_script(cfg));
    write_text(cfg.out / "edits.txt", graph::format_edit_script(result.applied));
    write_text(cfg.out / "graph_edited.dot", graph::serialize_graph(result.graph, "edited"));
    return result.graph;
}

}  // namespace

void cmd_discover(const PipelineConfig& cfg) {
    prepare_run_dir(cfg);
    const auto data = load_analysis_data(cfg);
    const auto out = discover(data, cfg);
    write_text(cfg.out / "graph.dot", graph::serialize_graph(out.graph, "discovered"));
    write_json(cfg.out / "discovery.json", out.manifest);
}

void cmd_edit(const PipelineConfig& cfg) {
    prepare_run_dir(cfg);
    edited_graph(cfg);
}

void cmd_estimate(const PipelineConfig& cfg) {
    prepare_run_dir(cfg);
    const auto g = edited_graph(cfg);
    const auto data = load_analysis_data(cfg);
    write_json(cfg.out / "estimate.json", estimate(data, g, cfg, stage_seed(cfg.seed, "estimate")));
}

refutation::Verdict cmd_refute(const PipelineConfig& cfg) {
    const fs::path est = cfg.out / "estimate.json";
    if (!fs::exists(est)) throw RefutationError("missing estimation artifacts: " + est.string());
    prepare_run_dir(cfg);
    const auto data = load_analysis_data(cfg);
    const json record = refute(data, read_json(est), cfg, stage_seed(cfg.seed, "refute"));
    write_json(cfg.out / "refute.json", record);
    return refutation::parse_verdict(record.at("verdict").get<std::string>());
}

fs::path cmd_report(const fs::path& run_dir) {
    const fs::path est = run_dir / "estimate.json", ref = run_dir / "refute.json";
    if (!fs::exists(est) || !fs::exists(ref))
        throw ConfigError("report needs estimate.json and refute.json in " + run_dir.string());
    const std::string digest = digest_files({run_dir / "config.json", est, ref});
    const fs::path out = run_dir / "report.md";
    write_text(out, render_report(read_json(est), read_json(ref), digest));
    return out;
}

refutation::Verdict cmd_pipeline(const PipelineConfig& cfg) {
    cmd_discover(cfg);
    cmd_estimate(cfg);
    const auto verdict = cmd_refute(cfg);
    cmd_report(cfg.out);
    return verdict;
}

namespace {

constexpr data::Timepoint kTimepoints[] = {data::Timepoint::GestWeek15, data::Timepoint::GestWeek34,
                                           data::Timepoint::Postpartum12};

/// Mondays, so every recorded week is complete.
constexpr std::chrono::year_month_day kActivityStart[] = {
    std::chrono::year{2021} / std::chrono::January / 4, std::chrono::year{2021} / std::chrono::May / 3,
    std::chrono::year{2021} / std::chrono::September / 6};

/// Daily minutes that classify each participant exactly as their treatment value.
std::vector<data::DailyActivityRecord> synthetic_activity(const data::Cohort& cohort, const std::string& treatment,
                                                          std::chrono::year_month_day start, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> active_minutes(25.0, 45.0), low_minutes(0.0, 20.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    const auto t = cohort.column(treatment);
    const auto steps = cohort.find("steps"), met = cohort.find("average_met");
    std::vector<data::DailyActivityRecord> out;
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
        for (int day = 0; day < 28; ++day) {
            data::DailyActivityRecord rec;
            rec.participant_id = std::to_string(r + 1);
            rec.date = std::chrono::sys_days(start) + std::chrono::days(day);
            rec.medium_intensity_minutes = std::round((t[r] == 1.0 ? active_minutes(rng) : low_minutes(rng)) * 10.0) / 10.0;
            rec.steps = std::max(0.0, std::round((steps ? cohort.at(r, *steps) : 6500.0) + 500.0 * jitter(rng)));
            rec.average_met = std::max(1.0, std::round(((met ? cohort.at(r, *met) : 1.5) + 0.05 * jitter(rng)) * 1000.0) / 1000.0);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

void cmd_simulate(const SimulateOptions& opts) {
    const sim::Scm scm = opts.scm ? sim::load_scm(*opts.scm) : sim::study_template(opts.overrides);
    if (opts.scm && !opts.overrides.empty()) throw UsageError("overrides only apply to the study template");
    if (opts.n == 0) throw UsageError("--n must be at least 1");
    fs::create_directories(opts.out);

    std::string treatment;
    for (const auto& node : scm.nodes())
        if (node.role == data::Role::Treatment) {
            if (!treatment.empty()) throw ScmError("SCM must have exactly one treatment node");
            treatment = node.name;
        }
    if (treatment.empty()) throw ScmError("SCM must have exactly one treatment node");

    data::Schema schema{{"participant_id", data::VarKind::Continuous, data::Role::Auxiliary, "id", {}}};
    for (const auto& var : scm.schema()) schema.push_back(var);
    write_json(opts.out / "schema.json", data::schema_to_json(schema));
    write_json(opts.out / "scm.json", sim::scm_to_json(scm));
    write_text(opts.out / "template.dot", graph::serialize_graph(scm.graph(), "template"));

    json truth = json::object();
    const graph::Dag g = scm.graph();
    const auto t = g.index_of(treatment);
    for (const auto& node : scm.nodes()) {
        const bool outcome_like = node.role == data::Role::Outcome || node.role == data::Role::Auxiliary;
        if (!outcome_like || node.mechanism.kind != sim::MechanismKind::LinearGaussian) continue;
        const auto effect = sim::true_ate(scm, treatment, node.name, 200000, stage_seed(opts.seed, "truth"));
        const double direct = sim::direct_coefficient(scm, treatment, node.name);
        json entry{{"ate", effect.value}, {"te", effect.value}, {"exact", effect.exact}};
        if (effect.exact) {
            entry["nde"] = direct;
            entry["nie"] = effect.value - direct;
        } else {
            entry["std_error"] = effect.std_error;
        }
        entry["reachable"] = g.reachable(t, g.index_of(node.name));
        truth[node.name] = entry;
    }

    json files = json::array();
    std::uint64_t index = 0;
    for (const auto tp : kTimepoints) {
        const std::string tag(data::to_string(tp));
        const data::Cohort sampled = sim::sample(scm, opts.n, derive_seed(opts.seed, "simulate", index), tp);
        std::vector<std::vector<double>> cols;
        std::vector<double> ids(opts.n);
        for (std::size_t r = 0; r < opts.n; ++r) ids[r] = static_cast<double>(r + 1);
        cols.push_back(std::move(ids));
        for (std::size_t c = 0; c < sampled.cols(); ++c) {
            const auto col = sampled.column(c);
            cols.emplace_back(col.begin(), col.end());
        }
        const data::Cohort cohort(schema, std::move(cols), tp);
        const std::string csv = "cohort_" + tag + ".csv";
        data::write_cohort(opts.out / csv, cohort);
        files.push_back(csv);

        json run_cfg{{"seed", opts.seed},
                     {"data", {{"cohort", csv}, {"schema", "schema.json"}, {"timepoint", tag}}},
                     {"expert_graph", "template.dot"},
                     {"out", "run_" + tag}};
        if (opts.daily_activity) {
            const std::string act = "daily_activity_" + tag + ".csv";
            const auto start = kActivityStart[index];
            std::ofstream out(opts.out / act, std::ios::binary);
            const auto records = synthetic_activity(cohort, treatment, start, derive_seed(opts.seed, "activity", index));
            data::write_daily_activity(out, records);
            run_cfg["data"]["daily_activity"] = act;
            files.push_back(act);
        }
        write_json(opts.out / ("config_" + tag + ".json"), run_cfg);
        ++index;
    }
    write_json(opts.out / "manifest.json", json{{"seed", opts.seed},
                                                {"n", opts.n},
                                                {"treatment", treatment},
                                                {"source", opts.scm ? opts.scm->filename().string() : "study_template"},
                                                {"overrides", opts.overrides},
                                                {"files", files},
                                                {"truth", truth}});
}

}  // namespace cml::app
