#include "cml/app/config.hpp"

#include <fstream>

#include "cml/util/error.hpp"

namespace cml::app {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Pc: return "pc";
        case Algorithm::Ges: return "ges";
        case Algorithm::Gies: return "gies";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "pc") return Algorithm::Pc;
    if (text == "ges") return Algorithm::Ges;
    if (text == "gies") return Algorithm::Gies;
    throw UsageError("unknown algorithm '" + std::string(text) + "' (expected pc, ges or gies)");
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
    try {
        PipelineConfig cfg;
        if (!j.contains("seed")) throw ConfigError("config must set a seed");
        cfg.seed = j.at("seed").get<std::uint64_t>();

        const json& d = j.at("data");
        cfg.cohort = resolve(base_dir, d.at("cohort").get<std::string>());
        cfg.schema = resolve(base_dir, d.at("schema").get<std::string>());
        cfg.timepoint = data::parse_timepoint(d.value("timepoint", std::string("week15")));
        if (d.contains("daily_activity") && !d.at("daily_activity").is_null())
            cfg.daily_activity = resolve(base_dir, d.at("daily_activity").get<std::string>());
        cfg.participant_column = d.value("participant_column", cfg.participant_column);
        cfg.activity_threshold = d.value("activity_threshold", cfg.activity_threshold);
        if (d.contains("activity_window")) {
            const auto w = d.at("activity_window").get<std::vector<std::string>>();
            if (w.size() != 2) throw ConfigError("activity_window must be [from, to]");
            cfg.activity_window = data::DateWindow{data::parse_date(w[0]), data::parse_date(w[1])};
        }

        if (j.contains("roles"))
            for (const auto& [name, role] : j.at("roles").items()) cfg.roles[name] = data::parse_role(role.get<std::string>());

        if (j.contains("discovery")) {
            const json& dc = j.at("discovery");
            cfg.algorithm = parse_algorithm(dc.value("algorithm", std::string("pc")));
            cfg.discovery.alpha = dc.value("alpha", cfg.discovery.alpha);
            cfg.discovery.max_cond_size = dc.value("max_cond_size", cfg.discovery.max_cond_size);
            cfg.discovery.bic_penalty = dc.value("bic_penalty", cfg.discovery.bic_penalty);
            cfg.discovery.intervention_targets =
                dc.value("intervention_targets", std::vector<std::vector<std::string>>{});
            if (dc.contains("regime_column") && !dc.at("regime_column").is_null())
                cfg.regime_column = dc.at("regime_column").get<std::string>();
        }
        cfg.discovery.validate();

        if (j.contains("expert_graph") && !j.at("expert_graph").is_null())
            cfg.expert_graph = resolve(base_dir, j.at("expert_graph").get<std::string>());
        if (j.contains("edits") && !j.at("edits").is_null()) cfg.edits = resolve(base_dir, j.at("edits").get<std::string>());

        if (j.contains("estimation")) {
            const json& e = j.at("estimation");
            cfg.tree.max_depth = e.value("max_depth", cfg.tree.max_depth);
            cfg.tree.min_child_samples = e.value("min_child_samples", cfg.tree.min_child_samples);
            cfg.tree.n_trees = e.value("n_trees", cfg.tree.n_trees);
            cfg.tree.learning_rate = e.value("learning_rate", cfg.tree.learning_rate);
            if (e.contains("transition")) {
                const auto t = e.at("transition").get<std::vector<int>>();
                if (t.size() != 2 || t[0] == t[1] || (t[0] != 0 && t[0] != 1) || (t[1] != 0 && t[1] != 1))
                    throw ConfigError("transition must be [0, 1] or [1, 0]");
                cfg.x = t[0];
                cfg.x_prime = t[1];
            }
        }
        cfg.tree.validate();

        if (j.contains("refutation")) {
            const json& r = j.at("refutation");
            auto& s = cfg.refutation;
            s.replicates = r.value("replicates", s.replicates);
            s.subset_fraction = r.value("subset_fraction", s.subset_fraction);
            s.robustness_bound = r.value("robustness_bound", s.robustness_bound);
            if (r.contains("strengths")) {
                s.strengths.clear();
                for (const auto& p : r.at("strengths")) {
                    const auto v = p.get<std::vector<double>>();
                    if (v.size() != 2) throw ConfigError("each strength is [kappa_t, kappa_y]");
                    s.strengths.emplace_back(v[0], v[1]);
                }
            }
            if (r.contains("methods")) {
                s.methods.clear();
                for (const auto& m : r.at("methods")) s.methods.push_back(refutation::parse_method(m.get<std::string>()));
            }
        }
        if (j.contains("out")) cfg.out = resolve(base_dir, j.at("out").get<std::string>());
        else cfg.out = resolve(base_dir, "run");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const UsageError& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

json config_to_json(const PipelineConfig& cfg) {
    json d{{"cohort", cfg.cohort.string()},
           {"schema", cfg.schema.string()},
           {"timepoint", data::to_string(cfg.timepoint)},
           {"participant_column", cfg.participant_column},
           {"activity_threshold", cfg.activity_threshold}};
    if (cfg.daily_activity) d["daily_activity"] = cfg.daily_activity->string();
    if (cfg.activity_window)
        d["activity_window"] = {data::format_date(cfg.activity_window->from), data::format_date(cfg.activity_window->to)};

    json roles = json::object();
    for (const auto& [name, role] : cfg.roles) roles[name] = data::to_string(role);

    json disc{{"algorithm", to_string(cfg.algorithm)},
              {"alpha", cfg.discovery.alpha},
              {"max_cond_size", cfg.discovery.max_cond_size},
              {"bic_penalty", cfg.discovery.bic_penalty},
              {"intervention_targets", cfg.discovery.intervention_targets}};
    if (cfg.regime_column) disc["regime_column"] = *cfg.regime_column;

    json strengths = json::array();
    for (const auto& [kt, ky] : cfg.refutation.strengths) strengths.push_back({kt, ky});
    json methods = json::array();
    for (auto m : cfg.refutation.methods) methods.push_back(refutation::to_string(m));

    json j{{"seed", cfg.seed},
           {"data", d},
           {"roles", roles},
           {"discovery", disc},
           {"estimation",
            {{"max_depth", cfg.tree.max_depth},
             {"min_child_samples", cfg.tree.min_child_samples},
             {"n_trees", cfg.tree.n_trees},
             {"learning_rate", cfg.tree.learning_rate},
             {"transition", {cfg.x, cfg.x_prime}}}},
           {"refutation",
            {{"replicates", cfg.refutation.replicates},
             {"subset_fraction", cfg.refutation.subset_fraction},
             {"strengths", strengths},
             {"robustness_bound", cfg.refutation.robustness_bound},
             {"methods", methods}}},
           {"out", cfg.out.string()}};
    if (cfg.expert_graph) j["expert_graph"] = cfg.expert_graph->string();
    if (cfg.edits) j["edits"] = cfg.edits->string();
    return j;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j, fs::absolute(path).parent_path());
}

}  // namespace cml::app
