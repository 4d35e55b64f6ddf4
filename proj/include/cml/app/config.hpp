#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cml/data/activity.hpp"
#include "cml/data/cohort.hpp"
#include "cml/discovery/config.hpp"
#include "cml/estimation/boosting.hpp"
#include "cml/refutation/refute.hpp"

namespace cml::app {

enum class Algorithm { Pc, Ges, Gies };

std::string_view to_string(Algorithm a);
/// Throws UsageError for anything but pc, ges or gies.
Algorithm parse_algorithm(std::string_view text);

/// Settings for one analysis run. Relative paths resolve against the
/// directory holding the config file.
struct PipelineConfig {
    std::uint64_t seed = 0;

    std::filesystem::path cohort;
    std::filesystem::path schema;
    data::Timepoint timepoint = data::Timepoint::GestWeek15;
    /// Optional: derive the treatment column from daily wearable records.
    std::optional<std::filesystem::path> daily_activity;
    std::string participant_column = "participant_id";
    double activity_threshold = data::kWeeklyActivityThreshold;
    std::optional<data::DateWindow> activity_window;
    std::map<std::string, data::Role> roles;

    Algorithm algorithm = Algorithm::Pc;
    discovery::DiscoveryConfig discovery;
    /// GIES: auxiliary column holding each row's regime index.
    std::optional<std::string> regime_column;

    std::optional<std::filesystem::path> expert_graph;
    std::optional<std::filesystem::path> edits;

    estimation::TreeParams tree;
    int x = 0;
    int x_prime = 1;

    refutation::RefutationSettings refutation;

    std::filesystem::path out = "run";
};

PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
/// Paths are written as given (absolute after resolution).
nlohmann::json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace cml::app
