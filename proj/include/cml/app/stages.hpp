#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cml/app/config.hpp"
#include "cml/data/cohort.hpp"
#include "cml/graph/edits.hpp"
#include "cml/graph/graph.hpp"
#include "cml/refutation/refute.hpp"

namespace cml::app {

/// Cohort ready for analysis: roles applied, treatment derived from daily
/// activity when configured, incomplete rows dropped over the analysis
/// columns (every non-auxiliary variable). Values stay in raw units.
struct AnalysisData {
    data::Cohort cohort;
    std::vector<std::string> analysis_columns;
    std::string treatment;
    std::string outcome;
    std::size_t dropped = 0;
    /// GIES regime per row (empty without a regime column).
    std::vector<std::size_t> regimes;
};

AnalysisData load_analysis_data(const PipelineConfig& cfg);

struct DiscoverOutput {
    graph::Cpdag graph;
    nlohmann::json manifest;
};

/// Runs the configured algorithm on the standardized analysis columns.
DiscoverOutput discover(const AnalysisData& data, const PipelineConfig& cfg);

struct EditOutput {
    graph::Cpdag graph;
    /// Edits derived from the expert graph, if any, followed by the script's.
    graph::EditScript applied;
};

/// Moves the discovered graph onto the expert graph (restricted to the
/// discovered nodes) when one is configured, then applies `script`.
EditOutput edit(const graph::Cpdag& discovered, const PipelineConfig& cfg, const graph::EditScript& script = {});

/// Extends `g` to a DAG, adjusts for the treatment's parents, and fits one
/// T-learner on the adjustment set (ATE) and one on mediators plus
/// adjustment set (NDE, NIE, TE).
nlohmann::json estimate(const AnalysisData& data, const graph::Cpdag& g, const PipelineConfig& cfg, std::uint64_t seed);

/// All configured refuters against the ATE pipeline recorded in `estimate_record`.
nlohmann::json refute(const AnalysisData& data, const nlohmann::json& estimate_record, const PipelineConfig& cfg,
                      std::uint64_t seed);

/// Markdown report in the layout of a refutation table.
std::string render_report(const nlohmann::json& estimate_record, const nlohmann::json& refute_record,
                          const std::string& digest);

/// Hex SHA-256 over the concatenated bytes of the given files (missing ones skipped).
std::string digest_files(const std::vector<std::filesystem::path>& files);

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage);

// File-level commands. Each writes into `out` and returns nothing but
// artifacts; see the README for the run directory layout.

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void cmd_discover(const PipelineConfig& cfg);
void cmd_edit(const PipelineConfig& cfg);
void cmd_estimate(const PipelineConfig& cfg);
refutation::Verdict cmd_refute(const PipelineConfig& cfg);
std::filesystem::path cmd_report(const std::filesystem::path& run_dir);
refutation::Verdict cmd_pipeline(const PipelineConfig& cfg);

struct SimulateOptions {
    /// Study template when unset.
    std::optional<std::filesystem::path> scm;
    std::map<std::string, double> overrides;
    std::size_t n = 5000;
    std::uint64_t seed = 0;
    std::filesystem::path out = "sim";
    bool daily_activity = false;
};

void cmd_simulate(const SimulateOptions& opts);

}  // namespace cml::app
