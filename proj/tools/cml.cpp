#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cml/app/config.hpp"
#include "cml/app/stages.hpp"
#include "cml/util/error.hpp"

namespace fs = std::filesystem;
using namespace cml;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRefuted = 3;

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string algo;
    std::string edits;
    std::string methods;
    bool no_verdict_exit = false;
};

app::PipelineConfig resolve_config(const RunFlags& f) {
    if (f.config.empty()) throw UsageError("--config is required");
    auto cfg = app::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (!f.out.empty()) cfg.out = fs::absolute(f.out).lexically_normal();
    if (!f.algo.empty()) cfg.algorithm = app::parse_algorithm(f.algo);
    if (!f.edits.empty()) cfg.edits = fs::absolute(f.edits).lexically_normal();
    if (!f.methods.empty()) {
        cfg.refutation.methods.clear();
        std::stringstream ss(f.methods);
        for (std::string item; std::getline(ss, item, ',');) {
            try {
                cfg.refutation.methods.push_back(refutation::parse_method(item));
            } catch (const RefutationError& e) {
                throw UsageError(e.what());
            }
        }
    }
    return cfg;
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool algo, bool edits, bool methods) {
    cmd->add_option("--config", f.config, "Pipeline config (JSON)");
    cmd->add_option("--seed", f.seed, "Override the config seed");
    cmd->add_option("--out", f.out, "Run directory (overrides the config)");
    if (algo) cmd->add_option("--algo", f.algo, "Discovery algorithm: pc, ges or gies");
    if (edits) cmd->add_option("--edits", f.edits, "Edit script applied after discovery");
    if (methods) {
        cmd->add_option("--methods", f.methods, "Comma-separated refuters: placebo,random_cause,subset,unobserved");
        cmd->add_flag("--no-verdict-exit", f.no_verdict_exit, "Exit 0 even when a refutation fails");
    }
}

int verdict_exit(refutation::Verdict v, bool ignore) {
    if (v == refutation::Verdict::Failed && !ignore) {
        std::cerr << "refutation failed\n";
        return kExitRefuted;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Causal discovery, estimation and refutation for wearable cohort studies", "cml"};
    cli.require_subcommand(1);

    app::SimulateOptions sim;
    std::string sim_out = "sim", sim_scm;
    bool sim_template = false;
    std::vector<std::string> overrides;
    auto* simulate = cli.add_subcommand("simulate", "Sample synthetic cohorts with known effects");
    simulate->add_flag("--template", sim_template, "Use the built-in study template");
    simulate->add_option("--config,--scm", sim_scm, "SCM description (JSON)");
    simulate->add_option("--n", sim.n, "Rows per timepoint")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    simulate->add_option("--out", sim_out, "Output directory")->capture_default_str();
    simulate->add_option("--override", overrides, "Template edge coefficient, parent->child=value");
    simulate->add_flag("--daily-activity", sim.daily_activity, "Also write daily wearable records");

    RunFlags discover_f, edit_f, estimate_f, refute_f, pipeline_f;
    auto* discover = cli.add_subcommand("discover", "Learn a causal graph from the cohort");
    add_run_flags(discover, discover_f, true, false, false);
    auto* edit = cli.add_subcommand("edit", "Apply expert edits to the discovered graph");
    add_run_flags(edit, edit_f, false, true, false);
    auto* estimate = cli.add_subcommand("estimate", "Estimate ATE, NDE, NIE and TE");
    add_run_flags(estimate, estimate_f, false, true, false);
    auto* refute = cli.add_subcommand("refute", "Run the refutation analyses");
    add_run_flags(refute, refute_f, false, false, true);
    auto* pipeline = cli.add_subcommand("pipeline", "discover, edit, estimate, refute and report in one go");
    add_run_flags(pipeline, pipeline_f, true, true, true);

    std::string report_dir, report_config;
    auto* report = cli.add_subcommand("report", "Render report.md from a run directory");
    report->add_option("run_dir", report_dir, "Run directory");
    report->add_option("--out", report_dir, "Run directory");
    report->add_option("--config", report_config, "Pipeline config (uses its run directory)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return kExitUsage;
    }

    try {
        if (*simulate) {
            if (sim_template == !sim_scm.empty()) throw UsageError("simulate needs exactly one of --template or --config");
            if (!sim_scm.empty()) sim.scm = sim_scm;
            for (const auto& o : overrides) {
                const auto eq = o.rfind('=');
                if (eq == std::string::npos) throw UsageError("override must be parent->child=value: " + o);
                try {
                    sim.overrides[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
                } catch (const std::exception&) {
                    throw UsageError("override value is not a number: " + o);
                }
            }
            sim.out = sim_out;
            app::cmd_simulate(sim);
            std::cout << "wrote " << sim.out.string() << "\n";
        } else if (*discover) {
            const auto cfg = resolve_config(discover_f);
            app::cmd_discover(cfg);
            std::cout << "wrote " << (cfg.out / "graph.dot").string() << "\n";
        } else if (*edit) {
            const auto cfg = resolve_config(edit_f);
            app::cmd_edit(cfg);
            std::cout << "wrote " << (cfg.out / "graph_edited.dot").string() << "\n";
        } else if (*estimate) {
            const auto cfg = resolve_config(estimate_f);
            app::cmd_estimate(cfg);
            std::cout << "wrote " << (cfg.out / "estimate.json").string() << "\n";
        } else if (*refute) {
            const auto cfg = resolve_config(refute_f);
            const auto verdict = app::cmd_refute(cfg);
            std::cout << "wrote " << (cfg.out / "refute.json").string() << "\n";
            return verdict_exit(verdict, refute_f.no_verdict_exit);
        } else if (*pipeline) {
            const auto cfg = resolve_config(pipeline_f);
            const auto verdict = app::cmd_pipeline(cfg);
            std::cout << "wrote " << (cfg.out / "report.md").string() << "\n";
            return verdict_exit(verdict, pipeline_f.no_verdict_exit);
        } else if (*report) {
            fs::path dir = report_dir;
            if (dir.empty() && !report_config.empty()) dir = app::load_config(report_config).out;
            if (dir.empty()) throw UsageError("report needs a run directory");
            std::cout << "wrote " << app::cmd_report(dir).string() << "\n";
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cml::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
