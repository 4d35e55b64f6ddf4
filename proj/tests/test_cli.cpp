#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log = {}) {
    std::string cmd = std::string("\"") + CML_BINARY + "\" " + args;
    cmd += log.empty() ? " > /dev/null 2>&1" : " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

/// Fresh scratch directory holding a small simulated study and a fast config.
struct Workspace {
    fs::path root;
    fs::path config;

    explicit Workspace(const std::string& name) {
        root = fs::temp_directory_path() / ("cml_cli_" + name + "_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        REQUIRE(run("simulate --template --n 1200 --seed 5 --out \"" + (root / "sim").string() + "\"") == 0);
        auto j = nlohmann::json::parse(slurp(root / "sim" / "config_week15.json"));
        j["refutation"]["replicates"] = 5;
        config = root / "sim" / "fast.json";
        std::ofstream(config) << j.dump(2);
    }
    ~Workspace() { fs::remove_all(root); }

    std::string cfg() const { return "--config \"" + config.string() + "\""; }
    std::string out(const std::string& name) const { return "--out \"" + (root / name).string() + "\""; }
};

}  // namespace

TEST_CASE("simulate is deterministic") {
    const fs::path a = fs::temp_directory_path() / "cml_cli_sim_a";
    const fs::path b = fs::temp_directory_path() / "cml_cli_sim_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run("simulate --template --n 300 --seed 9 --daily-activity --out \"" + a.string() + "\"") == 0);
    REQUIRE(run("simulate --template --n 300 --seed 9 --daily-activity --out \"" + b.string() + "\"") == 0);
    auto sa = snapshot(a), sb = snapshot(b);
    // generated configs name their own directory
    for (auto* s : {&sa, &sb})
        for (auto it = s->begin(); it != s->end();) it = it->first.rfind("config_", 0) == 0 ? s->erase(it) : std::next(it);
    CHECK(sa == sb);
    CHECK(sa.count("cohort_week15.csv") == 1);
    CHECK(sa.count("daily_activity_week15.csv") == 1);
    const auto manifest = nlohmann::json::parse(sa.at("manifest.json"));
    CHECK(manifest.dump().find("qol_physical") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("usage errors exit with code 2") {
    Workspace w("usage");
    CHECK(run("discover " + w.cfg() + " --algo magic") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("refute " + w.cfg() + " --methods bootstrap") == 2);
    CHECK(run("simulate --n 10") == 2);
}

TEST_CASE("discover with pc and ges") {
    Workspace w("discover");
    for (const std::string algo : {"pc", "ges"}) {
        REQUIRE(run("discover " + w.cfg() + " --algo " + algo + " " + w.out(algo)) == 0);
        CHECK(fs::exists(w.root / algo / "graph.dot"));
        const auto m = nlohmann::json::parse(slurp(w.root / algo / "discovery.json"));
        CHECK(m.at("algorithm") == algo);
        CHECK(m.at("nodes").size() == 10);
    }
}

TEST_CASE("a cycle-creating edit reports its line") {
    Workspace w("edit");
    const fs::path edits = w.root / "bad.edits";
    std::ofstream(edits) << "# expert fix\nremove age -> qol_physical\nadd qol_physical -> age\n";
    REQUIRE(run("discover " + w.cfg() + " " + w.out("run")) == 0);
    const fs::path log = w.root / "edit.log";
    CHECK(run("edit " + w.cfg() + " " + w.out("run") + " --edits \"" + edits.string() + "\"", log) == 1);
    const std::string msg = slurp(log);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("cycle") != std::string::npos);
}

TEST_CASE("method filter and report placeholders") {
    Workspace w("methods");
    const std::string out = w.out("run");
    REQUIRE(run("discover " + w.cfg() + " " + out) == 0);
    REQUIRE(run("estimate " + w.cfg() + " " + out) == 0);
    REQUIRE(run("refute " + w.cfg() + " " + out + " --methods unobserved --no-verdict-exit") == 0);
    const auto r = nlohmann::json::parse(slurp(w.root / "run" / "refute.json"));
    REQUIRE(r.at("results").size() == 1);
    CHECK(r.at("results")[0].at("method") == "unobserved_common_cause");
    REQUIRE(run("report \"" + (w.root / "run").string() + "\"") == 0);
    const std::string md = slurp(w.root / "run" / "report.md");
    CHECK(md.find("| Unobserved random cause |") != std::string::npos);
    CHECK(md.find("| — |") != std::string::npos);
    CHECK(run("report \"" + (w.root / "nowhere").string() + "\"") == 1);
}

TEST_CASE("pipeline equals the individual stages and reruns are byte-identical") {
    Workspace w("pipeline");
    REQUIRE(run("pipeline " + w.cfg() + " " + w.out("whole") + " --no-verdict-exit") == 0);
    const std::string staged = w.out("staged");
    REQUIRE(run("discover " + w.cfg() + " " + staged) == 0);
    REQUIRE(run("edit " + w.cfg() + " " + staged) == 0);
    REQUIRE(run("estimate " + w.cfg() + " " + staged) == 0);
    REQUIRE(run("refute " + w.cfg() + " " + staged + " --no-verdict-exit") == 0);
    REQUIRE(run("report \"" + (w.root / "staged").string() + "\"") == 0);
    for (const char* f : {"graph.dot", "graph_edited.dot", "discovery.json", "estimate.json", "refute.json"})
        CHECK_MESSAGE(slurp(w.root / "whole" / f) == slurp(w.root / "staged" / f), f);

    const auto first = snapshot(w.root / "whole");
    REQUIRE(run("pipeline " + w.cfg() + " " + w.out("whole") + " --no-verdict-exit") == 0);
    CHECK(snapshot(w.root / "whole") == first);
}
