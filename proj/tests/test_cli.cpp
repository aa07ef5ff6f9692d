#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "complab/cli.hpp"
#include "complab/report.hpp"
#include "json.hpp"

using namespace complab;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "complab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("complab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Cli, UnknownScenarioIsUsageError) {
    const CliResult r = cli({"scenario", "unknown-name"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error: usage:"), std::string::npos);
}

TEST(Cli, NoSubcommandIsUsageError) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"scenario", "shrinkage", "--threads", "0"}).code, 2);
}

TEST(Cli, BadConfigValues) {
    EXPECT_EQ(cli({"scenario", "shrinkage", "--paths", "5"}).code, 2);
    EXPECT_EQ(cli({"scenario", "dellacherie", "--law", "{not json"}).code, 2);
    EXPECT_EQ(cli({"scenario", "shrinkage", "--config", "/nonexistent.json"}).code, 2);
}

TEST(Cli, ListShowsScenarios) {
    const CliResult r = cli({"list"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("poisson-tilt"), std::string::npos);
    EXPECT_NE(r.out.find("azema"), std::string::npos);
}

TEST(Cli, AtomLawFlaggedButPasses) {
    const fs::path dir = fresh_dir("atom");
    const CliResult r = cli({"scenario", "dellacherie", "--paths", "5000", "--outdir", dir.string(), "--law",
                       R"({"atoms":[[1.0,1.0]],"continuous":null})"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("FLAG not_totally_inaccessible"), std::string::npos);
    const ScenarioReport report = load_report(dir / "dellacherie" / "report.json");
    EXPECT_TRUE(report.has_flag("not_totally_inaccessible"));
}

TEST(Cli, ScenarioThenVerifyAgree) {
    const fs::path dir = fresh_dir("tilt");
    const CliResult run = cli({"scenario", "poisson-tilt", "--seed", "42", "--paths", "20000", "--outdir", dir.string()});
    EXPECT_EQ(run.code, 0) << run.err;
    const fs::path report = dir / "poisson-tilt" / "report.json";
    ASSERT_TRUE(fs::exists(report));
    EXPECT_TRUE(fs::exists(dir / "poisson-tilt" / "poisson-tilt_q_compensator.csv"));
    const CliResult verify = cli({"verify", "--report", report.string()});
    EXPECT_EQ(verify.code, run.code);
    EXPECT_NE(verify.out.find("overall_pass=true"), std::string::npos);
    const ScenarioReport loaded = load_report(report);
    EXPECT_NEAR(loaded.metric("tilted_slope").value, 2.0, 0.1);
    EXPECT_EQ(loaded.config.at("seed"), 42);
}

TEST(Cli, VerifyRecomputesFlags) {
    const fs::path dir = fresh_dir("tamper");
    ASSERT_EQ(cli({"scenario", "shrinkage", "--paths", "20000", "--outdir", dir.string()}).code, 0);
    const fs::path path = dir / "shrinkage" / "report.json";
    ScenarioReport r = load_report(path);
    r.metrics[0].value += 100.0;
    write_report(r, dir);
    EXPECT_EQ(cli({"verify", "--report", path.string()}).code, 1);
}

TEST(Cli, VerifyMissingReport) {
    EXPECT_EQ(cli({"verify", "--report", "/nonexistent/report.json"}).code, 2);
}
