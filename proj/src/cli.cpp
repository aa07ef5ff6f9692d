#include "complab/cli.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "complab/errors.hpp"
#include "complab/report.hpp"
#include "complab/scenarios.hpp"
#include "json.hpp"

namespace complab {

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

int fail_line(std::ostream& err, const char* category, const std::string& message, int code) {
    std::string one_line = message;
    for (char& c : one_line) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    err << "error: " << category << ": " << one_line << "\n";
    return code;
}

void print_summary(const ScenarioReport& report, std::ostream& out) {
    for (const auto& m : report.metrics) {
        out << (m.pass ? "PASS " : "FAIL ") << "metric " << m.name << " value=" << format_number(m.value)
            << " target=" << format_number(m.target) << " tol=" << format_number(m.tolerance) << "\n";
    }
    for (const auto& a : report.attachments) {
        out << (a.as_expected() ? "PASS " : "FAIL ") << "report " << a.name
            << " expected=" << (a.expect_pass ? "pass" : "fail") << " got=" << (a.report_pass() ? "pass" : "fail")
            << "\n";
    }
    for (const auto& f : report.flags) {
        out << "FLAG " << f << "\n";
    }
    out << "overall_pass=" << (report.overall_pass ? "true" : "false") << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

struct ScenarioArgs {
    std::string id;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t steps = 0;
    unsigned threads = 1;
    std::string outdir = "out";
    std::string config_path;
    std::string law;
};

int run_scenario_command(const ScenarioArgs& args, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    ScenarioReport report;
    try {
        ScenarioConfig config = default_config(args.id);
        if (!args.config_path.empty()) {
            apply_config_json(config, read_json_file(args.config_path));
        }
        if (cmd.count("--seed")) config.seed = args.seed;
        if (cmd.count("--paths")) config.n_paths = args.paths;
        if (cmd.count("--steps")) config.n_steps = args.steps;
        if (cmd.count("--threads")) config.threads = args.threads;
        if (cmd.count("--law")) {
            nlohmann::json law;
            try {
                law = nlohmann::json::parse(args.law);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("--law: ") + e.what());
            }
            set_param(config, "law", law);
        }
        report = run_scenario(config);
    } catch (const ConfigError& e) {
        return fail_line(err, "config", e.what(), kUsage);
    } catch (const std::exception& e) {
        return fail_line(err, "runtime", e.what(), kRuntime);
    }
    try {
        const auto files = write_report(report, args.outdir);
        print_summary(report, out);
        for (const auto& f : files) out << "wrote " << f.string() << "\n";
    } catch (const std::exception& e) {
        return fail_line(err, "runtime", e.what(), kRuntime);
    }
    return report.overall_pass ? kPass : kFail;
}

int run_verify_command(const std::string& path, std::ostream& out, std::ostream& err) {
    ScenarioReport report;
    try {
        report = load_report(path);
    } catch (const ConfigError& e) {
        return fail_line(err, "config", e.what(), kUsage);
    } catch (const std::exception& e) {
        return fail_line(err, "usage", e.what(), kUsage);
    }
    const bool stored = report.overall_pass;
    report.reevaluate();
    print_summary(report, out);
    if (stored != report.overall_pass) {
        out << "note: stored overall_pass=" << (stored ? "true" : "false") << " disagrees with the recomputed flags\n";
    }
    return report.overall_pass ? kPass : kFail;
}

void run_list_command(std::ostream& out) {
    for (const auto& info : scenario_catalog()) {
        out << info.id << ": " << info.summary << "\n";
        out << "  defaults " << info.defaults.echo().dump() << "\n";
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compensators of totally inaccessible stopping times: scenarios and checks", "complab"};
    app.require_subcommand(1);

    ScenarioArgs sargs;
    CLI::App* scenario = app.add_subcommand("scenario", "Run one scenario and write its report");
    scenario->add_option("id", sargs.id, "dellacherie, counterexample, shrinkage, poisson-tilt or azema")->required();
    scenario->add_option("--seed", sargs.seed, "master seed");
    scenario->add_option("--paths", sargs.paths, "number of simulated paths");
    scenario->add_option("--steps", sargs.steps, "grid steps");
    scenario->add_option("--outdir", sargs.outdir, "output directory")->capture_default_str();
    scenario->add_option("--threads", sargs.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    scenario->add_option("--config", sargs.config_path, "JSON config file");
    scenario->add_option("--law", sargs.law, "law as inline JSON (dellacherie)");

    std::string report_path;
    CLI::App* verify = app.add_subcommand("verify", "Recompute pass flags of a stored report");
    verify->add_option("--report", report_path, "path to report.json")->required();

    CLI::App* list = app.add_subcommand("list", "List scenarios and their defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail_line(err, "usage", e.what(), kUsage);
    }

    if (scenario->parsed()) {
        if (!find_scenario(sargs.id)) {
            err << app.help();
            return fail_line(err, "usage", "unknown scenario '" + sargs.id + "'", kUsage);
        }
        return run_scenario_command(sargs, *scenario, out, err);
    }
    if (verify->parsed()) {
        return run_verify_command(report_path, out, err);
    }
    if (list->parsed()) {
        run_list_command(out);
        return kPass;
    }
    return fail_line(err, "usage", "no subcommand", kUsage);
}

}  // namespace complab
