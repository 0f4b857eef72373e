#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "zpflab/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void print_report(const zpflab::RunReport& report, bool quiet) {
    if (quiet) return;
    for (const zpflab::CheckRecord& c : report.checks) {
        std::printf("[%s] %-64s observed=% .12g expected=% .12g tol=%.3g\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed, c.expected,
                    c.tolerance);
    }
    std::printf("%s: %zu checks, %s\n", report.experiment.c_str(), report.checks.size(),
                report.pass() ? "all passed" : "FAILURES PRESENT");
}

int execute(const zpflab::ScenarioConfig& cfg, const std::string& out_dir, bool quiet) {
    const zpflab::RunReport report = zpflab::run_scenario(cfg);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path base(out_dir);
    {
        std::ofstream out(base / (report.experiment + "_report.json"));
        if (!out) throw std::runtime_error("cannot write report in " + out_dir);
        out << zpflab::to_json(report).dump(2) << "\n";
    }
    if (!report.trace.columns.empty())
        zpflab::emit_trace(report, (base / (report.experiment + "_trace.csv")).string());

    print_report(report, quiet);
    return report.pass() ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zpflab: response-function laboratory for field-driven particle statistics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string seed_text;
    long samples_override = -1;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "path to the scenario config")->required();
    run->add_option("--out", out_dir, "output directory for report and traces");
    run->add_option("--seed", seed_text, "seed override (decimal or 0x-prefixed hex)");
    run->add_option("--samples", samples_override, "Monte Carlo sample override");
    run->add_flag("--quiet", quiet, "suppress the per-check table");

    CLI::App* suite = app.add_subcommand("suite", "run the full verification battery");
    suite->add_option("--out", out_dir, "output directory for report and traces");
    suite->add_option("--seed", seed_text, "seed override (decimal or 0x-prefixed hex)");
    suite->add_option("--samples", samples_override, "Monte Carlo sample override");
    suite->add_flag("--quiet", quiet, "suppress the per-check table");

    CLI::App* schema = app.add_subcommand("schema", "print the config schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" ? kExitPass : kExitUsage;
    }

    try {
        if (schema->parsed()) {
            std::cout << zpflab::scenario_schema().dump(2) << "\n";
            return kExitPass;
        }

        zpflab::ScenarioConfig cfg;
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw zpflab::ConfigError("cannot open config file: " + config_path);
            zpflab::json j;
            try {
                in >> j;
            } catch (const std::exception& e) {
                throw zpflab::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            cfg = zpflab::parse_scenario(j);
        } else {
            cfg.experiment = "full-suite";
        }
        if (!seed_text.empty()) cfg.seed = zpflab::parse_seed(seed_text);
        if (samples_override > 0) cfg.samples = samples_override;

        return execute(cfg, out_dir, quiet);
    } catch (const zpflab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
}
