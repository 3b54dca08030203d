#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tokenlab/scenario.hpp"

namespace {

// Exit codes: 0 success, 2 validation error (bad file, bad arguments,
// unreadable run directory), 3 a scripted expectation was not met at runtime.
constexpr int kExitValidation = 2;

int run_command(const std::string& file, const std::string& outdir,
                const std::optional<uint64_t>& seed) {
    auto parsed = tokenlab::scenario::load_scenario(file);
    if (!parsed.ok()) {
        for (const auto& violation : parsed.violations) {
            std::cerr << "violation: " << violation << '\n';
        }
        return kExitValidation;
    }
    tokenlab::scenario::Scenario sc = *parsed.scenario;
    if (seed) sc.seed = *seed;
    auto outcome = tokenlab::scenario::run_scenario(sc, outdir);
    if (outcome.exit_code != 0) {
        std::cerr << "error: " << outcome.message << '\n';
    } else {
        std::cout << "run '" << sc.name << "' complete: " << outdir << '\n';
    }
    return outcome.exit_code;
}

int validate_command(const std::string& file) {
    auto parsed = tokenlab::scenario::load_scenario(file);
    if (!parsed.ok()) {
        for (const auto& violation : parsed.violations) {
            std::cerr << "violation: " << violation << '\n';
        }
        return kExitValidation;
    }
    const auto& sc = *parsed.scenario;
    std::cout << "valid: " << sc.name << " (system=" << tokenlab::scenario::to_string(sc.system)
              << ", centralisation=" << tokenlab::scenario::to_string(sc.centralisation)
              << ", privacy=" << tokenlab::scenario::to_string(sc.privacy)
              << ", actions=" << sc.script.size() << ")\n";
    return 0;
}

int report_command(const std::string& dir) {
    auto outcome = tokenlab::scenario::regenerate_reports(dir);
    if (outcome.exit_code != 0) {
        std::cerr << "error: " << outcome.message << '\n';
        return kExitValidation;
    }
    std::cout << "reports regenerated: " << dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tokenlab: a laboratory for token tracking protocols"};
    app.require_subcommand(1);

    std::string run_file, run_out;
    std::optional<uint64_t> run_seed;
    auto* run = app.add_subcommand("run", "Execute a scenario and write its artifact tree");
    run->add_option("file", run_file, "scenario JSON file")->required();
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--seed", run_seed, "override the scenario seed");

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
    validate->add_option("file", validate_file, "scenario JSON file")->required();

    std::string report_dir;
    auto* report = app.add_subcommand("report", "Re-emit analysis reports from a run directory");
    report->add_option("dir", report_dir, "directory produced by a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (run->parsed()) return run_command(run_file, run_out, run_seed);
    if (validate->parsed()) return validate_command(validate_file);
    if (report->parsed()) return report_command(report_dir);
    return kExitValidation;
}
