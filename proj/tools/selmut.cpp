// selmut: scenario-driven front end for the selection-mutation engine.
//
//   selmut <iterate|limit|verify|compare> --scenario <path> [--scenario <path> ...] [--out-dir <dir>]
//   selmut schema

#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selmut/scenario.hpp"

namespace {

struct Outcome {
    std::string scenario;
    bool ok = false;
    std::vector<std::string> lines;
};

Outcome run_one(const std::string& scenario, selmut::Command command, const std::filesystem::path& out_dir) {
    Outcome o{scenario, false, {}};
    try {
        const auto config = selmut::parse_scenario(scenario);
        const auto result = selmut::run_scenario(config, command, out_dir);
        for (const auto& s : result.summary) o.lines.push_back(scenario + ": " + s);
        for (const auto& p : result.written) o.lines.push_back(scenario + ": wrote " + p.string());
        o.ok = true;
    } catch (const std::exception& e) {
        o.lines.push_back("selmut: " + scenario + ": " + e.what());
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measure-valued selection-mutation dynamics"};
    app.require_subcommand(1);

    std::vector<std::string> scenarios;
    std::string out_dir = ".";

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"iterate", "Iterate the recursion and write trajectory diagnostics"},
        {"limit", "Compute the closed-form limit distribution"},
        {"verify", "Run the seeded assumption and convergence checks"},
        {"compare", "Run iterate and limit and report the distance between them"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", scenarios, "Scenario JSON file (repeat for a batch)")->required();
        sub->add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
    }
    app.add_subcommand("schema", "Print the scenario JSON schema");

    CLI11_PARSE(app, argc, argv);

    const auto* chosen = app.get_subcommands().front();
    if (chosen->get_name() == "schema") {
        std::cout << selmut::scenario_schema().dump(2) << "\n";
        return 0;
    }
    const auto command = selmut::parse_command(chosen->get_name());

    std::vector<Outcome> outcomes;
    if (scenarios.size() == 1) {
        outcomes.push_back(run_one(scenarios.front(), command, out_dir));
    } else {
        // Batch: scenarios share no state; each writes into its own subdirectory.
        std::vector<std::future<Outcome>> jobs;
        for (const auto& s : scenarios) {
            const auto dir = std::filesystem::path(out_dir) / std::filesystem::path(s).stem();
            jobs.push_back(std::async(std::launch::async, run_one, s, command, dir));
        }
        for (auto& j : jobs) outcomes.push_back(j.get());
    }

    int status = 0;
    for (const auto& o : outcomes) {
        for (const auto& line : o.lines) (o.ok ? std::cout : std::cerr) << line << "\n";
        if (!o.ok) status = 1;
    }
    return status;
}
