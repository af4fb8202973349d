#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "selmut/dynamics.hpp"
#include "selmut/fitness.hpp"
#include "selmut/measure.hpp"
#include "selmut/serialize.hpp"

namespace selmut {

/// Schema or validation failure; the message starts with the field path.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputKind { trajectory_csv, limit_json, diagnostics_csv, checks_json };

const char* to_string(OutputKind kind);

/// Sizes of the seeded verification suites.
struct VerifySettings {
    int pairs = 1000;
    int coupling_pairs = 100;
    int coupling_steps = 200;
    int recursion_scenarios = 50;
    int recursion_steps = 200;
    /// Truncation points for the Assumption 3 diagnostic, as fractions of M.
    std::vector<double> a_fractions{0.9, 0.99, 0.999};
    double assumption3_bound = 0.002;
};

struct ScenarioConfig {
    std::string name = "scenario";
    FitnessModel model = FitnessModel::kingman();
    double beta = 0.5;
    Measure p0;
    Measure q;
    StoppingRule stop;
    std::vector<OutputKind> outputs;
    std::uint64_t seed = 0;
    VerifySettings verify;
};

ScenarioConfig parse_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario_json(const json& j, std::string name = "scenario");

enum class Command { iterate, limit, verify, compare };

Command parse_command(const std::string& text);

struct RunResult {
    std::vector<std::filesystem::path> written;
    std::vector<std::string> summary;
};

/// Applies Convention (*), runs the computations the command and the
/// declared outputs need, and writes the output files into out_dir.
/// Throws on any validation or solver failure.
RunResult run_scenario(const ScenarioConfig& config, Command command, const std::filesystem::path& out_dir);

/// JSON Schema describing scenario files.
json scenario_schema();

}  // namespace selmut
