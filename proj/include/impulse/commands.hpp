#pragma once

#include "impulse/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace impulse {

/// Artifacts of one command run; written once at the end.
struct CommandResult {
    bool pass = false;
    nlohmann::json report;
    std::string solution_csv;
    std::string crossings_csv;
    std::string history_csv;
};

CommandResult run_linear(const Scenario& sc);
CommandResult run_picard(const Scenario& sc);
CommandResult run_nonfixed(const Scenario& sc);
CommandResult run_robustness(const Scenario& sc);
CommandResult run_stability(const Scenario& sc);
CommandResult verify_inequalities(const Scenario& sc);

/// Command names accepted by run_command.
const std::vector<std::string>& command_names();

/// Dispatches by name; library errors are caught and reported as a failed
/// run whose report carries the message. Unknown names throw ConfigError.
CommandResult run_command(const std::string& name, const Scenario& sc);

/// Writes <out>/<scenario>/{solution.csv, crossings.csv, report.json, history.csv}.
void write_artifacts(const std::filesystem::path& out, const Scenario& sc, const CommandResult& res);

}  // namespace impulse
