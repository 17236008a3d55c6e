#include "impulse/commands.hpp"
#include "impulse/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Impulsive parabolic evolution experiments", "impulse-evolve"};
    app.set_version_flag("--version", std::string(IMPULSE_VERSION));

    std::string command;
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    app.add_option("command", command, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(impulse::command_names()));
    app.add_option("--config", config, "Scenario JSON file")->required();
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", seed, "Override the scenario seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const impulse::Scenario sc = impulse::load_scenario(config, seed);
        const impulse::CommandResult res = impulse::run_command(command, sc);
        impulse::write_artifacts(out, sc, res);
        std::cout << command << " " << sc.name << ": " << (res.pass ? "pass" : "FAIL");
        if (res.report.contains("error")) std::cout << " (" << res.report["error"].get<std::string>() << ")";
        std::cout << "\n";
        return res.pass ? 0 : 1;
    } catch (const impulse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
