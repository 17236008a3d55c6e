#pragma once

#include "impulse/error.hpp"
#include "impulse/evolution.hpp"
#include "impulse/forcing.hpp"
#include "impulse/nonfixed.hpp"
#include "impulse/solver.hpp"
#include "impulse/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace impulse {

/// Invalid or incomplete scenario; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A fully resolved experiment configuration.
struct Scenario {
    std::string name;
    nlohmann::json config;  ///< resolved document (seed override applied)
    std::size_t K = 16;
    double alpha = 0.5;
    std::uint64_t seed = 1;

    LinearSystem sys;
    Nonlinearity nonlin;
    ImpulseMap g_map;
    Forcing forcing;
    std::optional<SurfaceSpec> surfaces;

    OutputWindow output;
    SolverOptions solver;
    PicardOptions picard;
    bool measure = true;  ///< replace the nominal dichotomy constants by measured ones

    nlohmann::json checks;  ///< command-specific section

    /// checks[section], or ConfigError when absent.
    const nlohmann::json& section(const std::string& key) const;
};

Scenario parse_scenario(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);
Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace impulse
