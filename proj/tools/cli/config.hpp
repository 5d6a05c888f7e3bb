#pragma once

// Run configuration: a versioned JSON document mirroring the library
// parameter structs. Unknown keys are rejected, missing keys take defaults
// and every default applied is recorded.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seaz/error.hpp"
#include "seaz/metrics.hpp"
#include "seaz/simulate.hpp"

namespace seaz::cli {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Raised for malformed documents; carries the offending key path.
class ConfigParseError : public ConfigError {
public:
    ConfigParseError(std::string path, const std::string& msg)
        : ConfigError(path.empty() ? msg : path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunConfig {
    model::SeaConfig sea;
    metrics::Condition condition = metrics::Condition::LoadStrict;
    metrics::StiffnessOptions stiffness;
    metrics::ZRegionConfig zregion;
    sim::SimConfig sim;
    sim::Scenario scenario;
    double energy_sign = 1.0;
    std::vector<sim::EnvironmentModel> environments;
    sim::ClassifierOptions classifier;
    metrics::SweepGrid sweep;  // sweep.base mirrors sea
    metrics::SweepTask sweep_task = metrics::SweepTask::MaxStiff;
    unsigned threads = 0;

    std::vector<std::string> defaults_applied;

    // Fully resolved document; loading it again gives an identical RunConfig.
    json echo() const;
};

RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Closest known key for an unknown one, or empty.
std::string suggest_key(const std::string& unknown, const std::vector<std::string>& known);

// "25 Hz", "157 rad/s" or a bare number (rad/s).
double parse_frequency(const json& v, const std::string& path);

}  // namespace seaz::cli
