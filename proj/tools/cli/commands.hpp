#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "config.hpp"

namespace seaz::cli {

enum class Command { Analyze, ZRegion, MaxStiff, Sweep, Simulate, Study, Selftest };

std::string_view to_string(Command c);
Command parse_command(std::string_view s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnsafe = 1;
inline constexpr int kExitConfig = 2;

struct Overrides {
    std::optional<model::Architecture> arch;
    std::optional<metrics::Condition> condition;
    std::optional<model::FeedforwardKind> ff;
};

// Applies command-line overrides and drops them from the defaults list.
void apply_overrides(RunConfig& rc, const Overrides& o);

struct CommandResult {
    int exit_code = kExitOk;
    json report;
};

// Runs one command, writing report.json and CSV sidecars into out_dir.
CommandResult run_command(Command cmd, const RunConfig& rc, const std::filesystem::path& out_dir);

// Results only, without touching the filesystem.
CommandResult evaluate_command(Command cmd, const RunConfig& rc);

}  // namespace seaz::cli
