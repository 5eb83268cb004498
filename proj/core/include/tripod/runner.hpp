#pragma once

#include "tripod/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tripod {

enum class Subcommand { DarkStates, SlowLight, Store, ScanTransmission, SweepField, FitBeat };

Subcommand parse_subcommand(std::string_view name);
std::string_view to_string(Subcommand s);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numerical = 3;
inline constexpr int fit = 4;
}  // namespace exit_code

struct RunOptions {
    int threads = 1;
    std::uint64_t seed = 0;
};

struct RunOutcome {
    int exit_code = exit_code::ok;
    std::vector<std::string> files;  ///< written CSVs, in order
    std::vector<std::string> warnings;
    /// Machine-readable failure line, empty on success:
    /// error code=<n> kind=<config|numerical|fit> message="<text>"
    std::string error_line;
};

/// Runs one subcommand and writes its CSVs plus `manifest` into out_dir.
/// Never throws; failures are mapped to exit codes.
RunOutcome run(Subcommand sub, const RunConfig& config, const std::filesystem::path& out_dir,
               const RunOptions& options);

std::string error_line(int code, std::string_view kind, std::string_view message);

}  // namespace tripod
