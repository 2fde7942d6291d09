#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/cli/config.hpp"

namespace ruelle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitHypotheses = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitResource = 5;

int exit_code(ErrorKind kind);

const std::vector<std::string>& commands();

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct RunResult {
    int exit_code = kExitOk;
    json report;
    std::vector<std::string> files;  // written artifacts, report.json last
    double seconds = 0;              // wall clock, never written to disk
};

// Runs one command and writes <out>/report.json plus its CSV artifacts. Errors
// are caught, recorded in the report and mapped to an exit code.
RunResult run(const std::string& command, const RunConfig& cfg, const Overrides& overrides = {});

// Reads and parses the config file, then runs. Config errors still produce a
// report when the output directory is known.
RunResult run_file(const std::string& command, const std::string& config_path, const Overrides& overrides = {});

}  // namespace ruelle::cli
