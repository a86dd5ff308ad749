#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace billocr {

struct ProcessOutput {
    int exit_code = -1;
    std::string standard_output;
    bool timed_out = false;
};

/// Runs argv[0] (PATH lookup) with stdin closed and stderr discarded.
/// Kills the child when the timeout expires. Throws std::system_error when
/// the process cannot be started.
ProcessOutput run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

/// Absolute path for a program name (PATH search) or an explicit path.
std::optional<std::filesystem::path> resolve_executable(const std::string& name);

}  // namespace billocr
