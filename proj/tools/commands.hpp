#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sigmaridge::cli {

/// Bad flag values, config keys or ids. Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> command_names();

/// Runs `command` with `args` (config merged with flags) and writes its
/// outputs plus manifest.json into `out`.
void run_command(const std::string& command, const nlohmann::json& args, const std::filesystem::path& out);

/// Replays a manifest into `out`. Throws if any output hash differs from the
/// one recorded.
void rerun(const std::filesystem::path& manifest, const std::filesystem::path& out);

}  // namespace sigmaridge::cli
