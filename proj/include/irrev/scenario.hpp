#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace irrev {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by the library entry points and the CLI binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

struct RunOptions {
    std::vector<std::string> overrides;  // dotted.path=value pairs
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Executes the scenario in `config_path`, writing the report to `out_path`
/// (and CSV side tables next to it). Returns an exit code; structured error
/// messages go to `diag`.
int run_scenario(const std::string& config_path, const std::string& out_path,
                 const RunOptions& options, std::ostream& diag);

/// Structural + invariant validation only; no computation.
int validate_scenario(const std::string& config_path, const RunOptions& options,
                      std::ostream& diag);

/// In-memory variants used by tests and by the file entry points.
nlohmann::json run_scenario_json(const nlohmann::json& config);
void validate_scenario_json(const nlohmann::json& config);

}  // namespace irrev
