#pragma once

// Command dispatch shared by the combind executable and the Python module.

#include <cstdint>
#include <optional>
#include <string>

#include "combind/json_io.hpp"

namespace combind {

enum ExitCode : int { kExitOk = 0, kExitVerificationFailed = 1, kExitConfigError = 2, kExitBudget = 3 };

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
    std::string command;  // entropy | independence | shatter | l1 | example | verify
    std::string suite;    // verify only: sauer | cover-bound | density-lemma | separated
    io::Json params = io::Json::object();
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> budget;
};

struct RunResult {
    int exit_code = kExitOk;
    io::Json report;
    std::string csv;  // empty when the command has no tabular output
};

/// Parses a config document {"schema_version", "command", "suite", "seed",
/// "budget", "params"}. Throws ConfigError on malformed input.
RunConfig parse_run_config(const std::string& text);

/// Never throws for domain or config errors; they are mapped to exit codes
/// and described in report["error"].
RunResult run(const RunConfig& config);

/// Deterministic serialization used for report files.
std::string dump_report(const io::Json& report);

}  // namespace combind
