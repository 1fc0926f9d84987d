#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

#include "schedrate/cli/config.hpp"
#include "schedrate/cli/result_table.hpp"

namespace schedrate::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitResource = 3, kExitNumeric = 4 };

// Dispatches the experiment kind to its library operation. Metadata carries
// config_hash, seed, tool_version and wall_time_ms.
ResultTable run(const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  // When set, the config's experiment kind must equal it.
  std::optional<std::string> expected_kind;
  Format format = Format::Csv;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string output;        // emitted table on success
  std::string error_record;  // one JSON object on failure
};

// Parse, run, emit; never throws for library errors.
RunOutcome execute(const std::string& config_text, const RunOptions& options);

// Exit code and {"error": kind, "exit_code": c, "messages": [...]} for an
// exception raised while parsing or running.
int exit_code_for(const std::exception& e);
std::string error_record(const std::exception& e);

}  // namespace schedrate::cli
