#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qusd/matrixcore.hpp"
#include "qusd/tolerances.hpp"

// Command implementations behind the command-line front end. Kept in the
// library so tests can drive them without spawning processes. Input specs
// are parsed strictly: unknown JSON fields are errors. Every document
// echoes the fully resolved config and carries the schema version.

namespace qusd::cli {

inline constexpr const char* schema_version = "qusd/1";

struct RunConfig {
  std::string command;
  nlohmann::json input;                          // parsed input spec
  std::string format = "json";                   // "json" or "csv" (sweep only)
  std::uint64_t seed = 1;                        // montecarlo only
  std::string out;                               // output path; empty = stdout
  double condition_tol = tol::condition_equality;  // closed-form equality checks
  std::string grid;                              // "start:stop:count" sweep override
};

struct Outcome {
  int exit_code;        // 0 ok, 2 validation error, 3 internal inconsistency
  std::string payload;  // full document (JSON or CSV), newline-terminated
};

// Dispatches config.command and maps thrown errors onto exit codes with a
// machine-readable error document.
Outcome run(const RunConfig& config);

nlohmann::json run_analyze(const RunConfig& config);
nlohmann::json run_discord(const RunConfig& config);
nlohmann::json run_ppt(const RunConfig& config);
nlohmann::json run_optimal(const RunConfig& config);
nlohmann::json run_montecarlo(const RunConfig& config);
std::string run_sweep(const RunConfig& config);

// FNV-1a over the raw entry bytes, row-major; "fnv1a64:<16 hex digits>".
std::string state_checksum(const ComplexMatrix& m);

}  // namespace qusd::cli
