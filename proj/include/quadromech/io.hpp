#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadromech/sweep.hpp"

namespace quadromech {

/// Everything `quadromech run` needs. Rates are in units of gamma_c, which
/// is fixed to 1.
struct RunConfig {
  SweepSpec spec;
  std::filesystem::path output_directory = ".";
  std::vector<std::string> formats = {"csv"};
  std::string basename;  ///< defaults to the scenario name
  int parallelism = 1;
  std::uint64_t seed = 0;  ///< reserved; no code path is random
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigInvalid. A built-in "scenario" supplies defaults the other keys
/// override; "custom" (the default) needs "axes".
RunConfig parse_run_config(const nlohmann::json& doc);

/// Throws ConfigNotFound if the file is missing, ConfigInvalid on bad JSON.
RunConfig load_run_config(const std::filesystem::path& path);

/// printf %.17g, which round-trips every double; non-finite values print as nan/inf/-inf.
std::string format_double(double value);

/// Header plus one line per row, "\n" line endings, RFC-4180 quoting. An
/// "error" column is appended only when some point failed.
std::string to_csv(const SweepResult& result);

/// Rows, columns, the spec and the provenance block; keys sorted.
nlohmann::json to_json(const SweepResult& result);

/// Writes <basename>.csv and/or <basename>.json; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const RunConfig& config);

}  // namespace quadromech
