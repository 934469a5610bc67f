#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace kinlab::report {

using Json = nlohmann::json;

/// "%.17g"-style shortest exact rendering; "nan", "inf", "-inf" spelled out.
std::string format_number(double v);

/// FNV-1a (64 bit) of the canonical dump of `config` without the keys that
/// cannot change results ("workers", "out"), as 16 hex digits.
std::string config_hash(const Json& config);

enum class Format { csv, json };
Format parse_format(const std::string& name);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// CSV with a leading "# config_hash: ..." comment line, or a JSON object
/// {config_hash, columns, rows}. Returns the path written (stem + extension).
std::filesystem::path write_table(const std::filesystem::path& stem, const Table& table, Format format,
                                  const std::string& hash);

/// Pretty-printed JSON with "config_hash" added.
void write_json(const std::filesystem::path& path, Json body, const std::string& hash);

struct Manifest {
  std::string command;
  Json config;
  std::vector<std::string> outputs;  // file names relative to the output directory
  Json timings = Json::object();     // seconds per phase
  std::uint64_t seed = 0;
};

/// manifest.json in `dir`: {command, config, config_hash, outputs, timings, seed, versions}.
void write_manifest(const std::filesystem::path& dir, const Manifest& m);

/// Manifest content with the run-specific keys removed (timings, workers, out).
Json stable_manifest(const Json& manifest);

/// $KINLAB_OUT_DIR, else "kinlab_out".
std::filesystem::path default_output_dir();

}  // namespace kinlab::report
