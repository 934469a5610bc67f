#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kinlab/ext_rational.hpp"
#include "kinlab/functions.hpp"
#include "kinlab/report.hpp"

namespace kinlab::commands {

using report::Json;

/// Every subcommand, in help order.
const std::vector<std::string>& command_names();

/// Default configuration of a command. Keys double as CLI flag names; the
/// type of each default fixes how its flag is parsed.
Json defaults(const std::string& command);

/// Merges `overrides` into the defaults, rejecting unknown keys and values of
/// the wrong type (MalformedInput).
Json merge_config(const std::string& command, const Json& overrides);

struct Outcome {
  int status = 0;                     // 0 ok, 1 a checked tolerance failed
  std::string summary;                // one line for stdout
  std::vector<std::string> outputs;   // relative to the output directory
};

/// Runs a command with a complete config, writing outputs and manifest.json
/// under `out_dir`.
Outcome run(const std::string& command, const Json& config, const std::filesystem::path& out_dir);

/// "a:b:xr" (geometric from a towards b, factor r) or a comma list.
std::vector<double> parse_schedule(const std::string& text);
/// Comma list of exact rationals ("2,3/2,5/4").
std::vector<ExtRational> parse_rational_list(const std::string& text);

/// "gaussian" (standard) or "bump" (counterexample class) in dimension d.
SpaceTimePtr make_family(const std::string& name, int d);

}  // namespace kinlab::commands
