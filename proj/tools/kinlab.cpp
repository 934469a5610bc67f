// kinlab: command-line front end. Flags mirror the keys of each command's
// default config; --config loads a JSON object of the same keys first.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "kinlab/commands.hpp"
#include "kinlab/error.hpp"

namespace {

using kinlab::commands::Json;

Json flag_value(const std::string& key, const Json& def, const std::string& text) {
  try {
    if (def.is_number_integer()) {
      std::size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used == text.size()) return v;
    } else if (def.is_number_float()) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } else {
      return text;
    }
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--" + key, "expected a number, got '" + text + "'");
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kinlab::MalformedInput("cli", "cannot read config file " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw kinlab::MalformedInput("cli", "config file " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the kinetic transport equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kinlab 0.1.0");

  struct Sub {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::string config_file;
    std::string out;
  };
  std::map<std::string, Sub> subs;
  for (const auto& name : kinlab::commands::command_names()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name);
    const Json defs = kinlab::commands::defaults(name);
    for (const auto& [key, def] : defs.items()) {
      s.app->add_option("--" + key, s.values[key])->default_str(def.is_string() ? def.get<std::string>() : def.dump());
    }
    s.app->add_option("--config", s.config_file, "JSON file with the same keys as the flags");
    s.app->add_option("--out", s.out, "output directory (default: $KINLAB_OUT_DIR or ./kinlab_out)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      Json overrides = s.config_file.empty() ? Json::object() : read_config_file(s.config_file);
      const Json defs = kinlab::commands::defaults(name);
      for (const auto& [key, text] : s.values) {
        if (s.app->count("--" + key) > 0) overrides[key] = flag_value(key, defs.at(key), text);
      }
      const Json cfg = kinlab::commands::merge_config(name, overrides);
      const auto dir = s.out.empty() ? kinlab::report::default_output_dir() : std::filesystem::path(s.out);
      const auto outcome = kinlab::commands::run(name, cfg, dir);
      std::cout << outcome.summary << '\n';
      return outcome.status;
    } catch (const CLI::ValidationError& e) {
      std::cerr << "usage: " << e.what() << '\n';
      return 2;
    } catch (const kinlab::MalformedInput& e) {
      std::cerr << "error[" << e.kind() << "] " << e.module() << ": " << e.what() << '\n';
      return 2;
    } catch (const kinlab::Error& e) {
      std::cerr << "error[" << e.kind() << "] " << e.module() << ": " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
