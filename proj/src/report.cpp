#include "kinlab/report.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <boost/version.hpp>
#include <fmt/format.h>
#include <Eigen/Core>

#include "kinlab/error.hpp"

namespace kinlab::report {

namespace {

const char* kModule = "report";

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedInput(kModule, "cannot write " + path.string());
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

Json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string config_hash(const Json& config) {
  Json c = config;
  if (c.is_object()) {
    c.erase("workers");
    c.erase("out");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : c.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw MalformedInput(kModule, "format must be csv or json, got '" + name + "'");
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw MalformedInput(kModule, "row width does not match the columns");
  rows.push_back(std::move(row));
}

std::filesystem::path write_table(const std::filesystem::path& stem, const Table& table, Format format,
                                  const std::string& hash) {
  std::filesystem::path path = stem;
  if (format == Format::csv) {
    path += ".csv";
    auto out = open_output(path);
    out << "# config_hash: " << hash << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
    return path;
  }
  path += ".json";
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  write_json(path, Json{{"columns", table.columns}, {"rows", rows}}, hash);
  return path;
}

void write_json(const std::filesystem::path& path, Json body, const std::string& hash) {
  body["config_hash"] = hash;
  auto out = open_output(path);
  out << body.dump(2) << '\n';
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
  Json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["outputs"] = m.outputs;
  j["timings"] = m.timings;
  j["seed"] = m.seed;
  j["versions"] = {
      {"kinlab", "0.1.0"},
      {"compiler", __VERSION__},
      {"boost", BOOST_LIB_VERSION},
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"fmt", FMT_VERSION},
  };
  write_json(dir / "manifest.json", std::move(j), config_hash(m.config));
}

Json stable_manifest(const Json& manifest) {
  Json j = manifest;
  j.erase("timings");
  if (j.contains("config") && j["config"].is_object()) {
    j["config"].erase("workers");
    j["config"].erase("out");
  }
  return j;
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("KINLAB_OUT_DIR"); env && *env) return env;
  return "kinlab_out";
}

}  // namespace kinlab::report
