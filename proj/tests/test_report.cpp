#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinlab/acceptance.hpp"
#include "kinlab/commands.hpp"
#include "kinlab/error.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/report.hpp"
#include "kinlab/rng.hpp"

using namespace kinlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kinlab-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("counter RNG") {
  CounterRng a(CounterRng::batch_key(1, 7)), b(CounterRng::batch_key(1, 7));
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(CounterRng::batch_key(1, 7));
  CHECK(c.at(5) == CounterRng(CounterRng::batch_key(1, 7)).at(5));
  CHECK(CounterRng::batch_key(1, 7) != CounterRng::batch_key(2, 7));
  double mean = 0.0;
  int outside = 0;
  CounterRng u(3);
  for (int i = 0; i < 100000; ++i) {
    const double x = u.next_uniform();
    outside += (x > 0.0 && x < 1.0) ? 0 : 1;
    mean += x;
  }
  CHECK(outside == 0);
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("parallel map keeps index order and propagates errors") {
  const auto v = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                    [](std::size_t i) -> int {
                                      if (i == 6) throw OutOfRange("test", "boom");
                                      return 0;
                                    }),
                  OutOfRange);
}

TEST_CASE("number formatting and config hash") {
  CHECK(report::format_number(0.1) == "0.10000000000000001");
  CHECK(report::format_number(std::nan("")) == "nan");
  CHECK(report::format_number(-INFINITY) == "-inf");
  report::Json a{{"d", 1}, {"seed", 3}, {"workers", 1}};
  report::Json b{{"d", 1}, {"seed", 3}, {"workers", 8}, {"out", "x"}};
  CHECK(report::config_hash(a) == report::config_hash(b));
  b["seed"] = 4;
  CHECK(report::config_hash(a) != report::config_hash(b));
  CHECK(report::config_hash(a).size() == 16);
  CHECK_THROWS_AS(report::parse_format("xml"), MalformedInput);
}

TEST_CASE("tables embed the config hash") {
  const auto dir = scratch("tables");
  report::Table t;
  t.columns = {"V", "label"};
  t.add({2.0, std::string("a,b")});
  t.add({std::int64_t{3}, std::string("plain")});
  CHECK_THROWS_AS(t.add({1.0}), MalformedInput);
  const auto csv = report::write_table(dir / "t", t, report::Format::csv, "abc");
  CHECK(slurp(csv) == "# config_hash: abc\nV,label\n2,\"a,b\"\n3,plain\n");
  const auto json = report::write_table(dir / "t", t, report::Format::json, "abc");
  const auto j = report::Json::parse(slurp(json));
  CHECK(j["config_hash"] == "abc");
  CHECK(j["rows"][0]["V"] == 2.0);
  CHECK(j["columns"][1] == "label");
  fs::remove_all(dir);
}

TEST_CASE("schedules and rational lists") {
  CHECK(commands::parse_schedule("8:512:x2") == std::vector<double>{8, 16, 32, 64, 128, 256, 512});
  CHECK(commands::parse_schedule("1e-1:1e-3:x0.1").size() == 3);
  CHECK(commands::parse_schedule("1, 2,5") == std::vector<double>{1, 2, 5});
  CHECK_THROWS_AS(commands::parse_schedule("8:512:x0.5"), MalformedInput);
  CHECK_THROWS_AS(commands::parse_schedule("8:512:2"), MalformedInput);
  CHECK_THROWS_AS(commands::parse_schedule("a,b"), MalformedInput);
  const auto r = commands::parse_rational_list("2,3/2,11/10");
  CHECK(r.size() == 3);
  CHECK(r[2] == ExtRational(11, 10));
  CHECK_THROWS_AS(commands::make_family("cauchy", 1), MalformedInput);
}

TEST_CASE("configs reject unknown keys and wrong types") {
  CHECK(commands::merge_config("identity", report::Json::object())["tol"] == 0.01);
  CHECK(commands::merge_config("identity", {{"V", "1,2"}})["V"] == "1,2");
  CHECK(commands::merge_config("identity", {{"tol", 1}})["tol"].is_number_float());
  CHECK_THROWS_AS(commands::merge_config("identity", {{"bogus", 1}}), MalformedInput);
  CHECK_THROWS_AS(commands::merge_config("identity", {{"d", "two"}}), MalformedInput);
  CHECK_THROWS_AS(commands::merge_config("nope", report::Json::object()), MalformedInput);
  for (const auto& name : commands::command_names()) CHECK(commands::defaults(name).is_object());
}

TEST_CASE("exponents command and manifest") {
  const auto dir = scratch("exponents");
  const auto out = commands::run("exponents", commands::merge_config("exponents", report::Json::object()), dir);
  CHECK(out.status == 0);
  CHECK(out.summary == "endpoint");
  const auto m = report::Json::parse(slurp(dir / "manifest.json"));
  for (const char* key : {"command", "config", "outputs", "timings", "seed", "versions", "config_hash"}) {
    CHECK(m.contains(key));
  }
  CHECK(m["command"] == "exponents");
  const auto e = report::Json::parse(slurp(dir / "exponents.json"));
  CHECK(e["config_hash"] == m["config_hash"]);
  fs::remove_all(dir);
}

TEST_CASE("identical configs reproduce outputs bit for bit") {
  const auto a = scratch("repro-a"), b = scratch("repro-b");
  auto cfg = commands::merge_config("angular", {{"d", 3}, {"eps-schedule", "0.2:0.05:x0.5"}, {"samples", 20000}});
  commands::run("angular", cfg, a);
  cfg["workers"] = 3;
  commands::run("angular", cfg, b);
  CHECK(acceptance::compare_output_trees(a, b) == "");
  std::ofstream(b / "angular.csv", std::ios::app) << "tampered\n";
  CHECK(acceptance::compare_output_trees(a, b) != "");
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("acceptance catalogue") {
  const auto& c = acceptance::criteria();
  CHECK(c.size() == 8);
  for (const auto& x : c) CHECK(x.budget_seconds > 0.0);
  acceptance::SuiteConfig cfg;
  const auto r = acceptance::run_criterion("exponent-algebra", cfg);
  CHECK(r.passed);
  CHECK(acceptance::format_line(r).rfind("PASS exponent-algebra", 0) == 0);
  CHECK_THROWS_AS(acceptance::run_criterion("nope", cfg), MalformedInput);
}
