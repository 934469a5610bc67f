// Runs every acceptance criterion at full scale, one line per criterion.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "kinlab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kinlab acceptance suite"};
  kinlab::acceptance::SuiteConfig cfg;
  std::string only;
  bool reduced = false;
  app.add_option("--seed", cfg.seed);
  app.add_option("--workers", cfg.workers);
  app.add_option("--only", only, "run a single criterion");
  app.add_flag("--reduced", reduced);
  CLI11_PARSE(app, argc, argv);
  if (reduced) cfg.scale = kinlab::acceptance::Scale::reduced;

  int failed = 0;
  auto print = [&](const kinlab::acceptance::CriterionResult& r) {
    std::cout << kinlab::acceptance::format_line(r) << std::endl;
    failed += r.passed ? 0 : 1;
  };
  if (!only.empty()) {
    print(kinlab::acceptance::run_criterion(only, cfg));
  } else {
    kinlab::acceptance::run_all(cfg, print);
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
