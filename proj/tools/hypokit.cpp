#include <CLI11.hpp>
#include <iostream>

#include "hypokit/errors.hpp"
#include "hypokit/experiment.hpp"
#include "hypokit/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hypokit: numerical checks for hypoelliptic estimates"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (1 = deterministic); default HYPOKIT_THREADS or 1")
      ->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  std::string config, out_dir;
  run->add_option("config", config, "config file")->required();
  run->add_option("-o,--output", out_dir, "output directory (overrides output_dir)");

  auto* list = app.add_subcommand("list", "list experiments with their default configs");
  bool as_json = false;
  list->add_flag("--json", as_json, "print the catalog as JSON");

  auto* compare = app.add_subcommand("compare", "diff two run directories");
  std::string a, b;
  compare->add_option("a", a, "first run directory")->required();
  compare->add_option("b", b, "second run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) hypokit::set_thread_count(threads);

  if (*run) return hypokit::run_config_file(config, std::cout, std::cerr, out_dir);
  if (*list) {
    if (as_json) {
      std::cout << hypokit::catalog_json() << "\n";
      return 0;
    }
    for (const auto& e : hypokit::experiment_catalog())
      std::cout << e.name << " - " << e.anchor << "\n" << e.defaults << "\n\n";
    return 0;
  }
  try {
    hypokit::print_compare(hypokit::compare_runs(a, b), std::cout);
  } catch (const hypokit::ConfigError& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
