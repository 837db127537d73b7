#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hypokit/errors.hpp"
#include "hypokit/experiment.hpp"
#include "hypokit/parallel.hpp"

using namespace hypokit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypokit_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_file(const fs::path& cfg, const fs::path& out_dir, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_config_file(cfg, out, err, out_dir);
  if (err_text) *err_text = err.str();
  return code;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"({"experiment": "lemma-1d", "sigma": 0.25, "options": {"points": 10}})");
  CHECK(c.experiment == "lemma-1d");
  CHECK(c.sigma == 0.25);
  CHECK(c.options.at("points") == 10);
  CHECK(c.options.at("profiles") == 20);  // default kept
  CHECK(c.grid.size() == 1);
  CHECK(nlohmann::json::parse(c.resolved)["sigma"] == 0.25);

  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "nope"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "lemma-1d", "sigmaa": 0.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "verify-wick", "lambdas": [1.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "verify-dilation", "lambdas": [0.5]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "lemma-1d", "support_T": 2.5})"), ConfigError);
  CHECK_NOTHROW(parse_config(R"({"experiment": "key-estimate", "sigma": 1.0})"));
  CHECK_THROWS_AS(parse_config(R"({"experiment": "lemma-1d", "sigma": 1.0})"), ConfigError);
  try {
    parse_config(R"({"experiment": "key-estimate", "sigma": 1.5})");
    FAIL("sigma = 1.5 accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sigma") != std::string::npos);
  }
}

TEST_CASE("catalog") {
  const auto& cat = experiment_catalog();
  CHECK(cat.size() == 9);
  bool sweep = false;
  for (const auto& e : cat) {
    sweep |= e.name == "scaling-sweep";
    CHECK(!e.anchor.empty());
    CHECK(nlohmann::json::parse(e.defaults)["experiment"] == e.name);
    CHECK_NOTHROW(parse_config(e.defaults));
  }
  CHECK(sweep);
  const auto j = nlohmann::json::parse(catalog_json());
  CHECK(j.is_array());
  CHECK(j.size() == 9);
}

TEST_CASE("CSV quoting") {
  RunResult r;
  r.experiment = "x";
  r.report.context = {{"sigma", 0.5}};
  r.report.rows.push_back({"plain", {{"a", 0.1}}});
  r.report.rows.push_back({"with,comma \"q\"", {{"a", 1.0 / 3.0}}});
  const std::string csv = results_csv(r);
  CHECK(csv == "label,sigma,a\r\nplain,0.5,0.10000000000000001\r\n\"with,comma \"\"q\"\"\",0.5,0.33333333333333331\r\n");
}

TEST_CASE("runs are deterministic and write three files") {
  const int saved = thread_count();
  set_thread_count(1);
  const fs::path dir = scratch("det");
  const fs::path cfg = write_config(dir, R"({"experiment": "lemma-1d", "options": {"points": 20, "profiles": 4}})");
  REQUIRE(run_file(cfg, dir / "a") == 0);
  REQUIRE(run_file(cfg, dir / "b") == 0);
  for (const char* f : {"results.csv", "summary.json", "manifest.json"}) CHECK(fs::exists(dir / "a" / f));
  CHECK(slurp(dir / "a" / "results.csv") == slurp(dir / "b" / "results.csv"));
  const auto man = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(man["seed"] == 1);
  CHECK(man["threads"] == 1);
  CHECK(man["config"]["experiment"] == "lemma-1d");

  SUBCASE("compare") {
    CHECK(compare_runs(dir / "a", dir / "b").empty());
    const fs::path cfg2 =
        write_config(dir, R"({"experiment": "lemma-1d", "sigma": 0.75, "options": {"points": 20, "profiles": 4}})");
    REQUIRE(run_file(cfg2, dir / "c") == 0);
    const CompareReport rep = compare_runs(dir / "a", dir / "c");
    bool sigma_row = false;
    for (const auto& p : rep.parameters) sigma_row |= p.name == "sigma";
    CHECK(sigma_row);
    CHECK(!rep.metrics.empty());
    std::ostringstream out;
    print_compare(rep, out);
    CHECK(out.str().find("sigma") != std::string::npos);
    CHECK_THROWS_AS(compare_runs(dir / "a", dir / "missing"), ConfigError);
  }
  SUBCASE("refinement is flagged") {
    // Synthetic pair: b's residual is ten times smaller.
    for (const char* run : {"r1", "r2"}) fs::create_directories(dir / run);
    fs::copy_file(dir / "a" / "manifest.json", dir / "r1" / "manifest.json");
    fs::copy_file(dir / "a" / "manifest.json", dir / "r2" / "manifest.json");
    std::ofstream(dir / "r1" / "summary.json") << R"({"experiment": "x", "residual": 1e-6, "max_ratio": 2.0})";
    std::ofstream(dir / "r2" / "summary.json") << R"({"experiment": "x", "residual": 1e-7, "max_ratio": 2.5})";
    const CompareReport rep = compare_runs(dir / "r1", dir / "r2");
    REQUIRE(rep.metrics.size() == 2);
    for (const auto& m : rep.metrics) {
      if (m.name == "residual") CHECK(m.flag == "improved");
      if (m.name == "max_ratio") CHECK(m.flag == "changed");
    }
    CHECK(compare_runs(dir / "r2", dir / "r1").metrics[0].flag != "improved");
  }
  set_thread_count(saved);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  std::string err;
  CHECK(run_file(write_config(dir, R"({"experiment": "key-estimate", "sigma": 1.5})"), dir / "o", &err) == 2);
  CHECK(err.find("sigma") != std::string::npos);
  CHECK(run_file(dir / "absent.json", dir / "o") == 2);
  CHECK(run_file(write_config(dir, R"({"experiment": "verify-weyl", "tolerances": {"affine_error": 1e-30}})"), dir / "o") == 1);
  CHECK(run_file(write_config(dir, R"({"experiment": "verify-weyl"})"), dir / "o") == 0);
}

TEST_CASE("command-line binary") {
  const std::string bin = HYPOKIT_CLI_PATH;
  const fs::path dir = scratch("bin");
  const std::string q = "'" + bin + "'";
  CHECK(shell(q + " list > '" + (dir / "list.txt").string() + "'") == 0);
  CHECK(slurp(dir / "list.txt").find("scaling-sweep") != std::string::npos);
  CHECK(shell(q + " list --json > '" + (dir / "list.json").string() + "'") == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "list.json")).size() == 9);
  std::ofstream(dir / "bad.json") << R"({"experiment": "key-estimate", "sigma": 1.5})";
  CHECK(shell(q + " run '" + (dir / "bad.json").string() + "' 2>/dev/null") == 2);
  std::ofstream(dir / "ok.json") << R"({"experiment": "verify-weyl"})";
  CHECK(shell(q + " --threads 1 run '" + (dir / "ok.json").string() + "' -o '" + (dir / "r1").string() + "' >/dev/null") == 0);
  CHECK(shell(q + " run '" + (dir / "ok.json").string() + "' -o '" + (dir / "r2").string() + "' >/dev/null") == 0);
  CHECK(shell(q + " compare '" + (dir / "r1").string() + "' '" + (dir / "r2").string() + "' >/dev/null") == 0);
  CHECK(shell(q + " compare '" + (dir / "r1").string() + "' '" + (dir / "nowhere").string() + "' 2>/dev/null") == 2);
  CHECK(shell(q + " frobnicate 2>/dev/null") == 2);
}
