#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hypokit/estimates.hpp"
#include "hypokit/grid.hpp"
#include "hypokit/report.hpp"

namespace hypokit {

struct ExperimentInfo {
  std::string name;
  std::string anchor;
  /// Default configuration as pretty-printed JSON.
  std::string defaults;
};

/// The nine runnable experiments, in a fixed order.
const std::vector<ExperimentInfo>& experiment_catalog();
/// Catalog as a JSON array of {name, anchor, defaults}.
std::string catalog_json();

/// Fully resolved configuration: user keys merged over the experiment defaults.
struct ExperimentConfig {
  std::string experiment;
  double sigma = 0.5;
  std::uint64_t seed = 1;
  std::vector<Axis> grid;
  std::vector<FamilyKind> families;
  int family_count = 20;
  double support_T = 1.0;
  std::vector<double> lambdas;
  int y_stride = 1;
  int eta_stride = 1;
  std::string coefficient = "cosgauss";
  std::map<std::string, double> options;
  std::map<std::string, double> tolerances;
  std::filesystem::path output_dir;
  /// The merged JSON document; written verbatim to the manifest.
  std::string resolved;
};

/// Parses a JSON config. Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One asserted tolerance. `upper` means value <= limit passes, otherwise
/// value >= limit.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool upper = true;
  bool passed = false;
};

struct RunResult {
  std::string experiment;
  EstimateReport report;
  std::vector<Check> checks;

  bool passed() const;
};

RunResult run_experiment(const ExperimentConfig& config);

/// RFC 4180 table of the report rows: label, context columns, then row values.
std::string results_csv(const RunResult& result);
std::string summary_json(const RunResult& result);

/// Writes results.csv, summary.json and manifest.json into `dir`.
void write_outputs(const ExperimentConfig& config, const RunResult& result, double wall_seconds,
                   const std::filesystem::path& dir);

/// Runs a config file end to end and maps errors to exit codes: 0 pass,
/// 1 tolerance failure, 2 config error, 3 resource guard.
int run_config_file(const std::filesystem::path& path, std::ostream& out, std::ostream& err,
                    const std::filesystem::path& output_override = {});

struct DeltaRow {
  std::string name;
  std::string a;
  std::string b;
  double relative_change = 0.0;
  /// "improved" or "regressed" for defect, residual and error metrics, "changed"
  /// for other numbers; empty unless the change exceeds 10%.
  std::string flag;
};

struct CompareReport {
  std::vector<DeltaRow> parameters;
  std::vector<DeltaRow> metrics;

  bool empty() const { return parameters.empty() && metrics.empty(); }
};

/// Diffs two run directories. Throws ConfigError when a manifest is missing.
CompareReport compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b);
void print_compare(const CompareReport& report, std::ostream& out);

}  // namespace hypokit
