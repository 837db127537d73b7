#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hypokit {

/// One CSV row: a free-text label plus named numeric columns in a fixed order.
struct ReportRow {
  std::string label;
  std::vector<std::pair<std::string, double>> values;
};

/// Outcome of one verification harness.
struct EstimateReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  /// Parameters the numbers depend on (sigma, lambda, grid sizes, seed, ...).
  std::map<std::string, double> context;
  std::optional<double> fitted_exponent;
  std::optional<double> fitted_constant;
  /// Named scalar outcomes (defects, residuals, per-family maxima).
  std::map<std::string, double> metrics;
  std::vector<ReportRow> rows;
};

/// ratio = lhs / rhs, or +inf when rhs vanishes and lhs does not.
double safe_ratio(double lhs, double rhs);

}  // namespace hypokit
