#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eitq/metrics.hpp"
#include "eitq/model_fit.hpp"
#include "eitq/scenario.hpp"

namespace eitq {

struct NamedCurve {
  std::string name;  // file stem
  std::string medium;
  MetricCurve curve;
};

/// Per-frequency Monte-Carlo summary across trials.
struct TrialStatistics {
  std::string name;
  std::string medium;
  Quadrature quadrature = Quadrature::amplitude;
  MetricKind kind = MetricKind::conditional_variance;
  std::vector<double> frequencies;
  std::vector<double> mean;
  std::vector<double> stderr_;  // NaN with a single trial
  std::vector<double> model;
  std::vector<double> benchmark;
};

struct DelayReport {
  double estimated_delay = 0.0;
  double model_group_delay = 0.0;
  double sample_period = 0.0;
  double peak_correlation = 0.0;
  double auto_width = 0.0;
  double cross_width = 0.0;
  double auto_first_zero = 0.0;
};

struct FitReport {
  FitResult result;
  std::vector<FitPoint> data;
  std::vector<FitParameter> free;
  EitParameters truth;
};

/// Output-noise bookkeeping for one medium and quadrature of a CV sweep.
struct NoiseBudget {
  std::string medium;
  Quadrature quadrature = Quadrature::amplitude;
  double analytic_excess_db = 0.0;
  double monte_carlo_excess_db = 0.0;  // NaN without Monte-Carlo
};

struct Table {
  std::string filename;
  std::string contents;
};

struct RunResult {
  Scenario scenario;
  std::vector<NamedCurve> curves;
  std::vector<TrialStatistics> statistics;
  std::vector<NoiseBudget> budgets;
  std::optional<DelayReport> delay;
  std::optional<FitReport> fit;
  std::vector<Table> tables;  // extra tables (spectra, correlations, series)
};

using Logger = std::function<void(const std::string&)>;

RunResult run_scenario(const Scenario& scenario, const Logger& log = {});

/// Checks that `dir` can be created and written, before any computation.
void check_output_dir(const std::filesystem::path& dir);

/// Writes every curve, table and the manifest to `dir`; returns the file
/// names written, manifest last.
std::vector<std::string> emit_tables(const RunResult& result, const std::filesystem::path& dir);

std::string manifest_yaml(const RunResult& result, const std::vector<std::string>& files);

std::string statistics_csv(const TrialStatistics& s);

}  // namespace eitq
