#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "eitq/eit_medium.hpp"
#include "eitq/metrics.hpp"

namespace eitq {

enum class FitParameter { dephasing_rate, od_rate, pump_rabi };

std::string_view to_string(FitParameter p);
FitParameter parse_fit_parameter(std::string_view s);

struct FitPoint {
  double omega = 0.0;  // rad/s
  double value = 0.0;
  double sigma = 1.0;
};

struct FreeParameter {
  FitParameter which = FitParameter::dephasing_rate;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// Weighted least-squares fit of a benchmark curve (1 - eta for
/// benchmark_cv, eta for benchmark_ts) to data. `start` holds both the
/// initial guesses of the free parameters and the values of the fixed ones.
struct FitProblem {
  std::vector<FitPoint> data;
  MetricKind kind = MetricKind::benchmark_cv;
  EitParameters start;
  std::vector<FreeParameter> free{{FitParameter::dephasing_rate}};
  bool weighted = false;  // true when sigmas are measurement uncertainties
  std::size_t max_iterations = 200;
  double tolerance = 1e-10;

  void validate() const;
};

struct FitResult {
  EitParameters best;
  double residual_norm = 0.0;
  double initial_residual_norm = 0.0;
  std::vector<double> uncertainties;  // one per free parameter
  std::size_t iterations = 0;
  std::vector<std::string> trace;
};

double get(const EitParameters& p, FitParameter which);
void set(EitParameters& p, FitParameter which, double value);

/// Model value of the fitted curve kind at omega.
double fit_model(const EitParameters& p, MetricKind kind, double omega);

/// Damped Gauss-Newton (Levenberg-Marquardt) with a central-difference
/// Jacobian. Throws FitError on non-convergence and DegenerateFit when the
/// Jacobian is rank deficient.
FitResult fit(const FitProblem& problem);

/// Parses "freq_hz,value,sigma" rows (sigma column optional). Frequencies
/// are converted to rad/s.
std::vector<FitPoint> fit_points_from_csv(std::string_view text, bool* has_sigma = nullptr);
std::string fit_points_to_csv(const std::vector<FitPoint>& points);

}  // namespace eitq
