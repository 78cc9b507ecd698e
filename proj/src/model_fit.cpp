#include "eitq/model_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eitq/errors.hpp"
#include "eitq/series_io.hpp"
#include "eitq/units.hpp"

namespace eitq {
namespace {

constexpr double kJacobianStep = 1e-6;
constexpr double kRankTolerance = 1e-10;

// Optimization runs on x_j = p_j / scale_j so that rates (~1e4) and the
// optical-depth rate (~1e18) are equally conditioned.
struct Scaled {
  const FitProblem& problem;
  std::vector<double> scale;

  EitParameters params(const Eigen::VectorXd& x) const {
    EitParameters p = problem.start;
    for (std::size_t j = 0; j < scale.size(); ++j) set(p, problem.free[j].which, x[j] * scale[j]);
    return p;
  }

  // Probes are clamped to the bounds, so every evaluation is a valid medium.
  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const {
    const EitParameters p = params(x);
    Eigen::VectorXd r(problem.data.size());
    for (std::size_t i = 0; i < problem.data.size(); ++i) {
      const FitPoint& d = problem.data[i];
      r[static_cast<Eigen::Index>(i)] = (fit_model(p, problem.kind, d.omega) - d.value) / d.sigma;
    }
    return r;
  }

  double lower(std::size_t j) const { return problem.free[j].lower / scale[j]; }
  double upper(std::size_t j) const { return problem.free[j].upper / scale[j]; }

  Eigen::VectorXd clamp(Eigen::VectorXd x) const {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const auto u = static_cast<std::size_t>(j);
      x[j] = std::clamp(x[j], lower(u), upper(u));
    }
    return x;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const auto n = static_cast<Eigen::Index>(problem.data.size());
    Eigen::MatrixXd jac(n, x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const auto u = static_cast<std::size_t>(j);
      const double h = kJacobianStep * std::max(1.0, std::abs(x[j]));
      Eigen::VectorXd hi = x, lo = x;
      hi[j] += h;
      lo[j] -= h;
      if (lo[j] < lower(u)) lo[j] = x[j];
      if (hi[j] > upper(u)) hi[j] = x[j];
      // Pinned bounds leave no room to probe: the data cannot see this parameter.
      if (hi[j] == lo[j]) {
        jac.col(j).setZero();
        continue;
      }
      jac.col(j) = (residuals(hi) - residuals(lo)) / (hi[j] - lo[j]);
    }
    return jac;
  }
};

std::string describe(const Eigen::VectorXd& x, const Scaled& s, std::size_t iter, double cost,
                     double lambda) {
  std::ostringstream os;
  os << "iter " << iter << " cost " << format_double(cost) << " lambda " << format_double(lambda);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    os << ' ' << to_string(s.problem.free[static_cast<std::size_t>(j)].which) << '='
       << format_double(x[j] * s.scale[static_cast<std::size_t>(j)]);
  }
  return os.str();
}

void check_rank(const Eigen::MatrixXd& jac, const Scaled& s, const std::vector<std::string>& trace) {
  Eigen::VectorXd norms = jac.colwise().norm();
  Eigen::MatrixXd unit = jac;
  for (Eigen::Index j = 0; j < jac.cols(); ++j) {
    if (norms[j] == 0.0) {
      throw DegenerateFit("degenerate fit: data do not depend on " +
                              std::string(to_string(s.problem.free[static_cast<std::size_t>(j)].which)),
                          trace);
    }
    unit.col(j) /= norms[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(unit, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv[sv.size() - 1] < kRankTolerance * sv[0]) {
    const Eigen::VectorXd null = svd.matrixV().col(sv.size() - 1);
    std::string combo;
    for (Eigen::Index j = 0; j < null.size(); ++j) {
      if (std::abs(null[j]) < 0.1) continue;
      if (!combo.empty()) combo += " + ";
      combo += format_double(null[j]) + "*" +
               std::string(to_string(s.problem.free[static_cast<std::size_t>(j)].which));
    }
    throw DegenerateFit("degenerate fit: unidentifiable combination " + combo, trace);
  }
}

}  // namespace

std::string_view to_string(FitParameter p) {
  switch (p) {
    case FitParameter::dephasing_rate: return "dephasing_rate";
    case FitParameter::od_rate: return "od_rate";
    case FitParameter::pump_rabi: return "pump_rabi";
  }
  return "unknown";
}

FitParameter parse_fit_parameter(std::string_view s) {
  if (s == "dephasing_rate") return FitParameter::dephasing_rate;
  if (s == "od_rate") return FitParameter::od_rate;
  if (s == "pump_rabi") return FitParameter::pump_rabi;
  throw ParameterError("unknown fit parameter '" + std::string(s) + "'");
}

double get(const EitParameters& p, FitParameter which) {
  switch (which) {
    case FitParameter::dephasing_rate: return p.dephasing_rate;
    case FitParameter::od_rate: return p.od_rate;
    case FitParameter::pump_rabi: return p.pump_rabi;
  }
  return 0.0;
}

void set(EitParameters& p, FitParameter which, double value) {
  switch (which) {
    case FitParameter::dephasing_rate: p.dephasing_rate = value; break;
    case FitParameter::od_rate: p.od_rate = value; break;
    case FitParameter::pump_rabi: p.pump_rabi = value; break;
  }
}

double fit_model(const EitParameters& p, MetricKind kind, double omega) {
  const ChannelResponse r = channel_response(p, omega);
  return kind == MetricKind::benchmark_ts ? r.transmissivity : 1.0 - r.transmissivity;
}

void FitProblem::validate() const {
  start.validate();
  if (kind != MetricKind::benchmark_cv && kind != MetricKind::benchmark_ts) {
    throw ParameterError("fit: only benchmark_cv and benchmark_ts curves can be fitted");
  }
  if (free.empty()) throw ParameterError("fit: no free parameters");
  if (data.size() < 2 * free.size()) {
    throw ParameterError("fit: need at least twice as many data points as free parameters");
  }
  for (std::size_t i = 0; i < free.size(); ++i) {
    for (std::size_t j = i + 1; j < free.size(); ++j) {
      if (free[i].which == free[j].which) throw ParameterError("fit: parameter listed twice");
    }
    const FreeParameter& f = free[i];
    const double v = get(start, f.which);
    if (!(f.lower <= v && v <= f.upper)) throw ParameterError("fit: initial guess outside bounds");
    const bool positive = f.which == FitParameter::pump_rabi;
    if (f.lower < 0.0 || (positive && f.lower <= 0.0)) {
      throw ParameterError("fit: bounds for " + std::string(to_string(f.which)) +
                           " violate the medium's invariants");
    }
  }
  for (const FitPoint& d : data) {
    if (!(d.sigma > 0.0) || !std::isfinite(d.value) || !std::isfinite(d.omega)) {
      throw ParameterError("fit: data points need finite values and sigma > 0");
    }
  }
}

FitResult fit(const FitProblem& problem) {
  problem.validate();
  const std::size_t np = problem.free.size();
  Scaled s{problem, {}};
  Eigen::VectorXd x(static_cast<Eigen::Index>(np));
  for (std::size_t j = 0; j < np; ++j) {
    const double v = get(problem.start, problem.free[j].which);
    s.scale.push_back(v != 0.0 ? std::abs(v) : 1.0);
    x[static_cast<Eigen::Index>(j)] = v / s.scale.back();
  }

  FitResult result;
  Eigen::VectorXd r = s.residuals(x);
  double cost = r.squaredNorm();
  result.initial_residual_norm = std::sqrt(cost);
  double lambda = 1e-3;
  bool converged = cost == 0.0;
  result.trace.push_back(describe(x, s, 0, cost, lambda));

  std::size_t iter = 0;
  while (!converged && iter < problem.max_iterations) {
    ++iter;
    const Eigen::MatrixXd jac = s.jacobian(x);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd damping = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

    bool accepted = false;
    while (!accepted && lambda < 1e20) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * damping;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd trial = s.clamp(x + step);
      const Eigen::VectorXd actual = trial - x;
      const Eigen::VectorXd r_trial = s.residuals(trial);
      const double cost_trial = r_trial.squaredNorm();
      double rel_step = 0.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        rel_step = std::max(rel_step, std::abs(actual[j]) / std::max(std::abs(x[j]), 1e-12));
      }
      if (cost_trial <= cost) {
        const double rel_cost = cost > 0.0 ? (cost - cost_trial) / cost : 0.0;
        x = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        converged = cost == 0.0 ||
                    (rel_step < problem.tolerance && rel_cost < problem.tolerance);
      } else {
        lambda *= 10.0;
        // A step this small that still cannot lower the cost means the
        // iterate already sits at the floating-point minimum.
        if (rel_step < problem.tolerance) {
          converged = true;
          break;
        }
      }
    }
    result.trace.push_back(describe(x, s, iter, cost, lambda));
    if (!accepted && !converged) {
      throw FitError("fit stalled: damping exceeded 1e20 without reducing the residual",
                     result.trace);
    }
  }
  if (!converged) {
    throw FitError("fit did not converge in " + std::to_string(problem.max_iterations) +
                       " iterations",
                   result.trace);
  }

  const Eigen::MatrixXd jac = s.jacobian(x);
  check_rank(jac, s, result.trace);
  const Eigen::MatrixXd cov_scaled = (jac.transpose() * jac).inverse();
  const auto dof = static_cast<double>(problem.data.size() - np);
  const double variance_scale = problem.weighted ? 1.0 : cost / dof;

  result.best = s.params(x);
  result.best.validate();
  result.residual_norm = std::sqrt(cost);
  result.iterations = iter;
  for (std::size_t j = 0; j < np; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    result.uncertainties.push_back(std::sqrt(cov_scaled(jj, jj) * variance_scale) * s.scale[j]);
  }
  return result;
}

std::vector<FitPoint> fit_points_from_csv(std::string_view text, bool* has_sigma) {
  std::vector<FitPoint> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  bool sigma_column = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line == "freq_hz,value,sigma") {
        sigma_column = true;
      } else if (line != "freq_hz,value") {
        throw ParameterError("fit data CSV must start with 'freq_hz,value[,sigma]'");
      }
      header = false;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != (sigma_column ? 3u : 2u)) throw ParameterError("fit data CSV: wrong column count");
    FitPoint p;
    p.omega = hz_to_rad(parse_double(cols[0]));
    p.value = parse_double(cols[1]);
    p.sigma = sigma_column ? parse_double(cols[2]) : 1.0;
    out.push_back(p);
  }
  if (has_sigma) *has_sigma = sigma_column;
  return out;
}

std::string fit_points_to_csv(const std::vector<FitPoint>& points) {
  std::string out = "freq_hz,value,sigma\n";
  for (const FitPoint& p : points) {
    out += format_double(rad_to_hz(p.omega)) + "," + format_double(p.value) + "," +
           format_double(p.sigma) + "\n";
  }
  return out;
}

}  // namespace eitq
