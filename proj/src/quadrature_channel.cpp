#include "eitq/quadrature_channel.hpp"

#include <cmath>
#include <string>

#include "eitq/errors.hpp"

namespace eitq {
namespace {

// Tolerance on V >= 1 so that round-off in composed maps is not rejected.
constexpr double kVarianceSlack = 1e-12;

double passive_variance(double v, double eta) { return 1.0 + eta * (v - 1.0); }

}  // namespace

std::string_view to_string(Quadrature q) {
  return q == Quadrature::amplitude ? "amplitude" : "phase";
}

Quadrature parse_quadrature(std::string_view s) {
  if (s == "amplitude" || s == "amp" || s == "+") return Quadrature::amplitude;
  if (s == "phase" || s == "-") return Quadrature::phase;
  throw ParameterError("unknown quadrature '" + std::string(s) + "'");
}

std::string_view to_string(InjectionPlacement p) {
  return p == InjectionPlacement::after_loss ? "after_loss" : "before_loss";
}

InjectionPlacement parse_placement(std::string_view s) {
  if (s == "after_loss") return InjectionPlacement::after_loss;
  if (s == "before_loss") return InjectionPlacement::before_loss;
  throw ParameterError("unknown injection placement '" + std::string(s) + "'");
}

void GaussianSidebandState::validate() const {
  if (!(var_amp >= 1.0 - kVarianceSlack) || !(var_phase >= 1.0 - kVarianceSlack)) {
    throw ParameterError("sideband state variances must be >= 1 (no squeezed inputs)");
  }
}

void NoiseInjection::validate() const {
  auto in_unit = [](double k) { return k >= 0.0 && k <= 1.0; };
  if (!in_unit(kappa_amp) || !in_unit(kappa_phase)) {
    throw ParameterError("pump coupling fractions must lie in [0, 1]");
  }
  if (!(pump_var_amp >= 1.0) || !(pump_var_phase >= 1.0)) {
    throw ParameterError("pump variances must be >= 1 (QNL units)");
  }
  if (!(extra_var_amp >= 0.0) || !(extra_var_phase >= 0.0)) {
    throw ParameterError("extra variances must be >= 0");
  }
}

double NoiseInjection::excess(Quadrature q) const {
  if (q == Quadrature::amplitude) return kappa_amp * (pump_var_amp - 1.0) + extra_var_amp;
  return kappa_phase * (pump_var_phase - 1.0) + extra_var_phase;
}

GaussianSidebandState apply_passive(const GaussianSidebandState& state,
                                    const ChannelResponse& response) {
  state.validate();
  const double tol = 1e-12 * std::max(1.0, std::abs(state.omega));
  if (std::abs(state.omega - response.omega) > tol) {
    throw ContractViolation("apply_passive: state at omega = " + std::to_string(state.omega) +
                            " but response at omega = " + std::to_string(response.omega));
  }
  const double eta = response.transmissivity;
  GaussianSidebandState out = state;
  out.mean_amp = state.mean_amp * response.amplitude;
  out.mean_phase = state.mean_phase * response.amplitude;
  out.var_amp = passive_variance(state.var_amp, eta);
  out.var_phase = passive_variance(state.var_phase, eta);
  return out;
}

GaussianSidebandState apply_injection(const GaussianSidebandState& state,
                                      const NoiseInjection& inj) {
  state.validate();
  inj.validate();
  GaussianSidebandState out = state;
  out.var_amp += inj.excess(Quadrature::amplitude);
  out.var_phase += inj.excess(Quadrature::phase);
  return out;
}

GaussianSidebandState end_to_end(const GaussianSidebandState& state,
                                 const ChannelResponse& response,
                                 const NoiseInjection& inj) {
  if (inj.placement == InjectionPlacement::before_loss) {
    return apply_passive(apply_injection(state, inj), response);
  }
  return apply_injection(apply_passive(state, response), inj);
}

double output_variance(const ChannelResponse& response, const NoiseInjection& inj, Quadrature q,
                       double v_in) {
  GaussianSidebandState s = GaussianSidebandState::vacuum(response.omega);
  s.var_amp = s.var_phase = v_in;
  return end_to_end(s, response, inj).variance(q);
}

}  // namespace eitq
