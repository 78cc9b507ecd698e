#pragma once

#include <complex>
#include <string_view>

#include "eitq/eit_medium.hpp"

namespace eitq {

enum class Quadrature { amplitude, phase };

std::string_view to_string(Quadrature q);
Quadrature parse_quadrature(std::string_view s);

/// Gaussian moments of the X+ / X- sideband quadratures at one frequency,
/// in quantum-noise-limit units (vacuum variance = 1).
struct GaussianSidebandState {
  double omega = 0.0;
  std::complex<double> mean_amp;
  std::complex<double> mean_phase;
  double var_amp = 1.0;
  double var_phase = 1.0;

  static GaussianSidebandState vacuum(double omega) { return {omega, {}, {}, 1.0, 1.0}; }

  double variance(Quadrature q) const { return q == Quadrature::amplitude ? var_amp : var_phase; }
  std::complex<double> mean(Quadrature q) const {
    return q == Quadrature::amplitude ? mean_amp : mean_phase;
  }

  /// Rejects squeezed (V < 1) states.
  void validate() const;
};

/// Where lumped excess noise enters relative to the medium's loss.
enum class InjectionPlacement {
  after_loss,   // V -> eta V + 1 - eta + e
  before_loss,  // V -> eta (V + e) + 1 - eta
};

std::string_view to_string(InjectionPlacement p);
InjectionPlacement parse_placement(std::string_view s);

/// Pump-to-probe noise coupling plus any additional lumped excess noise.
struct NoiseInjection {
  double kappa_amp = 0.0;
  double kappa_phase = 0.0;
  double pump_var_amp = 1.0;
  double pump_var_phase = 1.0;
  double extra_var_amp = 0.0;
  double extra_var_phase = 0.0;
  InjectionPlacement placement = InjectionPlacement::after_loss;

  void validate() const;

  /// kappa (pump_var - 1) + extra for quadrature q.
  double excess(Quadrature q) const;
  bool is_zero() const { return excess(Quadrature::amplitude) == 0.0 && excess(Quadrature::phase) == 0.0; }

  bool operator==(const NoiseInjection&) const = default;
};

GaussianSidebandState apply_passive(const GaussianSidebandState& state,
                                    const ChannelResponse& response);

GaussianSidebandState apply_injection(const GaussianSidebandState& state,
                                      const NoiseInjection& inj);

/// Passive loss and injection composed in the order set by inj.placement.
GaussianSidebandState end_to_end(const GaussianSidebandState& state,
                                 const ChannelResponse& response,
                                 const NoiseInjection& inj);

/// Output variance of quadrature q for an input of variance v_in.
double output_variance(const ChannelResponse& response, const NoiseInjection& inj, Quadrature q,
                       double v_in = 1.0);

}  // namespace eitq
