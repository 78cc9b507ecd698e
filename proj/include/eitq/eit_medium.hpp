#pragma once

#include <complex>
#include <span>
#include <vector>

namespace eitq {

/// Physical constants of a three-level Lambda medium. Rates are angular
/// (rad/s). N and g only ever enter as the product N|g|^2, which is stored
/// directly as `od_rate`.
struct EitParameters {
  double od_rate = 0.0;           // N|g|^2
  double spontaneous_rate = 0.0;  // gamma
  double dephasing_rate = 0.0;    // gamma_0
  double pump_rabi = 0.0;         // |g E_c|
  double wavenumber = 0.0;        // k, 1/m
  double length = 0.0;            // L, m
  double light_speed = 299792458.0;

  /// Throws ParameterError if any invariant is violated.
  void validate() const;

  bool operator==(const EitParameters&) const = default;
};

/// N|g|^2 from a separate atomic density and coupling constant.
double od_rate_from(double atomic_density, double coupling_constant);

/// od_rate giving a zero-frequency group delay of `delay` seconds when the
/// dephasing rate is zero; the other fields of `base` are kept.
EitParameters with_group_delay(EitParameters base, double delay);

struct ChannelResponse {
  double omega = 0.0;
  std::complex<double> chi;
  std::complex<double> amplitude;  // t = sqrt(eta) e^{i phi}
  double transmissivity = 1.0;     // eta, intensity
  double phase = 0.0;              // phi
  double group_delay = 0.0;        // d phi / d omega
};

std::complex<double> susceptibility(const EitParameters& params, double omega);

ChannelResponse channel_response(const EitParameters& params, double omega);
std::vector<ChannelResponse> channel_response(const EitParameters& params,
                                              std::span<const double> omegas);

/// Closed-form d phi / d omega.
double group_delay(const EitParameters& params, double omega);

/// Central finite difference of the phase, for cross-checking group_delay.
double group_delay_numeric(const EitParameters& params, double omega, double step = 1.0);

}  // namespace eitq
