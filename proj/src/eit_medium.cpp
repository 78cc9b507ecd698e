#include "eitq/eit_medium.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eitq/errors.hpp"

namespace eitq {
namespace {

using cd = std::complex<double>;

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(std::string("EitParameters: ") + what);
}

// Prefactor 2N|g|^2 / (c k).
double chi_scale(const EitParameters& p) { return 2.0 * p.od_rate / (p.light_speed * p.wavenumber); }

// (gamma_0 - i w)(gamma - i w) + |g E_c|^2, guarded against a pole.
cd denominator(const EitParameters& p, cd u, double omega) {
  const cd v(p.spontaneous_rate, -omega);
  const double rabi2 = p.pump_rabi * p.pump_rabi;
  const cd d = u * v + rabi2;
  const double scale = std::abs(u * v) + rabi2;
  if (std::abs(d) <= std::numeric_limits<double>::epsilon() * scale) {
    throw DegenerateParameters("susceptibility denominator vanishes at omega = " +
                               std::to_string(omega));
  }
  return d;
}

}  // namespace

void EitParameters::validate() const {
  require(std::isfinite(od_rate) && od_rate >= 0.0, "N|g|^2 must be >= 0");
  require(std::isfinite(spontaneous_rate) && spontaneous_rate > 0.0,
          "spontaneous rate must be > 0");
  require(std::isfinite(dephasing_rate) && dephasing_rate >= 0.0,
          "dephasing rate must be >= 0");
  require(std::isfinite(pump_rabi) && pump_rabi > 0.0, "pump Rabi frequency must be > 0");
  require(std::isfinite(wavenumber) && wavenumber > 0.0, "wavenumber must be > 0");
  require(std::isfinite(length) && length > 0.0, "medium length must be > 0");
  require(std::isfinite(light_speed) && light_speed > 0.0, "light speed must be > 0");
}

double od_rate_from(double atomic_density, double coupling_constant) {
  return atomic_density * coupling_constant * coupling_constant;
}

EitParameters with_group_delay(EitParameters base, double delay) {
  if (!(delay >= 0.0)) throw ParameterError("target group delay must be >= 0");
  base.od_rate = delay * base.light_speed * base.pump_rabi * base.pump_rabi / base.length;
  return base;
}

std::complex<double> susceptibility(const EitParameters& params, double omega) {
  params.validate();
  const cd u(params.dephasing_rate, -omega);
  const cd d = denominator(params, u, omega);
  return cd(0.0, chi_scale(params)) * u / d;
}

double group_delay(const EitParameters& params, double omega) {
  params.validate();
  // d chi / d omega = scale * (|gE_c|^2 - u^2) / D^2, with u = gamma_0 - i omega.
  const cd u(params.dephasing_rate, -omega);
  const cd d = denominator(params, u, omega);
  const cd dchi = chi_scale(params) * (params.pump_rabi * params.pump_rabi - u * u) / (d * d);
  return 0.5 * params.wavenumber * params.length * dchi.real();
}

ChannelResponse channel_response(const EitParameters& params, double omega) {
  ChannelResponse r;
  r.omega = omega;
  r.chi = susceptibility(params, omega);
  const double kl = params.wavenumber * params.length;
  r.transmissivity = std::exp(-kl * r.chi.imag());
  r.phase = 0.5 * kl * r.chi.real();
  r.amplitude = std::polar(std::sqrt(r.transmissivity), r.phase);
  r.group_delay = group_delay(params, omega);
  return r;
}

std::vector<ChannelResponse> channel_response(const EitParameters& params,
                                              std::span<const double> omegas) {
  std::vector<ChannelResponse> out;
  out.reserve(omegas.size());
  for (double w : omegas) out.push_back(channel_response(params, w));
  return out;
}

double group_delay_numeric(const EitParameters& params, double omega, double step) {
  const double kl = params.wavenumber * params.length;
  const double hi = susceptibility(params, omega + step).real();
  const double lo = susceptibility(params, omega - step).real();
  return 0.5 * kl * (hi - lo) / (2.0 * step);
}

}  // namespace eitq
