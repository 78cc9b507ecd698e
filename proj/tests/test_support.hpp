#pragma once

#include <random>

#include "eitq/eit_medium.hpp"
#include "eitq/units.hpp"

namespace eitq::testing {

/// Example medium: N|g|^2 = 1e14, gamma = 2pi 3 MHz, gamma_0 = 2pi 4 kHz,
/// |gE_c| = 2pi 1 MHz, k = 7.9e6 /m, c = 3e8 m/s, L = 7.5 cm.
inline EitParameters example_medium() {
  EitParameters p;
  p.od_rate = 1e14;
  p.spontaneous_rate = hz_to_rad(3e6);
  p.dephasing_rate = hz_to_rad(4e3);
  p.pump_rabi = hz_to_rad(1e6);
  p.wavenumber = 7.9e6;
  p.light_speed = 3e8;
  p.length = 0.075;
  return p;
}

/// Medium with a 7.5 us zero-frequency group delay over L = 7.5 cm
/// (group velocity 1e4 m/s) and a transparency window wide enough for a
/// 60 kHz modulation.
inline EitParameters slow_light_medium(double dephasing_hz = 0.0) {
  EitParameters p;
  p.spontaneous_rate = hz_to_rad(3e6);
  p.dephasing_rate = hz_to_rad(dephasing_hz);
  p.pump_rabi = hz_to_rad(2e6);
  p.wavenumber = 7.9e6;
  p.light_speed = 3e8;
  p.length = 0.075;
  p.od_rate = 7.5e-6 * p.light_speed * p.pump_rabi * p.pump_rabi / p.length;
  return p;
}

/// Random valid medium spanning several decades in every rate.
inline EitParameters random_medium(std::mt19937_64& rng, bool zero_dephasing = false) {
  auto log_uniform = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  EitParameters p;
  p.spontaneous_rate = hz_to_rad(log_uniform(1e5, 3e7));
  p.dephasing_rate = zero_dephasing ? 0.0 : hz_to_rad(log_uniform(1.0, 1e5));
  p.pump_rabi = hz_to_rad(log_uniform(1e5, 1e7));
  p.wavenumber = log_uniform(1e6, 2e7);
  p.light_speed = 299792458.0;
  p.length = log_uniform(1e-3, 0.2);
  p.od_rate = log_uniform(1e10, 1e19);
  return p;
}

}  // namespace eitq::testing
