#include "eitq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eitq/errors.hpp"
#include "eitq/series_io.hpp"
#include "eitq/units.hpp"

namespace eitq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double objective(double s_in, double s_out, std::complex<double> s_oi, double omega, double g,
                 double tau) {
  return s_out + g * g * s_in - 2.0 * g * (std::polar(1.0, omega * tau) * s_oi).real();
}

}  // namespace

std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::conditional_variance: return "conditional_variance";
    case MetricKind::signal_transfer: return "signal_transfer";
    case MetricKind::benchmark_cv: return "benchmark_cv";
    case MetricKind::benchmark_ts: return "benchmark_ts";
  }
  return "unknown";
}

void MetricCurve::push(double freq_hz, double value, double g, double tau, bool ok) {
  frequencies.push_back(freq_hz);
  values.push_back(ok ? value : kNaN);
  gain.push_back(ok ? g : kNaN);
  delay.push_back(ok ? tau : kNaN);
  valid.push_back(ok);
}

std::string metric_curve_csv(const MetricCurve& curve) {
  const bool cv = curve.kind == MetricKind::conditional_variance;
  std::string out = "freq_hz,value,g_opt,tau_opt_s,kind,quadrature\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out += format_double(curve.frequencies[i]);
    out += ',';
    if (curve.valid[i]) {
      out += format_double(curve.values[i]);
      out += ',';
      if (cv) out += format_double(curve.gain[i]);
      out += ',';
      if (cv) out += format_double(curve.delay[i]);
    } else {
      out += ",,";
    }
    out += ',';
    out += to_string(curve.kind);
    out += ',';
    out += to_string(curve.quadrature);
    out += '\n';
  }
  return out;
}

ConditionalVariancePoint conditional_variance_point(double s_in, double s_out,
                                                    std::complex<double> s_oi, double omega) {
  if (!(s_in > 0.0)) return {kNaN, kNaN, kNaN, false};
  const double mag = std::abs(s_oi);
  ConditionalVariancePoint p;
  p.value = std::max(0.0, s_out - mag * mag / s_in);
  p.gain = mag / s_in;
  // omega tau = -arg S_oi aligns the delayed input with the output.
  p.tau = omega != 0.0 ? -std::arg(s_oi) / omega : 0.0;
  return p;
}

ConditionalVariancePoint conditional_variance_bruteforce(double s_in, double s_out,
                                                         std::complex<double> s_oi, double omega,
                                                         BruteForceGrid grid) {
  if (!(s_in > 0.0)) return {kNaN, kNaN, kNaN, false};
  if (grid.gain_points < 3 || grid.delay_points < 3) {
    throw ParameterError("brute-force grid needs at least 3 points per axis");
  }
  // The objective is periodic in tau with period 2 pi / omega; at DC tau is inert.
  const double period = omega != 0.0 ? kTwoPi / std::abs(omega) : 1.0;
  double g_lo = 0.0;
  double g_hi = 2.0 * std::sqrt(s_out / s_in) + 1e-300;
  double t_lo = -0.5 * period;
  double t_hi = 0.5 * period;
  ConditionalVariancePoint best{std::numeric_limits<double>::infinity(), 0.0, 0.0, true};
  for (std::size_t round = 0; round <= grid.refinements; ++round) {
    const double dg = (g_hi - g_lo) / static_cast<double>(grid.gain_points - 1);
    const double dt = (t_hi - t_lo) / static_cast<double>(grid.delay_points - 1);
    for (std::size_t i = 0; i < grid.gain_points; ++i) {
      const double g = g_lo + dg * static_cast<double>(i);
      for (std::size_t j = 0; j < grid.delay_points; ++j) {
        const double t = t_lo + dt * static_cast<double>(j);
        const double v = objective(s_in, s_out, s_oi, omega, g, t);
        if (v < best.value) best = {v, g, t, true};
      }
    }
    // Zoom to +-2 cells around the incumbent.
    g_lo = std::max(0.0, best.gain - 2.0 * dg);
    g_hi = best.gain + 2.0 * dg;
    t_lo = best.tau - 2.0 * dt;
    t_hi = best.tau + 2.0 * dt;
  }
  best.value = std::max(0.0, best.value);
  return best;
}

double conditional_variance_analytic(const ChannelResponse& response, const NoiseInjection& inj,
                                     Quadrature q, double v_in) {
  if (!(v_in >= 1.0)) throw ParameterError("input variance must be >= 1");
  const double v_out = output_variance(response, inj, q, v_in);
  // Input-output covariance sqrt(eta) v_in; injected and vacuum noise are
  // uncorrelated with the input.
  const double eta = response.transmissivity;
  return std::max(0.0, v_out - eta * v_in);
}

MetricCurve conditional_variance_empirical(const SpectrumEstimate& s_in,
                                           const SpectrumEstimate& s_out,
                                           std::span<const std::complex<double>> s_cross,
                                           Quadrature q) {
  if (s_in.psd.size() != s_out.psd.size() || s_cross.size() != s_in.psd.size() ||
      s_in.rbw != s_out.rbw) {
    throw ContractViolation("conditional_variance_empirical: spectra are not on one grid");
  }
  MetricCurve c;
  c.kind = MetricKind::conditional_variance;
  c.quadrature = q;
  for (std::size_t k = 0; k < s_in.psd.size(); ++k) {
    const double f = s_in.frequencies[k];
    const auto p = conditional_variance_point(s_in.psd[k], s_out.psd[k], s_cross[k], hz_to_rad(f));
    c.push(f, p.value, p.gain, p.tau, p.valid);
  }
  return c;
}

double signal_transfer(double snr_in, double snr_out) {
  if (!(snr_in > 0.0)) throw ParameterError("input SNR must be > 0");
  return snr_out / snr_in;
}

double signal_transfer_model(const ChannelResponse& response, const NoiseInjection& inj,
                             Quadrature q, double v_in) {
  if (!(v_in >= 1.0)) throw ParameterError("input variance must be >= 1");
  // SNR = |mean|^2 / V; the mean power scales by eta.
  return response.transmissivity * v_in / output_variance(response, inj, q, v_in);
}

std::pair<double, double> benchmark_beamsplitter(const ChannelResponse& response) {
  const double eta = response.transmissivity;
  return {1.0 - eta, eta};
}

double snr_at(const SpectrumEstimate& spectrum, double freq_hz, std::size_t noise_bins) {
  const std::size_t k = spectrum.bin_of(freq_hz);
  const std::size_t half = 1;
  if (k < half + noise_bins || k + half + noise_bins >= spectrum.psd.size()) {
    throw ParameterError("tone at " + std::to_string(freq_hz) + " Hz too close to the spectrum edge");
  }
  double noise = 0.0;
  for (std::size_t j = 1; j <= noise_bins; ++j) {
    noise += spectrum.psd[k - half - j] + spectrum.psd[k + half + j];
  }
  noise /= static_cast<double>(2 * noise_bins);
  double signal = 0.0;
  for (std::size_t j = k - half; j <= k + half; ++j) signal += spectrum.psd[j] - noise;
  if (!(noise > 0.0)) throw ParameterError("zero noise floor around tone");
  return signal / noise;
}

MetricCurve benchmark_curve(const EitParameters& params, std::span<const double> freqs_hz,
                            MetricKind kind, Quadrature q) {
  if (kind != MetricKind::benchmark_cv && kind != MetricKind::benchmark_ts) {
    throw ParameterError("benchmark_curve: kind must be benchmark_cv or benchmark_ts");
  }
  MetricCurve c;
  c.kind = kind;
  c.quadrature = q;
  for (double f : freqs_hz) {
    const auto [v, t] = benchmark_beamsplitter(channel_response(params, hz_to_rad(f)));
    c.push(f, kind == MetricKind::benchmark_cv ? v : t);
  }
  return c;
}

MetricCurve conditional_variance_model_curve(const EitParameters& params,
                                             const NoiseInjection& inj,
                                             std::span<const double> freqs_hz, Quadrature q) {
  MetricCurve c;
  c.kind = MetricKind::conditional_variance;
  c.quadrature = q;
  for (double f : freqs_hz) {
    const double w = hz_to_rad(f);
    const ChannelResponse r = channel_response(params, w);
    // The model's optimal gain is sqrt(eta) and the optimal delay phi / omega.
    c.push(f, conditional_variance_analytic(r, inj, q), std::sqrt(r.transmissivity),
           w != 0.0 ? r.phase / w : r.group_delay);
  }
  return c;
}

MetricCurve signal_transfer_model_curve(const EitParameters& params, const NoiseInjection& inj,
                                        std::span<const double> freqs_hz, Quadrature q) {
  MetricCurve c;
  c.kind = MetricKind::signal_transfer;
  c.quadrature = q;
  for (double f : freqs_hz) {
    c.push(f, signal_transfer_model(channel_response(params, hz_to_rad(f)), inj, q));
  }
  return c;
}

}  // namespace eitq
