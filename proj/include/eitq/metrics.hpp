#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eitq/eit_medium.hpp"
#include "eitq/quadrature_channel.hpp"
#include "eitq/spectrum.hpp"

namespace eitq {

enum class MetricKind { conditional_variance, signal_transfer, benchmark_cv, benchmark_ts };

std::string_view to_string(MetricKind k);

/// Frequency-indexed figure of merit. Bins with valid[i] == false are gaps
/// (e.g. no input power) and carry NaN values.
struct MetricCurve {
  MetricKind kind = MetricKind::conditional_variance;
  Quadrature quadrature = Quadrature::amplitude;
  std::vector<double> frequencies;  // Hz
  std::vector<double> values;
  std::vector<double> gain;         // optimal G, conditional_variance only
  std::vector<double> delay;        // optimal tau (s), conditional_variance only
  std::vector<bool> valid;

  std::size_t size() const { return frequencies.size(); }
  void push(double freq_hz, double value, double g = 0.0, double tau = 0.0, bool ok = true);
};

/// Header: freq_hz,value,g_opt,tau_opt_s,kind,quadrature. Gaps leave the
/// numeric fields empty.
std::string metric_curve_csv(const MetricCurve& curve);

/// Minimizer of <|X_out - G e^{i w tau} X_in|^2> at one frequency.
/// `tau` is positive when the output lags the input.
struct ConditionalVariancePoint {
  double value = 0.0;
  double gain = 0.0;
  double tau = 0.0;
  bool valid = true;
};

/// Closed form from the spectra: V = S_oo - |S_oi|^2 / S_ii with
/// S_oi = <X_out conj(X_in)> under the e^{-i w t} transform.
ConditionalVariancePoint conditional_variance_point(double s_in, double s_out,
                                                    std::complex<double> s_oi, double omega);

struct BruteForceGrid {
  std::size_t gain_points = 201;
  std::size_t delay_points = 201;
  std::size_t refinements = 40;
};

/// Direct numerical minimization of the same objective over a (G, tau) grid
/// with successive zooming. Validation path for the closed form.
ConditionalVariancePoint conditional_variance_bruteforce(double s_in, double s_out,
                                                         std::complex<double> s_oi, double omega,
                                                         BruteForceGrid grid = {});

/// Conditional variance of the channel model for input variance v_in.
double conditional_variance_analytic(const ChannelResponse& response, const NoiseInjection& inj,
                                     Quadrature q, double v_in = 1.0);

/// Per-bin closed form over measured spectra; s_cross[k] = <X_out conj(X_in)>.
MetricCurve conditional_variance_empirical(const SpectrumEstimate& s_in,
                                           const SpectrumEstimate& s_out,
                                           std::span<const std::complex<double>> s_cross,
                                           Quadrature q);

/// SNR_out / SNR_in. Throws ParameterError when snr_in <= 0.
double signal_transfer(double snr_in, double snr_out);

/// Signal transfer of the channel model for a displaced input of variance v_in.
double signal_transfer_model(const ChannelResponse& response, const NoiseInjection& inj,
                             Quadrature q, double v_in = 1.0);

/// Passive-loss limits (V_limit, T_limit) = (1 - eta, eta).
std::pair<double, double> benchmark_beamsplitter(const ChannelResponse& response);

/// Signal power of a tone over noise PSD at `freq_hz`. The tone occupies the
/// centre bin and one bin either side (excluded from the noise estimate); the
/// noise floor is the mean of `noise_bins` bins on each side beyond that.
double snr_at(const SpectrumEstimate& spectrum, double freq_hz, std::size_t noise_bins = 8);

// Model curves over a frequency grid in Hz.
MetricCurve benchmark_curve(const EitParameters& params, std::span<const double> freqs_hz,
                            MetricKind kind, Quadrature q);
MetricCurve conditional_variance_model_curve(const EitParameters& params,
                                             const NoiseInjection& inj,
                                             std::span<const double> freqs_hz, Quadrature q);
MetricCurve signal_transfer_model_curve(const EitParameters& params, const NoiseInjection& inj,
                                        std::span<const double> freqs_hz, Quadrature q);

}  // namespace eitq
