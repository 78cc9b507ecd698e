#include "eitq/signal_synth.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "eitq/errors.hpp"
#include "eitq/fft.hpp"
#include "eitq/units.hpp"

namespace eitq {
namespace {

constexpr double kRollOff = 0.05;

double band_mask(double f, double bandwidth) {
  if (f <= bandwidth) return 1.0;
  const double edge = kRollOff * bandwidth;
  if (f >= bandwidth + edge) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (f - bandwidth) / edge));
}

void require_rate(double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ParameterError("sample rate must be > 0");
}

std::vector<double> white(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> x(n);
  for (double& v : x) v = normal(rng);
  return x;
}

}  // namespace

double TimeSeries::mean() const {
  if (samples.empty()) return 0.0;
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double TimeSeries::variance() const {
  if (samples.size() < 2) return 0.0;
  const double m = mean();
  double acc = 0.0;
  for (double v : samples) acc += (v - m) * (v - m);
  return acc / static_cast<double>(samples.size() - 1);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::size_t samples_for(double duration, double sample_rate) {
  require_rate(sample_rate);
  if (!(duration > 0.0)) throw ParameterError("duration must be > 0");
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

TimeSeries synth_white_noise(double variance, double sample_rate, std::size_t n,
                             std::uint64_t seed) {
  require_rate(sample_rate);
  if (!(variance >= 0.0)) throw ParameterError("noise variance must be >= 0");
  return {white(n, std::sqrt(variance), seed), sample_rate, seed};
}

TimeSeries synth_bandlimited_noise(double bandwidth, double sample_rate, double duration,
                                   std::uint64_t seed, double level) {
  require_rate(sample_rate);
  if (!(bandwidth > 0.0) || bandwidth >= 0.5 * sample_rate) {
    throw ParameterError("noise bandwidth must lie in (0, sample_rate / 2)");
  }
  if (!(level >= 0.0)) throw ParameterError("noise level must be >= 0");
  const std::size_t n = samples_for(duration, sample_rate);
  RealFft fft(n);
  auto spec = fft.forward(white(n, 1.0, seed));
  const double amp = std::sqrt(level);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    spec[k] *= amp * band_mask(f, bandwidth);
  }
  return {fft.inverse(spec), sample_rate, seed};
}

double bandlimited_noise_variance(double bandwidth, double sample_rate, double level) {
  // level * (integral of mask^2 over [0, fs/2]) / (fs/2); the cos^4 edge
  // integrates to 3/8 of its width.
  const double occupied = bandwidth + 0.375 * kRollOff * bandwidth;
  return level * occupied / (0.5 * sample_rate);
}

TimeSeries synth_tones(std::span<const Tone> tones, double sample_rate, std::size_t n) {
  require_rate(sample_rate);
  TimeSeries out{std::vector<double>(n, 0.0), sample_rate, 0};
  for (const Tone& t : tones) {
    const double w = kTwoPi * t.freq_hz / sample_rate;
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] += t.amplitude * std::cos(w * static_cast<double>(i) + t.phase);
    }
  }
  return out;
}

TimeSeries add(const TimeSeries& a, const TimeSeries& b) {
  if (a.sample_rate != b.sample_rate || a.size() != b.size()) {
    throw ParameterError("add: records differ in rate or length");
  }
  TimeSeries out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

TimeSeries filter_through_channel(const TimeSeries& series, const EitParameters& params,
                                  const NoiseInjection& inj, Quadrature quadrature,
                                  std::uint64_t seed) {
  require_rate(series.sample_rate);
  params.validate();
  inj.validate();
  const std::size_t n = series.size();
  RealFft fft(n);
  auto spec = fft.forward(series.samples);
  // Unit-variance white records have E|Z_k|^2 = n, the same normalization as
  // the input spectrum, so per-bin noise amplitudes are simply sqrt(variance).
  const auto vacuum = fft.forward(white(n, 1.0, derive_seed(seed, 0)));
  const auto excess = fft.forward(white(n, 1.0, derive_seed(seed, 1)));
  const double e = inj.excess(quadrature);
  const double sqrt_e = std::sqrt(e);
  const bool before = inj.placement == InjectionPlacement::before_loss;

  const std::size_t nyquist = (n % 2 == 0) ? n / 2 : spec.size();
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double omega = kTwoPi * static_cast<double>(k) * series.sample_rate / static_cast<double>(n);
    const ChannelResponse r = channel_response(params, omega);
    const double eta = r.transmissivity;
    // conj(t): positive phase slope means delay under the e^{-i w t} transform.
    std::complex<double> h = std::conj(r.amplitude);
    if (k == nyquist) h = std::sqrt(eta);
    std::complex<double> in = spec[k];
    if (before) in += sqrt_e * excess[k];
    std::complex<double> out = h * in + std::sqrt(1.0 - eta) * vacuum[k];
    if (!before) out += sqrt_e * excess[k];
    spec[k] = out;
  }
  return {fft.inverse(spec), series.sample_rate, seed};
}

}  // namespace eitq
