#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eitq/eit_medium.hpp"
#include "eitq/quadrature_channel.hpp"

namespace eitq {

/// Uniformly sampled quadrature record in QNL units. `seed` is the seed the
/// record's randomness was drawn from (0 for deterministic records).
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double mean() const;
  double variance() const;
};

struct Tone {
  double freq_hz = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Independent child seed for stream `stream` of a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

std::size_t samples_for(double duration, double sample_rate);

/// White Gaussian noise of the given variance. Variance 1 is the vacuum.
TimeSeries synth_white_noise(double variance, double sample_rate, std::size_t n,
                             std::uint64_t seed);

/// Zero-mean Gaussian noise whose spectrum is flat at `level` (QNL-relative
/// PSD units, see estimate_psd) from DC to `bandwidth`, with a raised-cosine
/// edge spanning a further 5% of the bandwidth.
TimeSeries synth_bandlimited_noise(double bandwidth, double sample_rate, double duration,
                                   std::uint64_t seed, double level = 1.0);

/// Expected variance of synth_bandlimited_noise for the same arguments.
double bandlimited_noise_variance(double bandwidth, double sample_rate, double level = 1.0);

TimeSeries synth_tones(std::span<const Tone> tones, double sample_rate, std::size_t n);

/// Sample-wise sum; rates and lengths must match. Keeps a's seed.
TimeSeries add(const TimeSeries& a, const TimeSeries& b);

/// Passes a quadrature record through the medium. Each positive-frequency
/// bin is multiplied by sqrt(eta) e^{-i phi} (a positive group delay retards
/// the output), and independent Gaussian realizations of the (1 - eta)
/// vacuum term and of the injected excess noise are added with their
/// per-bin variances. The output is real by construction.
TimeSeries filter_through_channel(const TimeSeries& series, const EitParameters& params,
                                  const NoiseInjection& inj, Quadrature quadrature,
                                  std::uint64_t seed);

}  // namespace eitq
