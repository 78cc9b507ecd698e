#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "eitq/signal_synth.hpp"

namespace eitq {

/// Averaged periodogram. `psd` is in QNL-relative units: white noise of
/// variance V reads V in every bin, so the vacuum sits at 1.
struct SpectrumEstimate {
  std::vector<double> frequencies;  // Hz, uniform from 0
  std::vector<double> psd;
  double rbw = 0.0;                 // bin spacing, Hz
  std::size_t averages = 0;
  double sample_rate = 0.0;

  /// One-sided density in variance per Hz; sums (times rbw) to the variance.
  std::vector<double> density() const;
  std::size_t bin_of(double freq_hz) const;
};

/// Auto- and cross-spectra of two records from the same segments.
/// `cross[k]` = <A_k conj(B_k)>, in the same units as the auto spectra.
struct CrossSpectrum {
  SpectrumEstimate a;
  SpectrumEstimate b;
  std::vector<std::complex<double>> cross;
};

/// Samples needed for `averages` Hann segments at `rbw` with 50% overlap.
std::size_t welch_samples_needed(double sample_rate, double rbw, std::size_t averages);

/// Welch estimate: Hann window, 50% overlap, segment length fs / rbw,
/// exactly `averages` segments taken from the start of the record.
SpectrumEstimate estimate_psd(const TimeSeries& series, double rbw, std::size_t averages);

CrossSpectrum estimate_cross_spectrum(const TimeSeries& a, const TimeSeries& b, double rbw,
                                      std::size_t averages);

}  // namespace eitq
