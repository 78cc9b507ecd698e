#pragma once

#include <cstddef>
#include <vector>

#include "eitq/signal_synth.hpp"

namespace eitq {

/// Normalized correlation r(l) = sum_n a'[n] b'[n + l] / sqrt(sum a'^2 sum b'^2)
/// of the mean-removed records, for lags -max_lag..max_lag samples. A positive
/// lag at the peak means b lags a.
struct Correlation {
  std::vector<double> lags;    // seconds
  std::vector<double> values;
  double sample_rate = 0.0;

  std::size_t peak_index() const;
  /// Full width at half maximum of the main peak, seconds.
  double peak_width() const;
  /// First lag > 0 (seconds) after the peak where the correlation crosses zero.
  double first_zero_after_peak() const;
};

/// max_lag = 0 means all lags.
Correlation cross_correlate(const TimeSeries& a, const TimeSeries& b, std::size_t max_lag = 0);

/// Lag of the cross-correlation maximum with three-point parabolic
/// refinement. Throws NoDelayFound if the peak is below `min_peak`.
double estimate_delay(const TimeSeries& a, const TimeSeries& b, std::size_t max_lag = 0,
                      double min_peak = 0.2);
double estimate_delay(const Correlation& corr, double min_peak = 0.2);

}  // namespace eitq
