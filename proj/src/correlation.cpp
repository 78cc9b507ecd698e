#include "eitq/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "eitq/errors.hpp"
#include "eitq/fft.hpp"

namespace eitq {

std::size_t Correlation::peak_index() const {
  if (values.empty()) throw ParameterError("empty correlation");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double Correlation::peak_width() const {
  const std::size_t p = peak_index();
  const double half = 0.5 * values[p];
  auto crossing = [&](int dir) {
    std::size_t i = p;
    while (true) {
      const std::size_t j = dir > 0 ? i + 1 : i - 1;
      if ((dir > 0 && j >= values.size()) || (dir < 0 && i == 0)) return lags[i];
      if (values[j] < half) {
        const double t = (values[i] - half) / (values[i] - values[j]);
        return lags[i] + t * (lags[j] - lags[i]);
      }
      i = j;
    }
  };
  return crossing(+1) - crossing(-1);
}

double Correlation::first_zero_after_peak() const {
  const std::size_t p = peak_index();
  for (std::size_t i = p; i + 1 < values.size(); ++i) {
    if (values[i + 1] <= 0.0) {
      const double t = values[i] / (values[i] - values[i + 1]);
      return lags[i] + t * (lags[i + 1] - lags[i]) - lags[p];
    }
  }
  throw ParameterError("correlation has no zero crossing after its peak");
}

Correlation cross_correlate(const TimeSeries& a, const TimeSeries& b, std::size_t max_lag) {
  if (a.sample_rate != b.sample_rate) throw ParameterError("cross_correlate: sample rates differ");
  if (a.size() != b.size() || a.size() < 2) {
    throw ParameterError("cross_correlate: records must have equal length >= 2");
  }
  const std::size_t n = a.size();
  if (max_lag == 0 || max_lag > n - 1) max_lag = n - 1;

  // Zero-padded transform gives the linear (non-circular) correlation.
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  const double ma = a.mean();
  const double mb = b.mean();
  std::vector<double> pa(m, 0.0), pb(m, 0.0);
  double saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = a.samples[i] - ma;
    pb[i] = b.samples[i] - mb;
    saa += pa[i] * pa[i];
    sbb += pb[i] * pb[i];
  }
  if (saa == 0.0 || sbb == 0.0) throw ParameterError("cross_correlate: constant record");

  RealFft fft(m);
  auto fa = fft.forward(pa);
  const auto fb = fft.forward(pb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] = std::conj(fa[k]) * fb[k];
  const auto raw = fft.inverse(fa);  // raw[l] = sum a[n] b[n + l], circular in m

  const double norm = 1.0 / std::sqrt(saa * sbb);
  Correlation c;
  c.sample_rate = a.sample_rate;
  const std::size_t count = 2 * max_lag + 1;
  c.lags.resize(count);
  c.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lag = static_cast<long long>(i) - static_cast<long long>(max_lag);
    const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag) : m - static_cast<std::size_t>(-lag);
    c.lags[i] = static_cast<double>(lag) / a.sample_rate;
    c.values[i] = raw[idx] * norm;
  }
  return c;
}

double estimate_delay(const Correlation& corr, double min_peak) {
  const std::size_t p = corr.peak_index();
  const double peak = corr.values[p];
  if (!(peak >= min_peak)) {
    throw NoDelayFound("correlation peak " + std::to_string(peak) + " below threshold " +
                       std::to_string(min_peak));
  }
  if (p == 0 || p + 1 == corr.values.size()) return corr.lags[p];
  const double ym = corr.values[p - 1];
  const double y0 = peak;
  const double yp = corr.values[p + 1];
  const double denom = ym - 2.0 * y0 + yp;
  const double offset = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  return corr.lags[p] + offset / corr.sample_rate;
}

double estimate_delay(const TimeSeries& a, const TimeSeries& b, std::size_t max_lag,
                      double min_peak) {
  return estimate_delay(cross_correlate(a, b, max_lag), min_peak);
}

}  // namespace eitq
