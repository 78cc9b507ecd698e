#include "eitq/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "eitq/errors.hpp"
#include "eitq/fft.hpp"

namespace eitq {
namespace {

struct Segmenting {
  std::size_t length;
  std::size_t hop;
};

Segmenting segmenting(double sample_rate, double rbw, std::size_t averages) {
  if (!(sample_rate > 0.0)) throw ParameterError("sample rate must be > 0");
  if (!(rbw > 0.0) || rbw >= 0.5 * sample_rate) {
    throw ParameterError("RBW must lie in (0, sample_rate / 2)");
  }
  if (averages < 1) throw ParameterError("averages must be >= 1");
  const auto length = static_cast<std::size_t>(std::llround(sample_rate / rbw));
  return {length, length / 2};
}

// Periodic Hann.
std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

SpectrumEstimate empty_estimate(const TimeSeries& s, const Segmenting& seg, std::size_t averages) {
  SpectrumEstimate e;
  e.sample_rate = s.sample_rate;
  e.averages = averages;
  e.rbw = s.sample_rate / static_cast<double>(seg.length);
  const std::size_t bins = seg.length / 2 + 1;
  e.frequencies.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) e.frequencies[k] = e.rbw * static_cast<double>(k);
  e.psd.assign(bins, 0.0);
  return e;
}

void check_length(const TimeSeries& s, const Segmenting& seg, std::size_t averages) {
  const std::size_t need = seg.length + (averages - 1) * seg.hop;
  if (s.size() < need) {
    throw ParameterError("record of " + std::to_string(s.size()) + " samples is too short for " +
                         std::to_string(averages) + " averages (needs " + std::to_string(need) + ")");
  }
}

}  // namespace

std::vector<double> SpectrumEstimate::density() const {
  std::vector<double> d(psd.size());
  const bool even = !psd.empty() && frequencies.back() * 2.0 >= sample_rate * (1.0 - 1e-12);
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const bool edge = k == 0 || (even && k + 1 == psd.size());
    d[k] = psd[k] * (edge ? 1.0 : 2.0) / sample_rate;
  }
  return d;
}

std::size_t SpectrumEstimate::bin_of(double freq_hz) const {
  const double k = std::round(freq_hz / rbw);
  if (k < 0.0 || k >= static_cast<double>(psd.size())) {
    throw ParameterError("frequency " + std::to_string(freq_hz) + " Hz outside the spectrum");
  }
  return static_cast<std::size_t>(k);
}

std::size_t welch_samples_needed(double sample_rate, double rbw, std::size_t averages) {
  const Segmenting seg = segmenting(sample_rate, rbw, averages);
  return seg.length + (averages - 1) * seg.hop;
}

SpectrumEstimate estimate_psd(const TimeSeries& series, double rbw, std::size_t averages) {
  const Segmenting seg = segmenting(series.sample_rate, rbw, averages);
  check_length(series, seg, averages);
  SpectrumEstimate est = empty_estimate(series, seg, averages);
  const auto window = hann(seg.length);
  double wsum2 = 0.0;
  for (double w : window) wsum2 += w * w;

  RealFft fft(seg.length);
  std::vector<double> buf(seg.length);
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t s = 0; s < averages; ++s) {
    const std::size_t off = s * seg.hop;
    for (std::size_t i = 0; i < seg.length; ++i) buf[i] = series.samples[off + i] * window[i];
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) est.psd[k] += std::norm(spec[k]);
  }
  const double norm = 1.0 / (wsum2 * static_cast<double>(averages));
  for (double& p : est.psd) p *= norm;
  return est;
}

CrossSpectrum estimate_cross_spectrum(const TimeSeries& a, const TimeSeries& b, double rbw,
                                      std::size_t averages) {
  if (a.sample_rate != b.sample_rate) throw ParameterError("cross spectrum: sample rates differ");
  const Segmenting seg = segmenting(a.sample_rate, rbw, averages);
  check_length(a, seg, averages);
  check_length(b, seg, averages);
  CrossSpectrum out{empty_estimate(a, seg, averages), empty_estimate(b, seg, averages), {}};
  out.cross.assign(out.a.psd.size(), {});
  const auto window = hann(seg.length);
  double wsum2 = 0.0;
  for (double w : window) wsum2 += w * w;

  RealFft fft(seg.length);
  std::vector<double> buf(seg.length);
  std::vector<std::complex<double>> sa(fft.bins()), sb(fft.bins());
  for (std::size_t s = 0; s < averages; ++s) {
    const std::size_t off = s * seg.hop;
    for (std::size_t i = 0; i < seg.length; ++i) buf[i] = a.samples[off + i] * window[i];
    fft.forward(buf, sa);
    for (std::size_t i = 0; i < seg.length; ++i) buf[i] = b.samples[off + i] * window[i];
    fft.forward(buf, sb);
    for (std::size_t k = 0; k < sa.size(); ++k) {
      out.a.psd[k] += std::norm(sa[k]);
      out.b.psd[k] += std::norm(sb[k]);
      out.cross[k] += sa[k] * std::conj(sb[k]);
    }
  }
  const double norm = 1.0 / (wsum2 * static_cast<double>(averages));
  for (std::size_t k = 0; k < out.cross.size(); ++k) {
    out.a.psd[k] *= norm;
    out.b.psd[k] *= norm;
    out.cross[k] *= norm;
  }
  return out;
}

}  // namespace eitq
