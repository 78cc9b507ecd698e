#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eitq {

/// Real-to-complex transform pair of fixed length n, owning its FFTW plans.
/// Forward uses the e^{-i w t} sign convention and is unnormalized; inverse
/// divides by n so that inverse(forward(x)) == x.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  std::vector<std::complex<double>> forward(std::span<const double> x);
  void forward(std::span<const double> x, std::span<std::complex<double>> out);
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum);

 private:
  void release();

  std::size_t n_ = 0;
  double* real_ = nullptr;
  void* cplx_ = nullptr;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace eitq
