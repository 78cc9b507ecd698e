#include "eitq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <utility>

#include "eitq/errors.hpp"

namespace eitq {

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw ParameterError("FFT length must be >= 2");
  real_ = fftw_alloc_real(n);
  auto* c = fftw_alloc_complex(n / 2 + 1);
  cplx_ = c;
  // FFTW_ESTIMATE keeps plans (and so round-off) identical between runs.
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, c, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() { release(); }

RealFft::RealFft(RealFft&& o) noexcept
    : n_(std::exchange(o.n_, 0)),
      real_(std::exchange(o.real_, nullptr)),
      cplx_(std::exchange(o.cplx_, nullptr)),
      fwd_(std::exchange(o.fwd_, nullptr)),
      inv_(std::exchange(o.inv_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& o) noexcept {
  if (this != &o) {
    release();
    n_ = std::exchange(o.n_, 0);
    real_ = std::exchange(o.real_, nullptr);
    cplx_ = std::exchange(o.cplx_, nullptr);
    fwd_ = std::exchange(o.fwd_, nullptr);
    inv_ = std::exchange(o.inv_, nullptr);
  }
  return *this;
}

void RealFft::release() {
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  if (real_) fftw_free(real_);
  if (cplx_) fftw_free(cplx_);
  fwd_ = inv_ = nullptr;
  real_ = nullptr;
  cplx_ = nullptr;
}

void RealFft::forward(std::span<const double> x, std::span<std::complex<double>> out) {
  if (x.size() != n_ || out.size() != bins()) throw ContractViolation("RealFft::forward: size mismatch");
  std::copy(x.begin(), x.end(), real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(out.data(), cplx_, bins() * sizeof(std::complex<double>));
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> x) {
  std::vector<std::complex<double>> out(bins());
  forward(x, out);
  return out;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) {
  if (spectrum.size() != bins()) throw ContractViolation("RealFft::inverse: size mismatch");
  std::memcpy(cplx_, spectrum.data(), bins() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(inv_));
  std::vector<double> out(real_, real_ + n_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace eitq
