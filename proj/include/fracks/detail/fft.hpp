#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace fracks::detail {

/// Real-to-half-complex FFT plans for one size.
///
/// Plans are created with FFTW_UNALIGNED so that the new-array execute
/// functions may be called on arbitrary buffers. Planning is serialized by a
/// global mutex; execution is re-entrant.
class FftPlans {
 public:
  explicit FftPlans(int n) : n_(n) {
    std::vector<double> real(static_cast<std::size_t>(n));
    std::vector<fftw_complex> half(static_cast<std::size_t>(n / 2 + 1));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_r2c_1d(n, real.data(), half.data(), flags);
    backward_ = fftw_plan_dft_c2r_1d(n, half.data(), real.data(), flags);
  }
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  int size() const { return n_; }

  // out has n/2+1 entries; unnormalized.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    // r2c out-of-place leaves the input intact.
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
  }

  // Unnormalized inverse; `in` is clobbered by FFTW.
  void backward(std::span<std::complex<double>> in, std::span<double> out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  }

 private:
  int n_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Shared plan cache keyed by size. Plans live until program exit.
inline const FftPlans& plans_for(int n) {
  static std::map<int, std::unique_ptr<FftPlans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlans>(n)).first;
  return *it->second;
}

/// Forward half spectrum of real samples.
inline std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> half(static_cast<std::size_t>(n / 2 + 1));
  plans_for(n).forward(x, half);
  return half;
}

/// Inverse of rfft including the 1/n factor. Consumes `half`.
inline std::vector<double> irfft(std::vector<std::complex<double>> half, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  plans_for(n).backward(half, x);
  const double inv = 1.0 / n;
  for (double& v : x) v *= inv;
  return x;
}

}  // namespace fracks::detail
