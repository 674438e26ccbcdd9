#pragma once

// Uniform grids on the one-dimensional torus [-pi, pi), real sample fields on
// them, and their discrete Fourier spectra.
//
// Transform convention: the forward transform is unnormalized and phase
// referenced to the physical coordinate,
//
//     c_k = sum_j f_j exp(-i k x_j),   x_j = -pi + j*dx,
//
// and the inverse divides by n. Hence mean(f) = c_0 / n and
// dx * sum_j f_j^2 = (2 pi / n^2) * sum_k |c_k|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fracks/detail/fft.hpp"
#include "fracks/errors.hpp"

namespace fracks {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// n equispaced samples of [-pi, pi). n must be even and at least 8.
class TorusGrid {
 public:
  explicit TorusGrid(int n) : n_(n), dx_(kTwoPi / n) {
    if (n < 8 || n % 2 != 0)
      throw DomainError("TorusGrid: n must be even and >= 8, got " + std::to_string(n));
  }

  int n() const { return n_; }
  double dx() const { return dx_; }
  int nyquist() const { return n_ / 2; }
  double x(int j) const { return -kPi + j * dx_; }

  /// Wavenumber stored at transform slot `slot` (0, 1, ..., n/2, -n/2+1, ..., -1).
  int wavenumber(int slot) const { return slot <= n_ / 2 ? slot : slot - n_; }
  /// Transform slot holding wavenumber k, for -n/2 < k <= n/2.
  int slot(int k) const { return k >= 0 ? k : k + n_; }

  std::vector<int> wavenumbers() const {
    std::vector<int> ks(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) ks[static_cast<std::size_t>(j)] = wavenumber(j);
    return ks;
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) { return a.n_ == b.n_; }

 private:
  int n_;
  double dx_;
};

/// Real periodic samples on a TorusGrid. Values may be non-finite (a failure
/// state the solver must be able to observe); operations that need finite
/// input call require_finite().
class Field {
 public:
  Field(TorusGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(grid_.n()))
      throw DomainError("Field: expected " + std::to_string(grid_.n()) + " samples, got " +
                        std::to_string(values_.size()));
  }

  static Field constant(TorusGrid grid, double c) {
    return Field(grid, std::vector<double>(static_cast<std::size_t>(grid.n()), c));
  }

  template <class F>
  static Field sample(TorusGrid grid, F&& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.n()));
    for (int j = 0; j < grid.n(); ++j) v[static_cast<std::size_t>(j)] = f(grid.x(j));
    return Field(grid, std::move(v));
  }

  const TorusGrid& grid() const { return grid_; }
  int size() const { return grid_.n(); }
  std::span<const double> values() const& { return values_; }
  std::span<const double> values() const&& = delete;  // would dangle
  double operator[](std::size_t j) const { return values_[j]; }

  std::optional<std::size_t> first_nonfinite() const {
    for (std::size_t j = 0; j < values_.size(); ++j)
      if (!std::isfinite(values_[j])) return j;
    return std::nullopt;
  }
  bool finite() const { return !first_nonfinite().has_value(); }
  void require_finite() const {
    if (auto bad = first_nonfinite()) throw NonFiniteError(*bad);
  }

  /// Pointwise map.
  template <class F>
  Field map(F&& f) const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), f);
    return Field(grid_, std::move(v));
  }

  /// Samples rotated by `shift` slots: result[j] = this[(j + shift) mod n].
  Field rotated(int shift) const {
    const int n = grid_.n();
    std::vector<double> v(values_.size());
    for (int j = 0; j < n; ++j)
      v[static_cast<std::size_t>(j)] = values_[static_cast<std::size_t>(((j + shift) % n + n) % n)];
    return Field(grid_, std::move(v));
  }

  friend Field operator+(const Field& a, const Field& b) { return zip(a, b, std::plus<>{}); }
  friend Field operator-(const Field& a, const Field& b) { return zip(a, b, std::minus<>{}); }
  friend Field operator*(const Field& a, const Field& b) { return zip(a, b, std::multiplies<>{}); }
  friend Field operator*(double s, const Field& a) {
    return a.map([s](double v) { return s * v; });
  }
  friend Field operator+(const Field& a, double c) {
    return a.map([c](double v) { return v + c; });
  }
  friend Field operator-(const Field& a) { return a.map([](double v) { return -v; }); }

 private:
  template <class Op>
  static Field zip(const Field& a, const Field& b, Op op) {
    if (!(a.grid_ == b.grid_)) throw DomainError("Field: grid mismatch");
    std::vector<double> v(a.values_.size());
    std::transform(a.values_.begin(), a.values_.end(), b.values_.begin(), v.begin(), op);
    return Field(a.grid_, std::move(v));
  }

  TorusGrid grid_;
  std::vector<double> values_;
};

/// Full (n-slot) spectrum of a real field in transform layout.
class Spectrum {
 public:
  Spectrum(TorusGrid grid, std::vector<Complex> coefficients)
      : grid_(grid), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() != static_cast<std::size_t>(grid_.n()))
      throw DomainError("Spectrum: expected " + std::to_string(grid_.n()) + " coefficients");
  }

  static Spectrum zero(TorusGrid grid) {
    return Spectrum(grid, std::vector<Complex>(static_cast<std::size_t>(grid.n())));
  }

  const TorusGrid& grid() const { return grid_; }
  std::span<const Complex> coefficients() const& { return coefficients_; }
  std::span<const Complex> coefficients() const&& = delete;  // would dangle
  Complex coefficient(int k) const { return coefficients_[static_cast<std::size_t>(grid_.slot(k))]; }

  /// Copy with coefficient k replaced; the caller keeps conjugate symmetry.
  Spectrum with(int k, Complex c) const {
    Spectrum s = *this;
    s.coefficients_[static_cast<std::size_t>(grid_.slot(k))] = c;
    return s;
  }

  template <class F>  // F(int k, Complex c) -> Complex
  Spectrum transform(F&& f) const {
    std::vector<Complex> out(coefficients_.size());
    for (int j = 0; j < grid_.n(); ++j)
      out[static_cast<std::size_t>(j)] = f(grid_.wavenumber(j), coefficients_[static_cast<std::size_t>(j)]);
    return Spectrum(grid_, std::move(out));
  }

  friend Spectrum operator+(const Spectrum& a, const Spectrum& b) {
    if (!(a.grid_ == b.grid_)) throw DomainError("Spectrum: grid mismatch");
    std::vector<Complex> out(a.coefficients_.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = a.coefficients_[j] + b.coefficients_[j];
    return Spectrum(a.grid_, std::move(out));
  }
  friend Spectrum operator*(double s, const Spectrum& a) {
    return a.transform([s](int, Complex c) { return s * c; });
  }

 private:
  TorusGrid grid_;
  std::vector<Complex> coefficients_;
};

namespace detail {

// (-1)^k, the phase shift between index-referenced FFT output and the
// x-referenced convention above.
inline double grid_phase(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

/// Physical-phase half spectrum (slots 0..n/2) of finite samples.
inline std::vector<Complex> half_spectrum(const Field& f) {
  auto half = rfft(f.values());
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= grid_phase(static_cast<int>(k));
  return half;
}

/// Samples from a physical-phase half spectrum. Consumes `half`.
inline Field from_half_spectrum(const TorusGrid& grid, std::vector<Complex> half) {
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= grid_phase(static_cast<int>(k));
  // The c2r transform ignores imaginary parts of the k=0 and Nyquist slots.
  return Field(grid, irfft(std::move(half), grid.n()));
}

/// Apply a real even multiplier m(|k|) (k = 0..n/2) in spectral space.
template <class Symbol>
Field apply_even_multiplier(const Field& f, Symbol&& m) {
  auto half = half_spectrum(f);
  for (std::size_t k = 0; k < half.size(); ++k) half[k] *= m(static_cast<int>(k));
  return from_half_spectrum(f.grid(), std::move(half));
}

/// Apply the odd multiplier -i sgn(k) m(|k|); k=0 and Nyquist are zeroed.
template <class Symbol>
Field apply_odd_multiplier(const Field& f, Symbol&& m) {
  auto half = half_spectrum(f);
  const int ny = f.grid().nyquist();
  half[0] = 0.0;
  half[static_cast<std::size_t>(ny)] = 0.0;
  for (int k = 1; k < ny; ++k) half[static_cast<std::size_t>(k)] *= Complex(0.0, -m(k));
  return from_half_spectrum(f.grid(), std::move(half));
}

}  // namespace detail

/// Forward transform. Throws NonFiniteError naming the first bad sample.
inline Spectrum to_spectrum(const Field& f) {
  f.require_finite();
  const int n = f.grid().n();
  auto half = detail::half_spectrum(f);
  std::vector<Complex> full(static_cast<std::size_t>(n));
  for (int k = 0; k <= n / 2; ++k) full[static_cast<std::size_t>(k)] = half[static_cast<std::size_t>(k)];
  for (int k = 1; k < n / 2; ++k) full[static_cast<std::size_t>(n - k)] = std::conj(half[static_cast<std::size_t>(k)]);
  return Spectrum(f.grid(), std::move(full));
}

/// Inverse transform. Imaginary residue up to 1e-12 of the largest
/// coefficient magnitude is discarded; anything larger is a SymmetryError.
inline Field from_spectrum(const Spectrum& s) {
  const TorusGrid& g = s.grid();
  const int n = g.n();
  auto c = s.coefficients();
  double scale = 0.0;
  for (const Complex& z : c) scale = std::max(scale, std::abs(z));
  const double tol = 1e-12 * scale;
  for (int k = 0; k <= n / 2; ++k) {
    const Complex a = c[static_cast<std::size_t>(g.slot(k))];
    const Complex b = c[static_cast<std::size_t>(g.slot(k == n / 2 ? k : -k))];
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw SymmetryError("from_spectrum: non-finite coefficient at k=" + std::to_string(k));
    if (std::abs(a - std::conj(b)) > tol)
      throw SymmetryError("from_spectrum: coefficients at k=" + std::to_string(k) +
                          " and -k are not conjugate");
  }
  std::vector<Complex> half(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) half[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)];
  half[0] = half[0].real();
  half[static_cast<std::size_t>(n / 2)] = half[static_cast<std::size_t>(n / 2)].real();
  return detail::from_half_spectrum(g, std::move(half));
}

/// Grid average, i.e. (1/2pi) times the rectangle-rule integral.
inline double mean(const Field& f) {
  f.require_finite();
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum / f.size();
}

/// Rectangle-rule integral over the torus.
inline double integral(const Field& f) { return mean(f) * kTwoPi; }

struct Extrema {
  double min;
  std::size_t argmin;
  double max;
  std::size_t argmax;
};

/// Grid-resolved extrema; ties go to the lowest index.
inline Extrema extrema(const Field& f) {
  auto v = f.values();
  Extrema e{v[0], 0, v[0], 0};
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] < e.min) e.min = v[j], e.argmin = j;
    if (v[j] > e.max) e.max = v[j], e.argmax = j;
  }
  return e;
}

}  // namespace fracks
