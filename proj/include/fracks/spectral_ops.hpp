#pragma once

// Nonlocal operators on the torus realized as Fourier multipliers.

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>

#include "fracks/torus_field.hpp"

namespace fracks {

/// How the chemical potential v is obtained from the density u.
///   Helmholtz: v + Lambda^beta v = u
///   Riesz:     Lambda^beta v = u - <u>, with <v> = 0
enum class DriftVariant { Helmholtz, Riesz };

inline std::string_view to_string(DriftVariant v) {
  switch (v) {
    case DriftVariant::Helmholtz: return "helmholtz";
    case DriftVariant::Riesz: return "riesz";
  }
  return "?";
}

inline DriftVariant parse_drift_variant(std::string_view s) {
  if (s == "helmholtz") return DriftVariant::Helmholtz;
  if (s == "riesz") return DriftVariant::Riesz;
  throw DomainError("unknown drift variant '" + std::string(s) + "' (expected helmholtz|riesz)");
}

namespace symbols {

/// |k|^s with the convention |0|^0 = 1, so s = 0 is the identity.
inline double fractional(int k, double s) {
  if (s == 0.0) return 1.0;
  return k == 0 ? 0.0 : std::pow(std::abs(k), s);
}

inline double potential(int k, double beta, DriftVariant variant) {
  const double kb = fractional(k, beta);
  switch (variant) {
    case DriftVariant::Helmholtz: return 1.0 / (1.0 + kb);
    case DriftVariant::Riesz: return k == 0 ? 0.0 : 1.0 / kb;
  }
  return 0.0;
}

/// Magnitude of the drift symbol |k|^(beta-1) * potential(k) for k >= 1,
/// evaluated as one expression.
inline double drift(int k, double beta, DriftVariant variant) {
  if (k == 0) return 0.0;
  const double ak = std::abs(k);
  switch (variant) {
    case DriftVariant::Helmholtz: return std::pow(ak, beta - 1.0) / (1.0 + std::pow(ak, beta));
    case DriftVariant::Riesz: return 1.0 / ak;
  }
  return 0.0;
}

inline double heat(int k, double eps) { return std::exp(-static_cast<double>(k) * k * eps); }

}  // namespace symbols

namespace detail {
inline void require_positive(double value, const char* what) {
  if (!(value > 0.0)) throw DomainError(std::string(what) + " must be > 0, got " + std::to_string(value));
}
}  // namespace detail

/// Lambda^s f, s >= 0. Annihilates constants for s > 0.
inline Field fractional_laplacian(const Field& f, double s) {
  if (!(s >= 0.0))
    throw DomainError("fractional_laplacian: order must be >= 0, got " + std::to_string(s));
  f.require_finite();
  if (s == 0.0) return f;
  return detail::apply_even_multiplier(f, [s](int k) { return symbols::fractional(k, s); });
}

/// Hilbert transform, symbol -i sgn(k). The mean and the Nyquist mode are removed.
inline Field hilbert(const Field& f) {
  f.require_finite();
  return detail::apply_odd_multiplier(f, [](int) { return 1.0; });
}

/// Spectral first derivative (Nyquist mode dropped).
inline Field derivative(const Field& f) {
  f.require_finite();
  return detail::apply_odd_multiplier(f, [](int k) { return -static_cast<double>(k); });
}

/// Spectral derivative of order `order` >= 0. Odd orders drop the Nyquist mode.
inline Field derivative(const Field& f, int order) {
  if (order < 0) throw DomainError("derivative: negative order");
  if (order == 0) return f;
  f.require_finite();
  const int sign = (order / 2) % 2 == 0 ? 1 : -1;  // (ik)^order = i^(order mod 2) * (-1)^(order/2) k^order
  if (order % 2 == 0)
    return detail::apply_even_multiplier(
        f, [order, sign](int k) { return sign * std::pow(static_cast<double>(k), order); });
  return detail::apply_odd_multiplier(
      f, [order, sign](int k) { return -sign * std::pow(static_cast<double>(k), order); });
}

/// The potential v solving the variant's elliptic equation.
inline Field solve_potential(const Field& u, double beta, DriftVariant variant) {
  detail::require_positive(beta, "solve_potential: beta");
  u.require_finite();
  return detail::apply_even_multiplier(
      u, [beta, variant](int k) { return symbols::potential(k, beta, variant); });
}

/// B(u) = Lambda^(beta-1) H v, applied as a single multiplier.
inline Field drift(const Field& u, double beta, DriftVariant variant) {
  detail::require_positive(beta, "drift: beta");
  u.require_finite();
  return detail::apply_odd_multiplier(
      u, [beta, variant](int k) { return symbols::drift(k, beta, variant); });
}

/// Convolution with the periodic heat kernel at time eps.
inline Field mollify(const Field& f, double eps) {
  detail::require_positive(eps, "mollify: eps");
  f.require_finite();
  return detail::apply_even_multiplier(f, [eps](int k) { return symbols::heat(k, eps); });
}

/// True if wavenumber k survives the 2/3 rule on an n-point grid.
inline bool retained_by_dealias(int k, int n) { return 3 * std::abs(k) <= n; }

/// 2/3-rule truncation: coefficients with |k| > n/3 are zeroed.
inline Spectrum dealias(const Spectrum& s) {
  const int n = s.grid().n();
  return s.transform([n](int k, Complex c) { return retained_by_dealias(k, n) ? c : Complex{}; });
}

/// Field version of dealias.
inline Field dealiased(const Field& f) {
  f.require_finite();
  const int n = f.grid().n();
  return detail::apply_even_multiplier(f, [n](int k) { return retained_by_dealias(k, n) ? 1.0 : 0.0; });
}

}  // namespace fracks
