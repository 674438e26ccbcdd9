#pragma once

// Scalar functionals tracked along solutions: Lebesgue norms, fractional
// Sobolev seminorms, entropy, Fisher information and the dissipation
// pairings, plus the per-time DiagnosticsRecord.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracks/detail/format.hpp"
#include "fracks/kernel_oracle.hpp"
#include "fracks/model.hpp"
#include "fracks/spectral_ops.hpp"
#include "fracks/torus_field.hpp"

namespace fracks {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Samples below -kNegativityTolerance are a NegativityError for functionals that need u >= 0.
inline constexpr double kNegativityTolerance = 1e-12;

/// Rectangle-rule L^p norm, p in [1, inf].
inline double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1 or infinity, got " + std::to_string(p));
  f.require_finite();
  auto v = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double sum = 0.0;
  if (p == 1.0)
    for (double x : v) sum += std::abs(x);
  else if (p == 2.0)
    for (double x : v) sum += x * x;
  else
    for (double x : v) sum += std::pow(std::abs(x), p);
  return std::pow(sum * f.grid().dx(), 1.0 / p);
}

namespace detail {

/// Copy of f with round-off negativity removed. Returns the largest clamped
/// magnitude through `clamp`. Throws when a sample is below -tolerance.
inline Field clamp_nonnegative(const Field& f, double tolerance, double* clamp = nullptr) {
  f.require_finite();
  double worst = 0.0;
  auto v = f.values();
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < -tolerance) throw NegativityError(j, v[j]);
    worst = std::max(worst, -v[j]);
  }
  if (clamp) *clamp = worst;
  return f.map([](double x) { return std::max(x, 0.0); });
}

inline double entropy_density(double u) { return u > 0.0 ? u * std::log(u) - u + 1.0 : 1.0; }

/// sum_k w(|k|) |c_k|^2 * 2pi/n^2, the L^2 pairing of a real even multiplier.
template <class Weight>
double spectral_quadratic(const Field& f, Weight&& w) {
  const auto half = half_spectrum(f);
  const int n = f.grid().n();
  double acc = w(0) * std::norm(half[0]);
  for (int k = 1; k < n / 2; ++k) acc += 2.0 * w(k) * std::norm(half[static_cast<std::size_t>(k)]);
  acc += w(n / 2) * std::norm(half[static_cast<std::size_t>(n / 2)]);
  return acc * kTwoPi / (static_cast<double>(n) * n);
}

}  // namespace detail

/// Entropy int (u log u - u + 1) dx together with the clamped round-off magnitude.
struct EntropyValue {
  double value;
  double clamped;
};

inline EntropyValue entropy_with_clamp(const Field& f) {
  double clamp = 0.0;
  const Field u = detail::clamp_nonnegative(f, kNegativityTolerance, &clamp);
  double sum = 0.0;
  for (double x : u.values()) sum += detail::entropy_density(x);
  return {sum * f.grid().dx(), clamp};
}

/// int (u log u - u + 1) dx with 0 log 0 = 0. Nonnegative.
inline double entropy(const Field& f) { return entropy_with_clamp(f).value; }

/// Squared homogeneous Sobolev seminorm ||Lambda^s f||_{L^2}^2.
inline double hs_seminorm_squared(const Field& f, double s) {
  f.require_finite();
  return detail::spectral_quadratic(f, [s](int k) { return symbols::fractional(k, 2.0 * s); });
}

/// ||Lambda^0.5 f||_{L^2}^2 = (2pi/n^2) sum_k |k| |c_k|^2.
inline double fisher_information(const Field& f) { return hs_seminorm_squared(f, 0.5); }

/// int f^s Lambda^alpha f dx for f >= 0, 0 < s <= 1.
inline double dissipation_pairing(const Field& f, double s, double alpha) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("dissipation_pairing: s must lie in (0, 1]");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("dissipation_pairing: alpha must lie in (0, 2]");
  const Field u = detail::clamp_nonnegative(f, kNegativityTolerance);
  const Field lu = fractional_laplacian(u, alpha);
  double sum = 0.0;
  auto uv = u.values();
  auto lv = lu.values();
  for (std::size_t j = 0; j < uv.size(); ++j) sum += (s == 1.0 ? uv[j] : std::pow(uv[j], s)) * lv[j];
  return sum * f.grid().dx();
}

/// int Lambda^alpha (f + 1) log(f + 1) dx for f >= 0.
inline double entropy_dissipation_pairing(const Field& f, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError("entropy_dissipation_pairing: alpha must lie in (0, 2]");
  const Field u = detail::clamp_nonnegative(f, kNegativityTolerance);
  const Field lu = fractional_laplacian(u, alpha);  // Lambda^alpha 1 = 0
  double sum = 0.0;
  auto uv = u.values();
  auto lv = lu.values();
  for (std::size_t j = 0; j < uv.size(); ++j) sum += lv[j] * std::log1p(uv[j]);
  return sum * f.grid().dx();
}

/// Fraction of the L^2 energy in modes the 2/3 rule discards (|k| > n/3).
inline double spectral_tail(const Field& f) {
  f.require_finite();
  const int n = f.grid().n();
  const double total = detail::spectral_quadratic(f, [](int) { return 1.0; });
  if (total <= 0.0) return 0.0;
  const double tail =
      detail::spectral_quadratic(f, [n](int k) { return retained_by_dealias(k, n) ? 0.0 : 1.0; });
  return tail / total;
}

/// Ratio  |u|_{W^{alpha/(2+2s)-delta, 1+s}}^{2+2s} / ( ||u||_{L^{1+s}}^{1+s} int u^s Lambda^alpha u ),
/// bounded by a constant C(alpha, s, delta) for u >= 0.
inline double sobolev_pairing_ratio(const Field& u, double s, double alpha, double delta) {
  const double order = alpha / (2.0 + 2.0 * s) - delta;
  const double semi = gagliardo_seminorm(u, order, 1.0 + s);
  const double lp = lp_norm(u, 1.0 + s);
  const double pairing = dissipation_pairing(u, s, alpha);
  return std::pow(semi, 2.0 + 2.0 * s) / (std::pow(lp, 1.0 + s) * pairing);
}

/// Ratio ||w||_{H^{alpha/2}}^2 / ( ||w||_inf int Lambda^alpha w log w ) for w = u + 1,
/// bounded by C(alpha) for u >= 0.
inline double entropy_hs_ratio(const Field& u, double alpha) {
  const double hs = hs_seminorm_squared(u, alpha / 2.0);
  const double sup = lp_norm(u + 1.0, kInfinity);
  return hs / (sup * entropy_dissipation_pairing(u, alpha));
}

/// Ratio |w|_{W^{alpha/2-delta, 1}}^2 / ( ||w||_{L^1} int Lambda^alpha w log w ) for w = u + 1.
inline double entropy_w1_ratio(const Field& u, double alpha, double delta) {
  const double semi = gagliardo_seminorm(u, alpha / 2.0 - delta, 1.0);
  const double l1 = lp_norm(u + 1.0, 1.0);
  return semi * semi / (l1 * entropy_dissipation_pairing(u, alpha));
}

/// Diagnostics of one state. The two time integrals are accumulated by the
/// solver and are zero for a standalone collect().
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;  // ||u||_{L^1}
  double s = 1.0;     // exponent used for the L^{1+s}, L^{2+s} entries
  double l1 = 0.0;
  double l1s = 0.0;
  double l2 = 0.0;
  double l2s = 0.0;
  double linf = 0.0;
  double entropy = 0.0;
  double entropy_clamp = 0.0;
  double hs_half_alpha = 0.0;        // ||u||_{H^{alpha/2}}
  double dissipation_pairing = 0.0;  // int u^s Lambda^alpha u
  double min_u = 0.0;
  double max_u = 0.0;
  double spectral_tail = 0.0;
  double int_l2_sq = 0.0;   // int_0^t ||u||_{L^2}^2
  double int_l2s_pow = 0.0; // int_0^t ||u||_{L^{2+s}}^{2+s}
  bool blowup = false;

  static std::string csv_header() {
    return "t,mass,s,l1,l1s,l2,l2s,linf,entropy,entropy_clamp,hs_half_alpha,dissipation_pairing,"
           "min_u,max_u,spectral_tail,int_l2_sq,int_l2s_pow,blowup";
  }

  std::string csv_row() const {
    using detail::fmt17;
    std::string row;
    for (double v : {t, mass, s, l1, l1s, l2, l2s, linf, entropy, entropy_clamp, hs_half_alpha,
                     dissipation_pairing, min_u, max_u, spectral_tail, int_l2_sq, int_l2s_pow}) {
      row += fmt17(v);
      row += ',';
    }
    row += blowup ? "1" : "0";
    return row;
  }
};

// Non-finite doubles become JSON strings so the document stays valid.
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return detail::fmt17(v);
}

inline void to_json(nlohmann::json& j, const DiagnosticsRecord& r) {
  j = nlohmann::json{{"t", json_number(r.t)},
                     {"mass", json_number(r.mass)},
                     {"s", r.s},
                     {"lp_norms",
                      {{"1", json_number(r.l1)},
                       {"1+s", json_number(r.l1s)},
                       {"2", json_number(r.l2)},
                       {"2+s", json_number(r.l2s)},
                       {"inf", json_number(r.linf)}}},
                     {"entropy", json_number(r.entropy)},
                     {"entropy_clamp", json_number(r.entropy_clamp)},
                     {"hs_half_alpha", json_number(r.hs_half_alpha)},
                     {"dissipation_pairing", json_number(r.dissipation_pairing)},
                     {"min_u", json_number(r.min_u)},
                     {"max_u", json_number(r.max_u)},
                     {"spectral_tail", json_number(r.spectral_tail)},
                     {"int_l2_sq", json_number(r.int_l2_sq)},
                     {"int_l2s_pow", json_number(r.int_l2s_pow)},
                     {"blowup", r.blowup}};
}

/// Diagnostics of u at time t. Never throws on bad data: non-finite fields
/// produce a record with the blow-up flag set, negative round-off is clamped.
inline DiagnosticsRecord collect(const Field& u, double t, const ModelParams& params) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.s = params.s_exponent().value_or(1.0);
  if (!u.finite()) {
    rec.blowup = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.mass = rec.l1 = rec.l1s = rec.l2 = rec.l2s = rec.entropy = nan;
    rec.hs_half_alpha = rec.dissipation_pairing = rec.min_u = rec.max_u = rec.spectral_tail = nan;
    rec.linf = kInfinity;
    return rec;
  }
  const Extrema e = extrema(u);
  rec.min_u = e.min;
  rec.max_u = e.max;
  rec.l1 = lp_norm(u, 1.0);
  rec.mass = rec.l1;
  rec.l1s = lp_norm(u, 1.0 + rec.s);
  rec.l2 = lp_norm(u, 2.0);
  rec.l2s = lp_norm(u, 2.0 + rec.s);
  rec.linf = lp_norm(u, kInfinity);
  rec.hs_half_alpha = std::sqrt(hs_seminorm_squared(u, params.alpha / 2.0));
  rec.spectral_tail = spectral_tail(u);
  // Entropy and pairing see the clamped field; the clamp is reported rather than enforced.
  const Field clamped = u.map([](double x) { return std::max(x, 0.0); });
  rec.entropy_clamp = std::max(0.0, -e.min);
  rec.entropy = entropy(clamped);
  rec.dissipation_pairing = dissipation_pairing(clamped, rec.s, params.alpha);
  return rec;
}

}  // namespace fracks
