#pragma once

// Brute-force real-space evaluation of the nonlocal operators, independent of
// the multiplier implementations in spectral_ops.hpp.
//
// Lambda^alpha f(x) = c_alpha * sum_k  P.V. int_T (f(x) - f(x - eta)) / |eta + 2 pi k|^(1+alpha) d eta
//
// The symmetric form on [0, pi] is used throughout:
//
//   int_0^pi N(eta) [ eta^(-1-alpha) + K_img(eta) ] d eta,
//   N(eta) = 2 f(x) - f(x - eta) - f(x + eta).
//
// The singular part is split at rho = pv_exclusion * h. On [0, rho] the
// numerator is replaced by its Taylor polynomial (derivatives are exact for
// band-limited data) and integrated in closed form. On [rho, pi] N / eta^2 is
// interpolated piecewise-linearly and integrated exactly against eta^(1-alpha).
// The image kernel K_img holds |k| <= image_cutoff explicitly and adds the
// remaining images through a Hurwitz-zeta tail; the resulting smooth integrand
// is handled by composite Simpson.
//
// Every point value is computed at (refinement, cutoff) and at twice both; the
// finer value is reported together with the difference as its tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fracks/spectral_ops.hpp"
#include "fracks/torus_field.hpp"

namespace fracks {

struct QuadratureSpec {
  int refinement = 4;     // sub-sampling factor relative to the field's grid
  int image_cutoff = 64;  // images |k| <= K summed explicitly
  double pv_exclusion = 1.0;  // half-width of the Taylor window, in refined cells

  void validate() const {
    if (refinement < 2) throw DomainError("QuadratureSpec: refinement must be >= 2");
    if (image_cutoff < 16) throw DomainError("QuadratureSpec: image_cutoff must be >= 16");
    if (!(pv_exclusion > 0.0)) throw DomainError("QuadratureSpec: pv_exclusion must be > 0");
  }
  QuadratureSpec doubled() const { return {2 * refinement, 2 * image_cutoff, pv_exclusion}; }
};

/// A quadrature result and its self-estimated absolute error.
struct OracleValue {
  double value = 0.0;
  double tolerance = 0.0;
};

/// c_alpha = Gamma(1+alpha) cos((1-alpha) pi / 2) / pi.
inline double fractional_constant(double alpha) {
  return std::tgamma(1.0 + alpha) * std::cos((1.0 - alpha) * kPi / 2.0) / kPi;
}

namespace detail {

inline void require_open_order(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw DomainError(std::string(who) + ": alpha must lie in (0, 2), got " + std::to_string(alpha));
}

/// Hurwitz zeta zeta(s, q) for s > 1, q > 0 by Euler-Maclaurin after shifting q past 10.
inline double hurwitz_zeta(double s, double q) {
  double sum = 0.0;
  while (q < 10.0) {
    sum += std::pow(q, -s);
    q += 1.0;
  }
  const double qs = std::pow(q, -s);
  sum += q * qs / (s - 1.0) + 0.5 * qs;
  // Bernoulli corrections B2/2!, B4/4!, B6/6!, B8/8!
  const double coeff[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  double rising = s;        // s (s+1) ... (s+2j-2)
  double qpow = qs / q;     // q^(-s-2j+1)
  for (int j = 0; j < 4; ++j) {
    sum += coeff[j] * rising * qpow;
    rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
    qpow /= q * q;
  }
  return sum;
}

}  // namespace detail

/// Sum over the images |k| > cutoff of |eta + 2 pi k|^(-1-alpha), for |eta| <= pi.
inline double image_tail(double alpha, int cutoff, double eta) {
  const double s = 1.0 + alpha;
  const double q = eta / kTwoPi;
  return std::pow(kTwoPi, -s) *
         (detail::hurwitz_zeta(s, cutoff + 1 + q) + detail::hurwitz_zeta(s, cutoff + 1 - q));
}

namespace detail {

/// Trigonometric interpolant of a field, evaluable anywhere.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f) : n_(f.grid().n()), half_(half_spectrum(f)) {}

  double operator()(double x) const {
    double acc = half_[0].real();
    for (int k = 1; k < n_ / 2; ++k) {
      const Complex e(std::cos(k * x), std::sin(k * x));
      acc += 2.0 * (half_[static_cast<std::size_t>(k)] * e).real();
    }
    acc += half_[static_cast<std::size_t>(n_ / 2)].real() * std::cos(0.5 * n_ * x);
    return acc / n_;
  }

  /// Samples of the interpolant, or of its derivative of the given order, on
  /// a grid `factor` times finer. The Nyquist cosine is split between +-n/2.
  std::vector<double> refined(int factor, int order = 0) const {
    const int m = n_ * factor;
    std::vector<Complex> big(static_cast<std::size_t>(m / 2 + 1));
    const double scale = static_cast<double>(m) / n_;
    for (int k = 0; k <= n_ / 2; ++k) {
      Complex c = half_[static_cast<std::size_t>(k)] * scale;
      if (k == n_ / 2) c = 0.5 * c.real();
      Complex ik_pow = 1.0;
      for (int o = 0; o < order; ++o) ik_pow *= Complex(0.0, k);
      big[static_cast<std::size_t>(k)] = c * ik_pow;
    }
    Field fine = from_half_spectrum(TorusGrid(m), std::move(big));
    return {fine.values().begin(), fine.values().end()};
  }

 private:
  int n_;
  std::vector<Complex> half_;
};

/// One refinement level of the periodized-kernel quadrature for a fixed field and order.
class KernelQuadrature {
 public:
  KernelQuadrature(const Field& f, const TrigInterpolant& interp, double alpha, int refinement,
                   int cutoff, double pv_exclusion)
      : interp_(&interp),
        grid_(f.grid()),
        refinement_(refinement),
        m_(f.grid().n() * refinement),
        half_(m_ / 2),
        h_(kTwoPi / m_),
        rho_(pv_exclusion * h_),
        alpha_(alpha),
        c_alpha_(fractional_constant(alpha)) {
    if (!(rho_ < kPi / 2)) throw DomainError("KernelQuadrature: exclusion window too wide");
    fine_ = interp.refined(refinement);
    for (int order = 1; order <= 4; ++order) deriv_[order - 1] = interp.refined(refinement, order);
    build_image_table(cutoff);
    build_singular_weights();
  }

  /// Lambda^alpha f at coarse grid index j.
  double lambda(int x_index) const {
    const int i = x_index * refinement_;
    const double fx = fine_[idx(i)];
    const double x = grid_.x(x_index);
    const double n_rho = 2.0 * fx - (*interp_)(x - rho_) - (*interp_)(x + rho_);
    const double a2 = -deriv_[1][idx(i)];
    const double a4 = -deriv_[3][idx(i)] / 12.0;
    return c_alpha_ * integrate(
                          [&](int j) { return 2.0 * fx - fine_[idx(i - j)] - fine_[idx(i + j)]; },
                          n_rho, a2, a4);
  }

  /// I(f) = c_alpha sum_k P.V. int (f(x) - f(y))^2 / |x - y + 2 pi k|^(1+alpha) dy at coarse index j.
  double dissipation(int x_index) const {
    const int i = x_index * refinement_;
    const double fx = fine_[idx(i)];
    const double x = grid_.x(x_index);
    const auto sq = [](double v) { return v * v; };
    const double n_rho = sq(fx - (*interp_)(x - rho_)) + sq(fx - (*interp_)(x + rho_));
    const double a = deriv_[0][idx(i)];
    const double b = deriv_[1][idx(i)] / 2.0;
    const double c = deriv_[2][idx(i)] / 6.0;
    return c_alpha_ * integrate(
                          [&](int j) {
                            return sq(fx - fine_[idx(i - j)]) + sq(fx - fine_[idx(i + j)]);
                          },
                          n_rho, 2.0 * a * a, 2.0 * (b * b + 2.0 * a * c));
  }

 private:
  std::size_t idx(int i) const { return static_cast<std::size_t>(((i % m_) + m_) % m_); }

  void build_image_table(int cutoff) {
    const double s = 1.0 + alpha_;
    images_.resize(static_cast<std::size_t>(half_ + 1));
    for (int j = 0; j <= half_; ++j) {
      const double eta = j * h_;
      double acc = image_tail(alpha_, cutoff, eta);
      for (int k = cutoff; k >= 1; --k)  // smallest terms first
        acc += std::pow(kTwoPi * k + eta, -s) + std::pow(kTwoPi * k - eta, -s);
      images_[static_cast<std::size_t>(j)] = acc;
    }
  }

  // Product-integration weights of int_rho^pi M(eta) eta^(1-alpha) d eta for
  // M piecewise linear through rho and the grid nodes beyond it.
  void build_singular_weights() {
    const double g1 = 2.0 - alpha_;  // exponent of the zeroth moment
    const double g2 = 3.0 - alpha_;
    first_node_ = static_cast<int>(std::floor(rho_ / h_ + 1e-9)) + 1;
    std::vector<double> nodes{rho_};
    for (int j = first_node_; j <= half_; ++j) nodes.push_back(j * h_);
    weights_.assign(nodes.size(), 0.0);
    for (std::size_t p = 0; p + 1 < nodes.size(); ++p) {
      const double a = nodes[p], b = nodes[p + 1];
      const double mu0 = (std::pow(b, g1) - std::pow(a, g1)) / g1;
      const double mu1 = (std::pow(b, g2) - std::pow(a, g2)) / g2;
      weights_[p] += (b * mu0 - mu1) / (b - a);
      weights_[p + 1] += (mu1 - a * mu0) / (b - a);
    }
  }

  template <class Numerator>
  double integrate(Numerator&& numerator, double n_rho, double a2, double a4) const {
    // Taylor window [0, rho]
    double singular = a2 * std::pow(rho_, 2.0 - alpha_) / (2.0 - alpha_) +
                      a4 * std::pow(rho_, 4.0 - alpha_) / (4.0 - alpha_);
    singular += weights_[0] * n_rho / (rho_ * rho_);
    for (int j = first_node_; j <= half_; ++j) {
      const double eta = j * h_;
      singular += weights_[static_cast<std::size_t>(j - first_node_ + 1)] * numerator(j) / (eta * eta);
    }
    // Composite Simpson for the images; N(0) = 0.
    double images = 0.0;
    for (int j = 1; j <= half_; ++j) {
      const double w = (j == half_) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      images += w * numerator(j) * images_[static_cast<std::size_t>(j)];
    }
    images *= h_ / 3.0;
    return singular + images;
  }

  const TrigInterpolant* interp_;
  TorusGrid grid_;
  int refinement_;
  int m_;
  int half_;
  double h_;
  double rho_;
  double alpha_;
  double c_alpha_;
  std::vector<double> fine_;
  std::vector<double> deriv_[4];
  std::vector<double> images_;
  std::vector<double> weights_;
  int first_node_ = 1;
};

/// Runs a kernel functional at two refinement levels over a set of points.
template <class Eval>
std::vector<OracleValue> two_level(const Field& f, double alpha, const QuadratureSpec& q,
                                   std::span<const int> points, Eval eval) {
  q.validate();
  f.require_finite();
  const TrigInterpolant interp(f);
  const KernelQuadrature coarse(f, interp, alpha, q.refinement, q.image_cutoff, q.pv_exclusion);
  const QuadratureSpec fq = q.doubled();
  const KernelQuadrature fine(f, interp, alpha, fq.refinement, fq.image_cutoff, fq.pv_exclusion);
  std::vector<OracleValue> out;
  out.reserve(points.size());
  for (int j : points) {
    if (j < 0 || j >= f.size()) throw DomainError("kernel oracle: x_index out of range");
    const double vc = eval(coarse, j);
    const double vf = eval(fine, j);
    out.push_back({vf, std::abs(vf - vc) + 1e-14 * (1.0 + std::abs(vf))});
  }
  return out;
}

inline std::vector<int> all_points(const Field& f) {
  std::vector<int> pts(static_cast<std::size_t>(f.size()));
  for (int j = 0; j < f.size(); ++j) pts[static_cast<std::size_t>(j)] = j;
  return pts;
}

}  // namespace detail

/// Lambda^alpha f at one grid point from the periodized singular kernel.
inline OracleValue lambda_alpha_point(const Field& f, double alpha, int x_index,
                                      const QuadratureSpec& q = {}) {
  detail::require_open_order(alpha, "lambda_alpha_point");
  const int pts[] = {x_index};
  return detail::two_level(f, alpha, q, pts, [](const detail::KernelQuadrature& k, int j) {
    return k.lambda(j);
  })[0];
}

/// lambda_alpha_point at every grid point (kernel tables built once).
inline std::vector<OracleValue> lambda_alpha_field(const Field& f, double alpha,
                                                   const QuadratureSpec& q = {}) {
  detail::require_open_order(alpha, "lambda_alpha_field");
  const auto pts = detail::all_points(f);
  return detail::two_level(f, alpha, q, pts, [](const detail::KernelQuadrature& k, int j) {
    return k.lambda(j);
  });
}

/// The nonnegative dissipation density I(f)(x) at one grid point.
inline OracleValue dissipation_I(const Field& f, double alpha, int x_index,
                                 const QuadratureSpec& q = {}) {
  detail::require_open_order(alpha, "dissipation_I");
  const int pts[] = {x_index};
  return detail::two_level(f, alpha, q, pts, [](const detail::KernelQuadrature& k, int j) {
    return k.dissipation(j);
  })[0];
}

inline std::vector<OracleValue> dissipation_I_field(const Field& f, double alpha,
                                                    const QuadratureSpec& q = {}) {
  detail::require_open_order(alpha, "dissipation_I_field");
  const auto pts = detail::all_points(f);
  return detail::two_level(f, alpha, q, pts, [](const detail::KernelQuadrature& k, int j) {
    return k.dissipation(j);
  });
}

namespace detail {

// Periodic trapezoid of (1/4pi) int (f(x-t) - f(x+t)) cot(t/2) dt. The
// integrand is a trigonometric polynomial in t; its t = 0 value is -4 f'(x).
inline double hilbert_quadrature(const std::vector<double>& fine, const std::vector<double>& d1,
                                 int i) {
  const int m = static_cast<int>(fine.size());
  const auto at = [&](int k) { return fine[static_cast<std::size_t>(((k % m) + m) % m)]; };
  const double h = kTwoPi / m;
  double acc = -4.0 * d1[static_cast<std::size_t>(i)];
  for (int j = 1; j < m; ++j) {
    const double t = j * h;
    acc += (at(i - j) - at(i + j)) / std::tan(0.5 * t);
  }
  return acc * h / (2.0 * kTwoPi);
}

}  // namespace detail

/// Hilbert transform at one grid point from the cotangent kernel, prefactor 1/(2 pi).
inline OracleValue hilbert_point(const Field& f, int x_index, const QuadratureSpec& q = {}) {
  q.validate();
  f.require_finite();
  if (x_index < 0 || x_index >= f.size()) throw DomainError("hilbert_point: x_index out of range");
  const detail::TrigInterpolant interp(f);
  double values[2];
  for (int level = 0; level < 2; ++level) {
    const int r = q.refinement << level;
    values[level] =
        detail::hilbert_quadrature(interp.refined(r), interp.refined(r, 1), x_index * r);
  }
  return {values[1], std::abs(values[1] - values[0]) + 1e-14 * (1.0 + std::abs(values[1]))};
}

/// Gagliardo seminorm ( int int |f(x) - f(y)|^p / d(x,y)^(1+s p) dx dy )^(1/p),
/// d the geodesic distance on the torus, 0 < s < 1, p >= 1.
///
/// Double rectangle sum over the grid with the diagonal excluded; the missing
/// near-diagonal mass of the |f'|^p |eta|^gamma singularity is restored with
/// the zeta-function correction -2 zeta(-gamma) |f'(x)|^p h^(1+gamma).
inline double gagliardo_seminorm(const Field& f, double s, double p) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("gagliardo_seminorm: s must lie in (0, 1)");
  if (!(p >= 1.0)) throw DomainError("gagliardo_seminorm: p must be >= 1");
  f.require_finite();
  const int n = f.size();
  const double h = f.grid().dx();
  const double expo = 1.0 + s * p;
  const double gamma = p * (1.0 - s) - 1.0;
  auto v = f.values();
  std::vector<double> kernel(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (int d = 1; d <= n / 2; ++d) kernel[static_cast<std::size_t>(d)] = std::pow(d * h, -expo);
  const Field df = derivative(f);
  const double zeta_corr = -2.0 * std::riemann_zeta(-gamma) * std::pow(h, 1.0 + gamma);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      int d = std::abs(i - j);
      d = std::min(d, n - d);
      row += std::pow(std::abs(v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)]), p) *
             kernel[static_cast<std::size_t>(d)];
    }
    total += h * row + zeta_corr * std::pow(std::abs(df[static_cast<std::size_t>(i)]), p);
  }
  total *= h;
  return std::pow(std::max(total, 0.0), 1.0 / p);
}

}  // namespace fracks
