#pragma once

// Executable versions of the elliptic estimates, the pointwise identity for
// f Lambda^alpha f, the lower bound of Lambda^alpha at a maximum, the norm
// bounds along trajectories, the long-time sup bound and the entropy
// inequalities. Every check returns a VerdictReport.
//
// Slack is (rhs - lhs) / scale, so a negative slack is a violated inequality
// and worst_slack is the most negative margin seen.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracks/diagnostics.hpp"
#include "fracks/evolution.hpp"
#include "fracks/kernel_oracle.hpp"
#include "fracks/spectral_ops.hpp"

namespace fracks {

struct VerdictReport {
  std::string check_name;
  long trials = 0;
  long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  bool pass = true;
  bool skipped = false;
  std::string note;

  /// One inequality lhs <= rhs, violated when rhs - lhs < -tolerance * scale.
  void observe(double lhs, double rhs, double scale) {
    const double slack = (rhs - lhs) / (scale > 0.0 ? scale : 1.0);
    if (!std::isfinite(slack) || slack < -tolerance) {
      ++violations;
      pass = false;
    }
    if (std::isnan(slack))
      worst_slack = slack;
    else if (!std::isnan(worst_slack))
      worst_slack = std::min(worst_slack, slack);
  }

  void fail(const std::string& why) {
    ++violations;
    pass = false;
    append_note(why);
  }

  void append_note(const std::string& text) {
    if (!note.empty()) note += "; ";
    note += text;
  }

  static VerdictReport skip(std::string name, std::string why) {
    VerdictReport r;
    r.check_name = std::move(name);
    r.skipped = true;
    r.note = std::move(why);
    return r;
  }

  std::string status() const { return skipped ? "SKIPPED" : (pass ? "PASS" : "FAIL"); }
};

inline void to_json(nlohmann::json& j, const VerdictReport& r) {
  j = nlohmann::json{{"check_name", r.check_name},
                     {"status", r.status()},
                     {"trials", r.trials},
                     {"violations", r.violations},
                     {"worst_slack", json_number(r.worst_slack)},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass},
                     {"skipped", r.skipped},
                     {"note", r.note}};
}

/// Fixed-width table, one row per report.
inline void print_table(std::ostream& os, const std::vector<VerdictReport>& reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-8s %7s %10s %13s %10s\n", "check", "status", "trials", "violations",
                "worst_slack", "tolerance");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-28s %-8s %7ld %10ld %13.4e %10.1e\n", r.check_name.c_str(),
                  r.status().c_str(), r.trials, r.violations, r.worst_slack, r.tolerance);
    os << line;
    if (!r.note.empty()) os << "    " << r.note << '\n';
  }
}

/// True when nothing failed and at least one report actually ran.
inline bool suite_passed(const std::vector<VerdictReport>& reports) {
  bool any_ran = false;
  for (const auto& r : reports) {
    if (r.skipped) continue;
    any_ran = true;
    if (!r.pass) return false;
  }
  return any_ran;
}

// ---------------------------------------------------------------------------
// Random fields

/// Independent generator for trial `trial` of a suite seeded with `seed`.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + trial + 1;  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return std::mt19937_64(z ^ (z >> 31));
}

/// Real trigonometric polynomial with modes 1..kmax and N(0, 1/k^2) coefficients.
/// The coefficients do not depend on the grid, so the same rng state gives the
/// same function on every resolution.
inline Field random_band_limited(const TorusGrid& g, std::mt19937_64& rng, int kmax) {
  std::normal_distribution<double> normal;
  std::vector<double> a(static_cast<std::size_t>(kmax) + 1), b(a.size());
  for (int k = 1; k <= kmax; ++k) {
    a[static_cast<std::size_t>(k)] = normal(rng) / k;
    b[static_cast<std::size_t>(k)] = normal(rng) / k;
  }
  return Field::sample(g, [&](double x) {
    double v = 0.0;
    for (int k = 1; k <= kmax; ++k)
      v += a[static_cast<std::size_t>(k)] * std::cos(k * x) + b[static_cast<std::size_t>(k)] * std::sin(k * x);
    return v;
  });
}

/// g^2 + c with g band-limited and c uniform in [0, c_max]; nonnegative.
inline Field random_nonnegative(const TorusGrid& g, std::mt19937_64& rng, int kmax, double c_max = 1.0) {
  const Field base = random_band_limited(g, rng, kmax);
  const double c = std::uniform_real_distribution<double>(0.0, c_max)(rng);
  return base * base + c;
}

// ---------------------------------------------------------------------------
// Elliptic estimates for the potential

/// Helmholtz: v >= 0, Lambda^beta v <= u, |v|_inf <= |u|_inf, |Lambda^beta v|_inf <= 4 |u|_inf,
/// |(Lambda^beta v)_x|_inf <= 4 |u_x|_inf and the energy split for s in {0, 1/2, 1}.
/// Riesz: |Lambda^beta v|_inf <= |u|_inf, |(Lambda^beta v)_x|_inf <= |u_x|_inf, the energy
/// bound, and Lambda^beta v = u - <u>.
inline void check_elliptic_field(VerdictReport& rep, const Field& u, double beta, DriftVariant variant,
                                 double* identity_mismatch = nullptr) {
  const Field v = solve_potential(u, beta, variant);
  const Field lv = fractional_laplacian(v, beta);
  const double usup = lp_norm(u, kInfinity);
  const double scale = std::max(usup, 1e-300);
  const double dsup = lp_norm(derivative(u), kInfinity);
  const double dlv = lp_norm(derivative(lv), kInfinity);
  const double lvsup = lp_norm(lv, kInfinity);

  if (variant == DriftVariant::Helmholtz) {
    rep.observe(-extrema(v).min, 0.0, scale);
    rep.observe(extrema(lv - u).max, 0.0, scale);
    rep.observe(lp_norm(v, kInfinity), usup, scale);
    rep.observe(lvsup, 4.0 * usup, scale);
    rep.observe(dlv, 4.0 * dsup, std::max(4.0 * dsup, scale));
    for (double s : {0.0, 0.5, 1.0}) {
      const double lhs = 0.5 * hs_seminorm_squared(v, beta + s) + hs_seminorm_squared(v, beta / 2.0 + s);
      const double rhs = 0.5 * hs_seminorm_squared(u, s);
      rep.observe(lhs, rhs, std::max(rhs, 1e-300));
    }
  } else {
    rep.observe(lvsup, usup, scale);
    rep.observe(dlv, dsup, std::max(dsup, scale));
    for (double s : {0.0, 0.5, 1.0}) {
      const double lhs = 0.5 * hs_seminorm_squared(v, beta + s);
      const double rhs = 0.5 * hs_seminorm_squared(u, s);
      rep.observe(lhs, rhs, std::max(rhs, 1e-300));
    }
    // Round-off in v's samples is amplified by |k|^beta at the top modes, so
    // this item carries the suite tolerance; the worst mismatch is reported.
    const double mismatch = lp_norm(lv - (u + (-mean(u))), kInfinity);
    rep.observe(mismatch, 0.0, scale);
    if (identity_mismatch) *identity_mismatch = std::max(*identity_mismatch, mismatch / scale);
  }
}

inline VerdictReport check_elliptic_suite(long trials, double beta, DriftVariant variant, std::uint64_t seed,
                                          int n = 256, double tolerance = 1e-10) {
  if (trials < 1) throw DomainError("check_elliptic_suite: trials must be >= 1");
  VerdictReport rep;
  rep.check_name = std::string("elliptic_") + std::string(to_string(variant));
  rep.tolerance = tolerance;
  const TorusGrid g(n);
  const int kmax = std::max(1, n / 16);
  double mismatch = 0.0;
  for (long t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    check_elliptic_field(rep, random_nonnegative(g, rng, kmax), beta, variant, &mismatch);
    ++rep.trials;
  }
  if (variant == DriftVariant::Riesz)
    rep.append_note("max |Lambda^beta v - (u - <u>)|_inf / |u|_inf = " + detail::fmt17(mismatch));
  return rep;
}

// ---------------------------------------------------------------------------
// f Lambda^alpha f = (1/2) Lambda^alpha(f^2) + (1/2) I(f)

/// Largest pointwise residual of the identity divided by 1 + |f|_inf^2.
inline double pointwise_identity_residual(const Field& f, double alpha, const QuadratureSpec& q = {}) {
  const Field lhs = f * fractional_laplacian(f, alpha);
  const Field half_sq = 0.5 * fractional_laplacian(f * f, alpha);
  const auto dissipation = dissipation_I_field(f, alpha, q);
  double worst = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    worst = std::max(worst, std::abs(lhs[i] - half_sq[i] - 0.5 * dissipation[i].value));
  }
  const double sup = lp_norm(f, kInfinity);
  return worst / (1.0 + sup * sup);
}

inline VerdictReport check_pointwise_identity(long trials, double alpha, std::uint64_t seed, int n = 64,
                                              double tolerance = 1e-3) {
  if (trials < 1) throw DomainError("check_pointwise_identity: trials must be >= 1");
  detail::require_open_order(alpha, "check_pointwise_identity");
  VerdictReport rep;
  rep.check_name = "pointwise_identity_a" + detail::fmt17(alpha);
  rep.tolerance = tolerance;
  const TorusGrid g(n);
  double worst = 0.0;
  for (long t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const double res = pointwise_identity_residual(random_band_limited(g, rng, 6), alpha);
    worst = std::max(worst, res);
    rep.observe(res, 0.0, 1.0);
    ++rep.trials;
  }
  rep.append_note("max scaled residual " + detail::fmt17(worst));
  return rep;
}

// ---------------------------------------------------------------------------
// Lower bound for Lambda^alpha at the maximum of a positive function

struct LowerBoundEvaluation {
  bool hypotheses_hold = false;
  std::string failed_hypothesis;
  double sup = 0.0;            // |h|_inf
  double gamma = 0.0;          // |h|_{L^p}
  double lambda_at_max = 0.0;  // Lambda^alpha h(x*) from the kernel quadrature
  double oracle_tolerance = 0.0;
  double bound = 0.0;          // c_alpha 2^{-p alpha} |h|_inf^{1 + alpha p} / gamma^{alpha p}
  double slack() const { return lambda_at_max - bound; }
};

inline LowerBoundEvaluation evaluate_lower_bound(const Field& h, double alpha, double p,
                                                 const QuadratureSpec& q = {}) {
  detail::require_open_order(alpha, "lower bound");
  if (!(p >= 1.0)) throw DomainError("lower bound: p must be >= 1");
  h.require_finite();
  const Extrema e = extrema(h);
  if (!(e.min > 0.0)) throw DomainError("lower bound: h must be positive");
  LowerBoundEvaluation ev;
  ev.sup = e.max;
  ev.gamma = lp_norm(h, p);
  if (!(ev.sup / 2.0 >= mean(h)))
    ev.failed_hypothesis = "|h|_inf / 2 < <h>";
  else if (!(ev.gamma <= std::pow(kPi, 1.0 / p) * ev.sup / 2.0))
    ev.failed_hypothesis = "|h|_p > pi^(1/p) |h|_inf / 2";
  ev.hypotheses_hold = ev.failed_hypothesis.empty();
  ev.bound = fractional_constant(alpha) * std::pow(2.0, -p * alpha) * std::pow(ev.sup, 1.0 + alpha * p) /
             std::pow(ev.gamma, alpha * p);
  if (ev.hypotheses_hold) {
    const OracleValue lam = lambda_alpha_point(h, alpha, static_cast<int>(e.argmax), q);
    ev.lambda_at_max = lam.value;
    ev.oracle_tolerance = lam.tolerance;
  }
  return ev;
}

/// SKIPPED when the hypotheses fail. Passes when the oracle value at the
/// maximum exceeds the bound by more than the oracle's own tolerance.
inline VerdictReport check_fractional_lower_bound(const Field& h, double alpha, double p, const QuadratureSpec& q = {}) {
  const auto ev = evaluate_lower_bound(h, alpha, p, q);
  const std::string name = "lower_bound_a" + detail::fmt17(alpha) + "_p" + detail::fmt17(p);
  if (!ev.hypotheses_hold) return VerdictReport::skip(name, "hypothesis fails: " + ev.failed_hypothesis);
  VerdictReport rep;
  rep.check_name = name;
  rep.trials = 1;
  rep.tolerance = 0.0;
  rep.observe(ev.bound + ev.oracle_tolerance, ev.lambda_at_max, std::abs(ev.bound));
  if (!(ev.slack() > 0.0)) rep.fail("slack not strictly positive");
  rep.append_note("Lambda^alpha h(x*) = " + detail::fmt17(ev.lambda_at_max) + ", bound = " + detail::fmt17(ev.bound));
  return rep;
}

/// 0.05 + a mass-one multiple of (1 + cos x)^m, peaked at x = 0.
inline Field lower_bound_bump(const TorusGrid& g, int m) {
  double norm = 1.0;
  for (int i = 1; i <= m; ++i) norm = norm * (m + i) / i / 2.0;  // binom(2m, m) / 2^m
  return Field::sample(g, [m, norm](double x) { return 0.05 + std::pow(1.0 + std::cos(x), m) / norm; });
}

struct ScalingFit {
  std::vector<double> sups, slacks;
  double slope = 0.0;
};

/// Least-squares slope of log(slack) against log|h|_inf over the bump family.
inline ScalingFit fit_lower_bound_scaling(double alpha, double p, const std::vector<int>& powers, int n = 256,
                                          const QuadratureSpec& q = {}) {
  ScalingFit fit;
  const TorusGrid g(n);
  for (int m : powers) {
    const auto ev = evaluate_lower_bound(lower_bound_bump(g, m), alpha, p, q);
    if (!ev.hypotheses_hold) throw DomainError("bump family member m=" + std::to_string(m) + " fails hypotheses");
    fit.sups.push_back(ev.sup);
    fit.slacks.push_back(ev.slack());
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(fit.sups.size());
  for (std::size_t i = 0; i < fit.sups.size(); ++i) {
    const double x = std::log(fit.sups[i]);
    const double y = std::log(fit.slacks[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return fit;
}

/// Every family member satisfies the bound with positive slack, and the
/// slack grows like |h|_inf^(1 + alpha p) within +-0.2 in the exponent.
inline VerdictReport check_lower_bound_scaling(double alpha, double p = 1.0,
                                               const std::vector<int>& powers = {8, 16, 32, 64}, int n = 256) {
  VerdictReport rep;
  rep.check_name = "lower_bound_scaling_a" + detail::fmt17(alpha);
  rep.tolerance = 0.2;
  const auto fit = fit_lower_bound_scaling(alpha, p, powers, n);
  for (double sl : fit.slacks) {
    ++rep.trials;
    if (!(sl > 0.0)) rep.fail("non-positive slack " + detail::fmt17(sl));
  }
  const double expected = 1.0 + alpha * p;
  rep.observe(std::abs(fit.slope - expected), 0.0, 1.0);
  rep.append_note("slope " + detail::fmt17(fit.slope) + ", expected " + detail::fmt17(expected));
  return rep;
}

// ---------------------------------------------------------------------------
// Norm bounds along a trajectory

namespace detail {

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) sum += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

}  // namespace detail

/// Fraction of a seminorm order used for delta in the fractional-Sobolev items.
inline constexpr double kDeltaFraction = 0.1;

/// Norm bounds checked from records (and snapshots for the seminorm items):
///  mass: |u|_1 <= N,  l2 integral: int |u|_2^2 <= N t + 2N,
///  l1s growth: |u|_{1+s} <= e^{rt} |u0|_{1+s},
///  l2s integral: (r(s+1) - chi s) int |u|_{2+s}^{2+s} <= e^{r(s+1)t} |u0|_{1+s}^{1+s},
///  seminorm integrals (order alpha/2 in L^1, order alpha/(2+2s) in L^{1+s}) stay
///  finite with bounded ratios to their pairings, and the entropy stays below
///  |u0|_{1+s} + 2pi + 2 chi N (t + 2).
/// N = max(|u0|_1, 2pi). Items that need s are skipped when chi <= r or r = 0.
inline VerdictReport check_norm_evolution(const Trajectory& traj, double tolerance = 1e-4) {
  if (traj.outcome != Outcome::Completed)
    throw DomainError("check_norm_evolution: trajectory did not complete (" +
                      std::string(to_string(traj.outcome)) + ")");
  if (traj.records.empty()) throw DomainError("check_norm_evolution: no records");
  const ModelParams& p = traj.params;
  VerdictReport rep;
  rep.check_name = "norm_evolution";
  rep.tolerance = tolerance;
  const auto& r0 = traj.records.front();
  const double big_n = std::max(r0.mass, kTwoPi);
  const auto s_opt = p.s_exponent();
  std::vector<std::string> skipped;

  for (const auto& rec : traj.records) {
    ++rep.trials;
    rep.observe(rec.mass, big_n, big_n);
    const double rhs2 = big_n * rec.t + 2.0 * big_n;
    rep.observe(rec.int_l2_sq, rhs2, rhs2);
  }

  if (s_opt) {
    const double s = *s_opt;
    const double l1s0 = r0.l1s;
    const double coeff = p.r * (s + 1.0) - p.chi * s;
    for (const auto& rec : traj.records) {
      const double rhs3 = std::exp(p.r * rec.t) * l1s0;
      rep.observe(rec.l1s, rhs3, rhs3);
      if (coeff > 0.0) {
        const double rhs4 = std::exp(p.r * (s + 1.0) * rec.t) * std::pow(l1s0, s + 1.0);
        rep.observe(coeff * rec.int_l2s_pow, rhs4, rhs4);
      }
      const double rhs_entropy = l1s0 + kTwoPi + 2.0 * p.chi * big_n * (rec.t + 2.0);
      rep.observe(rec.entropy, rhs_entropy, rhs_entropy);
    }
    if (!(coeff > 0.0)) skipped.push_back("l2s integral: r(s+1) - chi s <= 0");
  } else {
    skipped.push_back("l1s growth, l2s integral, L^{1+s} seminorm, entropy bound: s undefined");
  }

  // Seminorm items from the snapshots: pointwise ratios to the pairings must be
  // finite, and so must the time integrals.
  if (traj.snapshots.size() >= 2) {
    std::vector<double> times, w6, pair6;
    std::vector<double> w5, pair5;
    double max_ratio5 = 0.0, max_ratio6 = 0.0;
    const double order6 = p.alpha / 2.0;
    for (const auto& [t, u] : traj.snapshots) {
      times.push_back(t);
      const Field w = u.map([](double x) { return std::max(x, 0.0); });
      const double semi6 = gagliardo_seminorm(w, order6 * (1.0 - kDeltaFraction), 1.0);
      const double ent_pair = entropy_dissipation_pairing(w, p.alpha);
      w6.push_back(semi6 * semi6);
      pair6.push_back(lp_norm(w + 1.0, 1.0) * ent_pair);
      if (ent_pair > 1e-12 * (1.0 + semi6 * semi6)) max_ratio6 = std::max(max_ratio6, w6.back() / pair6.back());
      if (s_opt) {
        const double s = *s_opt;
        const double order5 = p.alpha / (2.0 + 2.0 * s);
        const double semi5 = gagliardo_seminorm(w, order5 * (1.0 - kDeltaFraction), 1.0 + s);
        const double pairing = dissipation_pairing(w, s, p.alpha);
        w5.push_back(std::pow(semi5, 2.0 + 2.0 * s));
        pair5.push_back(std::pow(lp_norm(w, 1.0 + s), 1.0 + s) * pairing);
        if (pairing > 1e-12 * (1.0 + w5.back())) max_ratio5 = std::max(max_ratio5, w5.back() / pair5.back());
      }
    }
    const double int6 = detail::trapezoid(times, w6);
    if (!std::isfinite(int6) || !std::isfinite(max_ratio6)) rep.fail("L^1 seminorm integral not finite");
    rep.append_note("L^1 seminorm integral = " + detail::fmt17(int6) + ", max ratio " + detail::fmt17(max_ratio6));
    if (s_opt) {
      const double int5 = detail::trapezoid(times, w5);
      if (!std::isfinite(int5) || !std::isfinite(max_ratio5)) rep.fail("L^{1+s} seminorm integral not finite");
      rep.append_note("L^{1+s} seminorm integral = " + detail::fmt17(int5) + ", max ratio " +
                      detail::fmt17(max_ratio5));
    }
  } else {
    skipped.push_back("seminorm integrals: fewer than two snapshots");
  }

  for (const auto& s : skipped) rep.append_note("skipped " + s);
  return rep;
}

// ---------------------------------------------------------------------------
// Long-time sup bound

/// Largest root of r X + (chi - r) X^2 - c_alpha 2^-alpha X^(1+alpha) / N^alpha = -1,
/// or nullopt when the left side never drops below -1 (no ceiling from this argument).
inline std::optional<double> comparison_root(const ModelParams& p, double big_n) {
  const double c = fractional_constant(std::min(p.alpha, 2.0 - 1e-15)) * std::pow(2.0, -p.alpha) /
                   std::pow(big_n, p.alpha);
  const auto g = [&](double x) {
    return p.r * x + (p.chi - p.r) * x * x - c * std::pow(x, 1.0 + p.alpha) + 1.0;
  };
  double hi = 1.0;
  while (g(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > 1e200) return std::nullopt;
  }
  // g(0) = 1 > 0; walk down from hi to find the last sign change.
  double lo = hi / 2.0;
  while (lo > 1e-300 && g(lo) < 0.0) {
    hi = lo;
    lo /= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return hi;
}

/// sup_t |u|_inf <= max(s0, 2N/pi, |u0|_inf) within 5%, for alpha > 1, or
/// alpha = 1 with chi < r + 1 / (2 pi N). SKIPPED otherwise.
inline VerdictReport check_largetime_bound(const Trajectory& traj, const ModelParams& p, double tolerance = 0.05) {
  const std::string name = "largetime_bound";
  if (traj.records.empty()) throw DomainError("check_largetime_bound: no records");
  const auto& r0 = traj.records.front();
  const double big_n = std::max(r0.mass, kTwoPi);
  if (p.alpha < 1.0) return VerdictReport::skip(name, "needs alpha >= 1");
  if (p.alpha == 1.0 && !(p.chi < p.r + 1.0 / (kTwoPi * big_n)))
    return VerdictReport::skip(name, "alpha = 1 needs chi < r + 1/(2 pi N)");
  const auto root = comparison_root(p, big_n);
  if (!root) return VerdictReport::skip(name, "comparison polynomial has no root");
  const double ceiling = std::max({*root, 2.0 * big_n / kPi, r0.linf});
  VerdictReport rep;
  rep.check_name = name;
  rep.tolerance = tolerance;
  double sup = 0.0;
  for (const auto& rec : traj.records) {
    ++rep.trials;
    sup = std::max(sup, rec.linf);
    rep.observe(rec.linf, ceiling, ceiling);
  }
  rep.append_note("sup |u|_inf = " + detail::fmt17(sup) + ", ceiling = " + detail::fmt17(ceiling));
  return rep;
}

// ---------------------------------------------------------------------------
// Entropy inequalities

/// int f log f <= 2 pi + |Lambda^0.5 f|^2 / (2 min f) for positive f of unit mean.
/// Fields are c + (1 - c) g^2 / <g^2> with c uniform in [0.1, 0.9].
inline VerdictReport check_log_sobolev(long trials, std::uint64_t seed, int n = 256, double tolerance = 1e-8) {
  if (trials < 1) throw DomainError("check_log_sobolev: trials must be >= 1");
  VerdictReport rep;
  rep.check_name = "log_sobolev";
  rep.tolerance = tolerance;
  const TorusGrid g(n);
  for (long t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const Field base = random_band_limited(g, rng, std::max(1, n / 16));
    const double c = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const Field sq = base * base;
    const Field f = ((1.0 - c) / mean(sq)) * sq + c;
    double lhs = 0.0;
    for (double v : f.values()) lhs += v * std::log(v);
    lhs *= g.dx();
    const double rhs = kTwoPi + fisher_information(f) / (2.0 * extrema(f).min);
    rep.observe(lhs, rhs, 1.0);
    ++rep.trials;
  }
  return rep;
}

/// Both pairings are nonnegative on random nonnegative fields:
/// int Lambda^alpha(f+1) log(f+1) >= -1e-8 and int f^s Lambda^alpha f >= -1e-8 (1 + |f|_inf^(1+s)).
inline VerdictReport check_entropy_pairings(long trials, double alpha, std::uint64_t seed, int n = 256,
                                            double tolerance = 1e-8) {
  if (trials < 1) throw DomainError("check_entropy_pairings: trials must be >= 1");
  VerdictReport rep;
  rep.check_name = "entropy_pairings_a" + detail::fmt17(alpha);
  rep.tolerance = tolerance;
  const TorusGrid g(n);
  for (long t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const Field f = random_nonnegative(g, rng, std::max(1, n / 16));
    const double s = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    rep.observe(-entropy_dissipation_pairing(f, alpha), 0.0, 1.0);
    const double scale = 1.0 + std::pow(lp_norm(f, kInfinity), 1.0 + s);
    rep.observe(-dissipation_pairing(f, s, alpha), 0.0, scale);
    ++rep.trials;
  }
  return rep;
}

struct RatioMaxima {
  double sobolev_pairing = 0.0;  // seminorm^(2+2s) / (|u|_{1+s}^{1+s} pairing)
  double entropy_hs = 0.0;       // |w|_{H^{alpha/2}}^2 / (|w|_inf entropy pairing)
  double entropy_w1 = 0.0;       // |w|_{W^{alpha/2-delta,1}}^2 / (|w|_1 entropy pairing)
};

/// Maxima of the three ratios over `trials` random nonnegative fields on an n grid.
inline RatioMaxima ratio_maxima(long trials, double alpha, double s, std::uint64_t seed, int n) {
  RatioMaxima m;
  const TorusGrid g(n);
  const double delta5 = kDeltaFraction * alpha / (2.0 + 2.0 * s);
  const double delta6 = kDeltaFraction * alpha / 2.0;
  for (long t = 0; t < trials; ++t) {
    auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const Field f = random_nonnegative(g, rng, 6);
    m.sobolev_pairing = std::max(m.sobolev_pairing, sobolev_pairing_ratio(f, s, alpha, delta5));
    m.entropy_hs = std::max(m.entropy_hs, entropy_hs_ratio(f, alpha));
    m.entropy_w1 = std::max(m.entropy_w1, entropy_w1_ratio(f, alpha, delta6));
  }
  return m;
}

/// The three ratio maxima are finite and change by less than a factor 2
/// between n and 2n on the same (grid-independent) random fields.
inline VerdictReport check_ratio_stability(long trials, double alpha, double s, std::uint64_t seed, int n = 128) {
  if (trials < 1) throw DomainError("check_ratio_stability: trials must be >= 1");
  VerdictReport rep;
  rep.check_name = "ratio_stability_a" + detail::fmt17(alpha);
  rep.tolerance = 0.0;
  rep.trials = trials;
  const auto coarse = ratio_maxima(trials, alpha, s, seed, n);
  const auto fine = ratio_maxima(trials, alpha, s, seed, 2 * n);
  const auto compare = [&](const char* name, double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
      rep.fail(std::string(name) + " not finite and positive");
      return;
    }
    const double factor = std::max(a / b, b / a);
    rep.observe(factor, 2.0, 2.0);
    rep.append_note(std::string(name) + " " + detail::fmt17(a) + " -> " + detail::fmt17(b));
  };
  compare("sobolev_pairing", coarse.sobolev_pairing, fine.sobolev_pairing);
  compare("entropy_hs", coarse.entropy_hs, fine.entropy_hs);
  compare("entropy_w1", coarse.entropy_w1, fine.entropy_w1);
  return rep;
}

}  // namespace fracks
