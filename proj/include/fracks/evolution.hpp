#pragma once

// First-order IMEX integration of
//
//   u_t = -Lambda^alpha u - eps Lambda^1.75 u + chi (u B(u))_x + r u (1 - u)
//
// The diffusion is implicit (a diagonal multiplier), the transport and the
// logistic reaction are explicit:
//
//   c_k(new) = ( c_k + dt * rhs_k ) / ( 1 + dt (|k|^alpha + eps |k|^1.75) ).
//
// Quadratic products are formed from 2/3-truncated factors, so energy in
// |k| > n/3 is exactly what the next product discards; the spectral tail of
// the state measures it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracks/diagnostics.hpp"
#include "fracks/model.hpp"
#include "fracks/spectral_ops.hpp"
#include "fracks/torus_field.hpp"

namespace fracks {

struct SolverConfig {
  int n = 256;
  double dt_init = 1e-3;
  double t_end = 1.0;
  bool adapt = true;
  double dt_min = 1e-9;
  int record_every = 100;
  double blowup_linf = 1e6;
  double blowup_tail = 0.1;
  double mollify_ic_eps = 0.0;

  void validate() const {
    TorusGrid{n};
    if (!(dt_init > 0.0)) throw DomainError("dt_init must be > 0");
    if (!(t_end > 0.0)) throw DomainError("t_end must be > 0");
    if (!(dt_min > 0.0)) throw DomainError("dt_min must be > 0");
    if (!(dt_min <= dt_init)) throw DomainError("dt_min must not exceed dt_init");
    if (record_every < 1) throw DomainError("record_every must be >= 1");
    if (!(blowup_linf > 0.0)) throw DomainError("blowup_linf must be > 0");
    if (!(blowup_tail > 0.0)) throw DomainError("blowup_tail must be > 0");
    if (!(mollify_ic_eps >= 0.0)) throw DomainError("mollify_ic_eps must be >= 0");
  }
};

enum class Outcome { Completed, BlowupDetected, DtUnderflow };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "COMPLETED";
    case Outcome::BlowupDetected: return "BLOWUP_DETECTED";
    case Outcome::DtUnderflow: return "DT_UNDERFLOW";
  }
  return "?";
}

struct Trajectory {
  ModelParams params;
  SolverConfig config;
  std::vector<DiagnosticsRecord> records;
  Outcome outcome = Outcome::Completed;
  std::string reason;  // what ended the run early, empty when completed
  Field final_field;   // last finite state
  long steps = 0;
  long rejected = 0;
  // Finite states at a thinned subset of record times (at most
  // 2 * kMaxSnapshots), for functionals too costly to record every time.
  std::vector<std::pair<double, Field>> snapshots;
};

inline constexpr std::size_t kMaxSnapshots = 64;

namespace detail {

/// Implicit damping |k|^alpha + eps |k|^1.75 at wavenumber k.
inline double damping(int k, const ModelParams& p) {
  double d = symbols::fractional(k, p.alpha);
  if (p.epsilon > 0.0) d += p.epsilon * symbols::fractional(k, ModelParams::kRegularizationOrder);
  return d;
}

/// Half spectrum of the explicit right-hand side given u's samples and half spectrum.
inline std::vector<Complex> explicit_rhs_half(const Field& u, const std::vector<Complex>& u_half,
                                              const ModelParams& p) {
  const TorusGrid& g = u.grid();
  const int n = g.n();
  const std::size_t nh = u_half.size();
  std::vector<double> reaction(static_cast<std::size_t>(n));
  auto uv = u.values();
  for (std::size_t j = 0; j < reaction.size(); ++j) reaction[j] = p.r * uv[j] * (1.0 - uv[j]);
  std::vector<Complex> rhs = half_spectrum(Field(g, std::move(reaction)));
  if (p.chi == 0.0) return rhs;

  std::vector<Complex> ut(nh), bt(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    const int kk = static_cast<int>(k);
    if (!retained_by_dealias(kk, n)) continue;
    ut[k] = u_half[k];
    if (kk != 0 && kk != n / 2)
      bt[k] = u_half[k] * Complex(0.0, -symbols::drift(kk, p.beta, p.variant));
  }
  const Field u_trunc = from_half_spectrum(g, std::move(ut));
  const Field b_trunc = from_half_spectrum(g, std::move(bt));
  const auto flux = half_spectrum(u_trunc * b_trunc);
  for (std::size_t k = 1; k + 1 < nh; ++k)
    rhs[k] += p.chi * Complex(0.0, static_cast<double>(k)) * flux[k];
  return rhs;
}

}  // namespace detail

/// chi (u B(u))_x + r u (1 - u), with the product formed from dealiased factors.
inline Field rhs_explicit(const Field& u, const ModelParams& p) {
  u.require_finite();
  return detail::from_half_spectrum(u.grid(), detail::explicit_rhs_half(u, detail::half_spectrum(u), p));
}

/// One IMEX step. A non-finite result is returned as is; callers treat it as blow-up.
inline Field step_imex(const Field& u, double dt, const ModelParams& p) {
  if (!(dt > 0.0)) throw DomainError("step_imex: dt must be > 0");
  u.require_finite();
  auto half = detail::half_spectrum(u);
  const auto rhs = detail::explicit_rhs_half(u, half, p);
  for (std::size_t k = 0; k < half.size(); ++k)
    half[k] = (half[k] + dt * rhs[k]) / (1.0 + dt * detail::damping(static_cast<int>(k), p));
  return detail::from_half_spectrum(u.grid(), std::move(half));
}

/// Blow-up proxy: non-finite samples, ||u||_inf above the hard cap, or a
/// spectral tail above the cap in this and the previous record.
inline bool detect_blowup(const Field& u, const DiagnosticsRecord& rec, const SolverConfig& cfg,
                          const DiagnosticsRecord* previous = nullptr) {
  if (!u.finite() || rec.blowup) return true;
  if (lp_norm(u, kInfinity) > cfg.blowup_linf) return true;
  return previous != nullptr && rec.spectral_tail > cfg.blowup_tail &&
         previous->spectral_tail > cfg.blowup_tail;
}

namespace detail {

/// Largest step for which explicit transport at k = n/3 stays inside the
/// implicit damping, and explicit reaction stays well resolved.
inline double stable_step(const Field& u, const ModelParams& p) {
  const int n = u.grid().n();
  const int kmax = n / 3;
  double cap = std::numeric_limits<double>::infinity();
  const double umax = lp_norm(u, kInfinity);
  if (p.chi > 0.0) {
    const Field b = drift(u, p.beta, p.variant);
    const double speed = p.chi * lp_norm(b, kInfinity);
    if (speed > 0.0) cap = damping(kmax, p) / (speed * speed * kmax * kmax);
  }
  const double rate = p.r * (2.0 * umax + 1.0) + p.chi * umax;
  if (rate > 0.0) cap = std::min(cap, 0.5 / rate);
  return cap;
}

inline double pow_sum(const Field& u, double p) {
  double sum = 0.0;
  for (double v : u.values()) sum += std::pow(std::abs(v), p);
  return sum * u.grid().dx();
}

}  // namespace detail

/// Length of the post-underflow probe, in record intervals.
inline constexpr int kProbeRecords = 100;

/// Integrate from u0 up to cfg.t_end or until a blow-up proxy fires or the
/// step size underflows.
///
/// Adaptive mode halves dt when a step more than doubles ||u||_inf or
/// undershoots below -1e-8 ||u||_inf, grows it by 1.2 after 10 accepted steps
/// (never beyond dt_init), and keeps it under detail::stable_step.
///
/// A growth rejection at dt_min is BLOWUP_DETECTED. An undershoot that
/// survives dt_min is a spatial resolution failure, not a step size one: the
/// run keeps going with the positivity guard off for kProbeRecords record
/// intervals so the detector can see a collapse, then stops with DT_UNDERFLOW
/// (before t_end, so a completed run never holds a negative state).
inline Trajectory run(const Field& u0, const ModelParams& p, const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  u0.require_finite();
  if (u0.size() != cfg.n) throw DomainError("run: initial field has n != config n");
  const Extrema e0 = extrema(u0);
  if (e0.min < -1e-10)
    throw DomainError("run: initial data must be nonnegative, min = " + std::to_string(e0.min));

  Field u = cfg.mollify_ic_eps > 0.0 ? mollify(u0, cfg.mollify_ic_eps) : u0;
  Trajectory traj{p, cfg, {}, Outcome::Completed, {}, u, 0, 0, {}};
  long snapshot_stride = 1, record_count = 0;
  const auto snapshot = [&](double time) {
    if (record_count++ % snapshot_stride != 0) return;
    traj.snapshots.emplace_back(time, u);
    if (traj.snapshots.size() >= 2 * kMaxSnapshots) {
      std::vector<std::pair<double, Field>> kept;
      for (std::size_t i = 0; i < traj.snapshots.size(); i += 2) kept.push_back(traj.snapshots[i]);
      traj.snapshots = std::move(kept);
      snapshot_stride *= 2;
    }
  };
  const double s = p.s_exponent().value_or(1.0);

  double t = 0.0;
  double dt = cfg.dt_init;
  double int_l2 = 0.0, int_l2s = 0.0;
  int streak = 0;
  traj.records.push_back(collect(u, t, p));
  snapshot(t);
  const double t_eps = 1e-12 * cfg.t_end;

  const auto finish = [&](Outcome o, std::string why) {
    traj.outcome = o;
    traj.reason = std::move(why);
  };
  // Steps left in the post-underflow probe, and why it started.
  long probe_left = -1;
  std::string probe_reason;
  const auto record = [&](double time) {
    DiagnosticsRecord rec = collect(u, time, p);
    rec.int_l2_sq = int_l2;
    rec.int_l2s_pow = int_l2s;
    return rec;
  };

  while (t < cfg.t_end - t_eps) {
    double h = std::min(dt, cfg.t_end - t);
    if (cfg.adapt) h = std::min(h, std::max(detail::stable_step(u, p), cfg.dt_min));
    if (probe_left >= 0 && (probe_left == 0 || t + h >= cfg.t_end - t_eps)) {
      if (traj.records.back().t < t) traj.records.push_back(record(t));
      finish(Outcome::DtUnderflow, probe_reason);
      break;
    }
    Field next = step_imex(u, h, p);
    const double linf_old = lp_norm(u, kInfinity);

    std::optional<std::string> reject;
    bool growth_guard = false;
    if (!next.finite()) {
      reject = "non-finite state";
      growth_guard = true;
    } else if (cfg.adapt) {
      const Extrema e = extrema(next);
      const double linf_new = std::max(std::abs(e.min), std::abs(e.max));
      if (linf_new > 2.0 * linf_old && linf_new > 1e-12) {
        reject = "sup norm more than doubled in one step";
        growth_guard = true;
      } else if (probe_left < 0 && e.min < -1e-8 * linf_new) {
        reject = "negative undershoot " + detail::fmt17(e.min);
      }
    }

    if (reject) {
      ++traj.rejected;
      if (!cfg.adapt) {
        traj.records.push_back(collect(next, t + h, p));
        finish(Outcome::BlowupDetected, *reject);
        break;
      }
      if (h / 2.0 < cfg.dt_min) {
        if (growth_guard) {
          finish(Outcome::BlowupDetected, *reject + " at dt_min");
          break;
        }
        probe_left = static_cast<long>(kProbeRecords) * cfg.record_every;
        probe_reason = *reject + " at dt_min";
        dt = cfg.dt_init;
        streak = 0;
        continue;
      }
      dt = h / 2.0;
      streak = 0;
      continue;
    }

    // Left-endpoint sums, matching the explicit treatment of the reaction.
    int_l2 += h * detail::pow_sum(u, 2.0);
    int_l2s += h * detail::pow_sum(u, 2.0 + s);
    u = std::move(next);
    t += h;
    ++traj.steps;
    if (probe_left > 0) --probe_left;
    if (cfg.adapt && ++streak >= 10) {
      dt = std::min(dt * 1.2, cfg.dt_init);
      streak = 0;
    }

    const bool done = t >= cfg.t_end - t_eps;
    const bool hard_cap = lp_norm(u, kInfinity) > cfg.blowup_linf;
    if (done || hard_cap || traj.steps % cfg.record_every == 0) {
      DiagnosticsRecord rec = record(t);
      const DiagnosticsRecord* prev = &traj.records.back();
      const bool fired = detect_blowup(u, rec, cfg, prev);
      rec.blowup = fired;
      traj.records.push_back(rec);
      if (u.finite()) snapshot(t);
      if (fired) {
        finish(Outcome::BlowupDetected,
               hard_cap ? "sup norm above blowup_linf" : "spectral tail above blowup_tail");
        break;
      }
    }
    traj.final_field = u;
  }
  if (traj.outcome == Outcome::Completed) traj.final_field = u;
  return traj;
}

inline void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"alpha", p.alpha}, {"beta", p.beta},       {"chi", p.chi},
                     {"r", p.r},         {"epsilon", p.epsilon}, {"variant", std::string(to_string(p.variant))}};
}

inline void from_json(const nlohmann::json& j, ModelParams& p) {
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.value("beta", 2.0);
  p.chi = j.at("chi").get<double>();
  p.r = j.at("r").get<double>();
  p.epsilon = j.value("epsilon", 0.0);
  p.variant = parse_drift_variant(j.value("variant", std::string("helmholtz")));
}

inline void to_json(nlohmann::json& j, const SolverConfig& c) {
  j = nlohmann::json{{"n", c.n},
                     {"dt_init", c.dt_init},
                     {"t_end", c.t_end},
                     {"adapt", c.adapt},
                     {"dt_min", c.dt_min},
                     {"record_every", c.record_every},
                     {"blowup_linf", c.blowup_linf},
                     {"blowup_tail", c.blowup_tail},
                     {"mollify_ic_eps", c.mollify_ic_eps}};
}

inline void from_json(const nlohmann::json& j, SolverConfig& c) {
  const SolverConfig d;
  c.n = j.value("n", d.n);
  c.dt_init = j.value("dt_init", d.dt_init);
  c.t_end = j.value("t_end", d.t_end);
  c.adapt = j.value("adapt", d.adapt);
  c.dt_min = j.value("dt_min", d.dt_min);
  c.record_every = j.value("record_every", d.record_every);
  c.blowup_linf = j.value("blowup_linf", d.blowup_linf);
  c.blowup_tail = j.value("blowup_tail", d.blowup_tail);
  c.mollify_ic_eps = j.value("mollify_ic_eps", d.mollify_ic_eps);
}

}  // namespace fracks
