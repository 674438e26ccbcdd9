#pragma once

// Subcommands of the `fracks` tool. Each returns its process exit code and
// writes to the given streams, so tests can drive them without a process.
//
// Exit codes: 0 success / COMPLETED, 1 usage or input error, 2 BLOWUP_DETECTED,
// 3 DT_UNDERFLOW, 4 sweep gate failed.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracks/evolution.hpp"
#include "fracks/initial_conditions.hpp"
#include "fracks/io.hpp"
#include "fracks/kernel_oracle.hpp"
#include "fracks/trajectory_io.hpp"
#include "fracks/verification.hpp"

#ifndef FRACKS_VERSION
#define FRACKS_VERSION "0.0.0-dev"
#endif

namespace fracks::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitUnderflow = 3;
inline constexpr int kExitGate = 4;

inline int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Completed: return kExitOk;
    case Outcome::BlowupDetected: return kExitBlowup;
    case Outcome::DtUnderflow: return kExitUnderflow;
  }
  return kExitUsage;
}

inline std::string version_string() { return std::string("fracks ") + FRACKS_VERSION; }

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ModelParams params;
  SolverConfig config;
  std::string variant = "helmholtz";
  std::string ic;
  std::string out = "runs";
  bool no_adapt = false;
};

inline void add_simulate_options(CLI::App& sub, SimulateArgs& a) {
  sub.add_option("--alpha", a.params.alpha, "diffusion order in (0, 2]")->required();
  sub.add_option("--beta", a.params.beta, "drift kernel order > 0")->capture_default_str();
  sub.add_option("--chi", a.params.chi, "chemosensitivity >= 0")->required();
  sub.add_option("--r", a.params.r, "logistic strength >= 0")->required();
  sub.add_option("--eps", a.params.epsilon, "hyperviscosity strength >= 0")->capture_default_str();
  sub.add_option("--variant", a.variant, "helmholtz|riesz")->capture_default_str();
  sub.add_option("--n", a.config.n, "grid size (even, >= 8)")->capture_default_str();
  sub.add_option("--dt", a.config.dt_init, "initial (and largest) step")->capture_default_str();
  sub.add_option("--dt-min", a.config.dt_min, "smallest adaptive step")->capture_default_str();
  sub.add_option("--t-end", a.config.t_end, "final time")->capture_default_str();
  sub.add_option("--record-every", a.config.record_every, "steps between records")->capture_default_str();
  sub.add_option("--blowup-linf", a.config.blowup_linf, "hard cap on sup norm")->capture_default_str();
  sub.add_option("--blowup-tail", a.config.blowup_tail, "spectral tail cap")->capture_default_str();
  sub.add_option("--mollify", a.config.mollify_ic_eps, "heat-kernel smoothing of the data")->capture_default_str();
  sub.add_flag("--no-adapt", a.no_adapt, "fixed step size");
  sub.add_option("--ic", a.ic, "cosine:<a> | bump:<a> | expcos")->required();
  sub.add_option("--out", a.out, "base directory for run output")->capture_default_str();
}

inline int cmd_simulate(SimulateArgs a, std::ostream& out, std::ostream& err) {
  try {
    a.params.variant = parse_drift_variant(a.variant);
    a.config.adapt = !a.no_adapt;
    a.params.validate();
    a.config.validate();
    const Field u0 = make_initial_condition(a.ic, TorusGrid(a.config.n));
    const Trajectory traj = run(u0, a.params, a.config);
    const auto dir = write_trajectory(traj, u0, a.out);
    out << "outcome " << to_string(traj.outcome) << " t=" << detail::fmt17(traj.records.back().t)
        << " steps=" << traj.steps << '\n';
    if (!traj.reason.empty()) out << "reason " << traj.reason << '\n';
    out << "output " << dir.string() << '\n';
    return exit_code(traj.outcome);
  } catch (const DomainError& e) {
    err << "simulate: " << e.what() << '\n';
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite = "all";
  long trials = 100;
  std::uint64_t seed = 7;
  int n = 256;
  std::string out;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"elliptic",   "identity", "lowerbound", "entropy",
                                              "logsobolev", "norms",    "all"};
  return names;
}

/// Reports of one named suite.
inline std::vector<VerdictReport> run_suite(const std::string& suite, const VerifyArgs& a) {
  std::vector<VerdictReport> reps;
  const bool all = suite == "all";
  if (all || suite == "elliptic") {
    reps.push_back(check_elliptic_suite(a.trials, 2.0, DriftVariant::Helmholtz, a.seed, a.n));
    reps.push_back(check_elliptic_suite(a.trials, 2.0, DriftVariant::Riesz, a.seed, a.n));
  }
  if (all || suite == "identity") {
    for (double alpha : {0.5, 1.0}) reps.push_back(check_pointwise_identity(a.trials, alpha, a.seed));
  }
  if (all || suite == "lowerbound") {
    const TorusGrid g(a.n);
    reps.push_back(check_fractional_lower_bound(lower_bound_bump(g, 16), 1.0, 1.0));
    reps.push_back(check_fractional_lower_bound(Field::constant(g, 1.0), 1.0, 1.0));
    for (double alpha : {0.5, 1.0}) reps.push_back(check_lower_bound_scaling(alpha));
  }
  if (all || suite == "entropy") {
    for (double alpha : {0.5, 1.0, 1.5}) reps.push_back(check_entropy_pairings(a.trials, alpha, a.seed, a.n));
    reps.push_back(check_ratio_stability(a.trials, 1.0, 0.5, a.seed));
  }
  if (all || suite == "logsobolev") reps.push_back(check_log_sobolev(a.trials, a.seed, a.n));
  if (all || suite == "norms") {
    const TorusGrid g(a.n);
    SolverConfig c;
    c.n = a.n;
    c.record_every = 50;
    ModelParams p;
    p.alpha = 1.2;
    p.chi = 1.0;
    p.r = 0.6;
    c.t_end = 10.0;
    const auto traj = run(cosine_ic(g, 1.0).map([](double v) { return 3.0 * v; }), p, c);
    if (traj.outcome == Outcome::Completed) {
      reps.push_back(check_norm_evolution(traj));
    } else {
      VerdictReport r;
      r.check_name = "norm_evolution";
      r.fail("run ended " + std::string(to_string(traj.outcome)));
      reps.push_back(r);
    }
    p.alpha = 1.5;
    p.r = 0.5;
    c.t_end = 50.0;
    const auto long_run = run(cosine_ic(g, 1.0).map([](double v) { return 2.0 * v; }), p, c);
    reps.push_back(check_largetime_bound(long_run, p));
  }
  return reps;
}

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (a.trials < 1) {
    err << "verify: --trials must be >= 1\n";
    return kExitUsage;
  }
  if (std::find(suite_names().begin(), suite_names().end(), a.suite) == suite_names().end()) {
    err << "verify: unknown --suite '" << a.suite << "'\n";
    return kExitUsage;
  }
  std::vector<VerdictReport> reps;
  try {
    reps = run_suite(a.suite, a);
  } catch (const DomainError& e) {
    err << "verify: " << e.what() << '\n';
    return kExitUsage;
  }
  print_table(out, reps);
  const bool ok = suite_passed(reps);
  if (!a.out.empty()) {
    nlohmann::json j;
    j["suite"] = a.suite;
    j["seed"] = a.seed;
    j["trials"] = a.trials;
    j["n"] = a.n;
    j["pass"] = ok;
    j["reports"] = reps;
    std::ofstream os(a.out);
    if (!os) {
      err << "verify: cannot write --out " << a.out << '\n';
      return kExitUsage;
    }
    os << j.dump(2) << '\n';
  }
  out << (ok ? "verify: PASS" : "verify: FAIL") << '\n';
  return ok ? kExitOk : 1;
}

// ---------------------------------------------------------------------------
// oracle-compare

struct OracleCompareArgs {
  double alpha = 1.0;
  int n = 256;
  int cutoff = 200;
  int refine = 4;
  std::string ic = "expcos";
};

struct OracleComparison {
  double max_abs = 0.0;       // max |spectral - oracle|
  double max_rel = 0.0;       // max_abs / max |oracle|
  double max_excess = 0.0;    // max (|spectral - oracle| - oracle tolerance)^+ / max |oracle|
  double max_oracle_tol = 0.0;
};

inline OracleComparison compare_with_oracle(const Field& f, double alpha, const QuadratureSpec& q) {
  const Field spectral = fractional_laplacian(f, alpha);
  const auto oracle = lambda_alpha_field(f, alpha, q);
  OracleComparison c;
  double scale = 0.0, excess = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const auto i = static_cast<std::size_t>(j);
    const double d = std::abs(spectral[i] - oracle[i].value);
    c.max_abs = std::max(c.max_abs, d);
    excess = std::max(excess, d - oracle[i].tolerance);
    c.max_oracle_tol = std::max(c.max_oracle_tol, oracle[i].tolerance);
    scale = std::max(scale, std::abs(oracle[i].value));
  }
  if (scale == 0.0) scale = 1.0;
  c.max_rel = c.max_abs / scale;
  c.max_excess = std::max(excess, 0.0) / scale;
  return c;
}

inline int cmd_oracle_compare(const OracleCompareArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.alpha > 0.0 && a.alpha < 2.0)) {
    err << "oracle-compare: --alpha must lie in (0, 2)\n";
    return kExitUsage;
  }
  try {
    QuadratureSpec q;
    q.image_cutoff = a.cutoff;
    q.refinement = a.refine;
    q.validate();
    const Field f = make_initial_condition(a.ic, TorusGrid(a.n));
    const auto c = compare_with_oracle(f, a.alpha, q);
    out << "max_abs_deviation " << detail::fmt17(c.max_abs) << '\n'
        << "max_rel_deviation " << detail::fmt17(c.max_rel) << '\n'
        << "oracle_self_tolerance " << detail::fmt17(c.max_oracle_tol) << '\n'
        << "rel_deviation_beyond_self_tolerance " << detail::fmt17(c.max_excess) << '\n';
    const bool ok = c.max_excess <= 1e-3;
    out << (ok ? "oracle-compare: PASS" : "oracle-compare: FAIL") << '\n';
    return ok ? kExitOk : 1;
  } catch (const DomainError& e) {
    err << "oracle-compare: " << e.what() << '\n';
    return kExitUsage;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepSpec {
  std::vector<double> alpha_grid, chi_grid, r_grid;
  std::string ic = "bump:5";
  double beta = 2.0;
  double epsilon = 0.0;
  DriftVariant variant = DriftVariant::Helmholtz;
  SolverConfig config;
  int parallelism = 1;
  std::string out = "sweep";
};

struct RegimeRow {
  double alpha = 0, chi = 0, r = 0;
  Outcome outcome = Outcome::Completed;
  double t_final = 0, sup_linf = 0;
  double alpha_star_strong = 0, alpha_star_weak = 0;
  bool gated = false;  // the cell is asserted to complete
};

inline constexpr double kGateMargin = 0.05;
inline constexpr double kGateFloor = 0.3;

inline bool gate_applies(const ModelParams& p) {
  return p.alpha > p.alpha_star_strong() + kGateMargin && p.alpha >= kGateFloor;
}

/// Parse a sweep config; errors name the offending field.
inline SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  SweepSpec s;
  const auto grid = [&](const char* key, std::vector<double>& dst) {
    if (!j.contains(key)) throw ParseError(std::string("sweep config: missing field '") + key + "'");
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.empty())
      throw ParseError(std::string("sweep config: field '") + key + "' must be a nonempty array");
    for (const auto& v : arr) {
      if (!v.is_number()) throw ParseError(std::string("sweep config: field '") + key + "' has a non-number");
      dst.push_back(v.get<double>());
    }
  };
  grid("alpha_grid", s.alpha_grid);
  grid("chi_grid", s.chi_grid);
  grid("r_grid", s.r_grid);
  for (double a : s.alpha_grid)
    if (!(a > 0.0 && a <= 2.0)) throw ParseError("sweep config: field 'alpha_grid' entries must lie in (0, 2]");
  for (double c : s.chi_grid)
    if (!(c > 0.0)) throw ParseError("sweep config: field 'chi_grid' entries must be > 0");
  for (double r : s.r_grid)
    if (!(r >= 0.0)) throw ParseError("sweep config: field 'r_grid' entries must be >= 0");
  try {
    s.ic = j.value("ic", s.ic);
    s.beta = j.value("beta", s.beta);
    s.epsilon = j.value("epsilon", s.epsilon);
    s.variant = parse_drift_variant(j.value("variant", std::string("helmholtz")));
    if (j.contains("solver")) s.config = j.at("solver").get<SolverConfig>();
    s.parallelism = j.value("parallelism", 1);
    s.out = j.value("out", s.out);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sweep config: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("sweep config: field 'variant': ") + e.what());
  }
  if (s.parallelism < 1) throw ParseError("sweep config: field 'parallelism' must be >= 1");
  try {
    s.config.validate();
    make_initial_condition(s.ic, TorusGrid(s.config.n));
  } catch (const DomainError& e) {
    throw ParseError(std::string("sweep config: ") + e.what());
  }
  return s;
}

/// FRACKS_THREADS, when set to a positive integer, overrides the configured parallelism.
inline int effective_parallelism(int configured) {
  if (const char* env = std::getenv("FRACKS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return configured;
}

/// Run every cell, `parallelism` at a time, and return rows sorted by (alpha, chi, r).
/// When `run_dir` is nonempty each cell's trajectory is written below it.
inline std::vector<RegimeRow> run_sweep(const SweepSpec& spec, int parallelism,
                                        const std::filesystem::path& run_dir = {}) {
  std::vector<ModelParams> cells;
  for (double a : spec.alpha_grid)
    for (double c : spec.chi_grid)
      for (double r : spec.r_grid) {
        ModelParams p;
        p.alpha = a;
        p.chi = c;
        p.r = r;
        p.beta = spec.beta;
        p.epsilon = spec.epsilon;
        p.variant = spec.variant;
        p.validate();
        cells.push_back(p);
      }
  const Field u0 = make_initial_condition(spec.ic, TorusGrid(spec.config.n));
  std::vector<RegimeRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const ModelParams& p = cells[i];
      const Trajectory traj = run(u0, p, spec.config);
      RegimeRow row;
      row.alpha = p.alpha;
      row.chi = p.chi;
      row.r = p.r;
      row.outcome = traj.outcome;
      row.t_final = traj.records.back().t;
      for (const auto& rec : traj.records) row.sup_linf = std::max(row.sup_linf, rec.linf);
      row.alpha_star_strong = p.alpha_star_strong();
      row.alpha_star_weak = p.alpha_star_weak();
      row.gated = gate_applies(p);
      rows[i] = row;
      if (!run_dir.empty()) {
        std::lock_guard lock(io_mutex);
        write_trajectory(traj, u0, run_dir);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::sort(rows.begin(), rows.end(), [](const RegimeRow& x, const RegimeRow& y) {
    return std::tie(x.alpha, x.chi, x.r) < std::tie(y.alpha, y.chi, y.r);
  });
  return rows;
}

inline void write_regime_map(std::ostream& os, const std::vector<RegimeRow>& rows) {
  using detail::fmt17;
  os << "alpha,chi,r,outcome,t_final,sup_linf,alpha_star_strong,alpha_star_weak,gated\n";
  for (const auto& r : rows)
    os << fmt17(r.alpha) << ',' << fmt17(r.chi) << ',' << fmt17(r.r) << ',' << to_string(r.outcome) << ','
       << fmt17(r.t_final) << ',' << fmt17(r.sup_linf) << ',' << fmt17(r.alpha_star_strong) << ','
       << fmt17(r.alpha_star_weak) << ',' << (r.gated ? 1 : 0) << '\n';
}

/// Rows whose gate applies but did not complete.
inline std::vector<RegimeRow> gate_failures(const std::vector<RegimeRow>& rows) {
  std::vector<RegimeRow> bad;
  for (const auto& r : rows)
    if (r.gated && r.outcome != Outcome::Completed) bad.push_back(r);
  return bad;
}

struct SweepArgs {
  std::string config;
  std::string out;      // overrides the config's "out"
  int parallelism = 0;  // overrides the config's "parallelism" when > 0
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  try {
    std::ifstream is(a.config);
    if (!is) throw ParseError("sweep: cannot open config '" + a.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("sweep config: ") + e.what());
    }
    spec = parse_sweep_spec(j);
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  if (!a.out.empty()) spec.out = a.out;
  const int par = effective_parallelism(a.parallelism > 0 ? a.parallelism : spec.parallelism);
  const std::filesystem::path base(spec.out);
  std::filesystem::create_directories(base);
  const auto rows = run_sweep(spec, par, base / "runs");
  {
    std::ofstream os(base / "regime_map.csv");
    write_regime_map(os, rows);
  }
  write_regime_map(out, rows);
  const auto bad = gate_failures(rows);
  for (const auto& r : bad)
    err << "gate: alpha=" << detail::fmt17(r.alpha) << " chi=" << detail::fmt17(r.chi) << " r=" << detail::fmt17(r.r)
        << " ended " << to_string(r.outcome) << '\n';
  out << "regime map " << (base / "regime_map.csv").string() << '\n';
  return bad.empty() ? kExitOk : kExitGate;
}

// ---------------------------------------------------------------------------
// entry point

/// Parse `args` (without the program name) and dispatch.
inline int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional drift-diffusion simulator and inequality checks", "fracks"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "print the build identifier");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "integrate one model instance");
  add_simulate_options(*simulate, sim);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "run inequality suites");
  verify->add_option("--suite", ver.suite, "elliptic|identity|lowerbound|entropy|logsobolev|norms|all")
      ->capture_default_str();
  verify->add_option("--trials", ver.trials, "random fields per check")->capture_default_str();
  verify->add_option("--seed", ver.seed, "base seed")->capture_default_str();
  verify->add_option("--n", ver.n, "grid size")->capture_default_str();
  verify->add_option("--out", ver.out, "JSON summary path");

  OracleCompareArgs orc;
  auto* oracle = app.add_subcommand("oracle-compare", "spectral vs kernel quadrature Lambda^alpha");
  oracle->add_option("--alpha", orc.alpha, "order in (0, 2)")->required();
  oracle->add_option("--n", orc.n, "grid size")->capture_default_str();
  oracle->add_option("--cutoff", orc.cutoff, "explicit image cutoff")->capture_default_str();
  oracle->add_option("--refine", orc.refine, "quadrature refinement factor")->capture_default_str();
  oracle->add_option("--ic", orc.ic, "test function family")->capture_default_str();

  SweepArgs swp;
  auto* sweep = app.add_subcommand("sweep", "regime map over (alpha, chi, r)");
  sweep->add_option("--config", swp.config, "JSON sweep config")->required();
  sweep->add_option("--out", swp.out, "output directory (overrides config)");
  sweep->add_option("--parallelism", swp.parallelism, "concurrent cells (overrides config)");

  std::vector<std::string> argv_store{"fracks"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  if (show_version) {
    out << version_string() << '\n';
    return kExitOk;
  }
  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (verify->parsed()) return cmd_verify(ver, out, err);
    if (oracle->parsed()) return cmd_oracle_compare(orc, out, err);
    if (sweep->parsed()) return cmd_sweep(swp, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  out << app.help();
  return kExitUsage;
}

}  // namespace fracks::cli
