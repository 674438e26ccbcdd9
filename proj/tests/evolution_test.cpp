#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fracks/evolution.hpp"
#include "fracks/initial_conditions.hpp"
#include "fracks/trajectory_io.hpp"

using namespace fracks;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (int j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

ModelParams params(double alpha, double chi, double r) {
  ModelParams p;
  p.alpha = alpha;
  p.chi = chi;
  p.r = r;
  return p;
}

double logistic(double c, double r, double t) {
  const double e = std::exp(r * t);
  return c * e / (1.0 - c + c * e);
}

}  // namespace

TEST(ModelParams, ValidationAndThresholds) {
  EXPECT_THROW(params(0.0, 1, 1).validate(), DomainError);
  EXPECT_THROW(params(2.1, 1, 1).validate(), DomainError);
  EXPECT_THROW(params(1, -1, 1).validate(), DomainError);
  EXPECT_THROW(params(1, 1, -0.1).validate(), DomainError);
  EXPECT_NO_THROW(params(2.0, 0, 0).validate());

  EXPECT_DOUBLE_EQ(params(1, 1, 0.5).alpha_star_strong(), 0.5);
  EXPECT_DOUBLE_EQ(params(1, 1, 2.0).alpha_star_strong(), 0.0);
  EXPECT_DOUBLE_EQ(params(1, 1, 0.25).alpha_star_weak(), 1.0 - 0.25 / 0.75);
  EXPECT_DOUBLE_EQ(params(1, 1, 0.6).alpha_star_weak(), 0.0);
  EXPECT_FALSE(params(1, 1, 0).s_exponent().has_value());
  EXPECT_FALSE(params(1, 1, 1).s_exponent().has_value());
  EXPECT_DOUBLE_EQ(*params(1, 1, 0.25).s_exponent(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*params(1, 1, 0.75).s_exponent(), 1.0);
}

TEST(RhsExplicit, ConstantsFeelOnlyReaction) {
  const TorusGrid g(32);
  for (double c : {0.3, 1.0, 2.5}) {
    const Field rhs = rhs_explicit(Field::constant(g, c), params(0.7, 3.0, 0.8));
    for (double v : rhs.values()) EXPECT_NEAR(v, 0.8 * c * (1 - c), 1e-13);
  }
}

TEST(RhsExplicit, PureReactionIsPointwise) {
  const TorusGrid g(64);
  const Field u = Field::sample(g, [](double x) { return 1 + 0.5 * std::cos(x); });
  const Field expect = Field::sample(g, [](double x) { return (1 + 0.5 * std::cos(x)) * (-0.5 * std::cos(x)); });
  EXPECT_LE(max_abs_diff(rhs_explicit(u, params(1, 0, 1)), expect), 1e-13);
}

TEST(RhsExplicit, TransportConservesMass) {
  const TorusGrid g(128);
  const Field u = Field::sample(g, [](double x) { return std::exp(2 * std::cos(x)) + 0.2 * std::sin(3 * x); });
  EXPECT_NEAR(mean(rhs_explicit(u, params(0.8, 5.0, 0))), 0.0, 1e-12);
}

TEST(RhsExplicit, AggregatesTowardsPeak) {
  // For the Helmholtz drift with beta = 2, mass flows toward the maximum of u.
  const TorusGrid g(64);
  const Field u = Field::sample(g, [](double x) { return 1 + 0.5 * std::cos(x); });
  const Field rhs = rhs_explicit(u, params(1, 1, 0));
  EXPECT_GT(rhs[32], 0.0);  // x = 0, the peak
  EXPECT_LT(rhs[0], 0.0);   // x = -pi, the trough
}

TEST(StepImex, LinearModeDecayFactor) {
  const TorusGrid g(64);
  for (double alpha : {0.5, 1.0, 1.7})
    for (int k : {1, 4}) {
      const double dt = 0.01;
      const Field u = Field::sample(g, [k](double x) { return std::cos(k * x); });
      const Field next = step_imex(u, dt, params(alpha, 0, 0));
      const double factor = 1.0 / (1.0 + dt * std::pow(k, alpha));
      EXPECT_LE(max_abs_diff(next, factor * u), 1e-14);
    }
}

TEST(StepImex, ConvergesToExponentialAsDtShrinks) {
  const TorusGrid g(32);
  const Field u = Field::sample(g, [](double x) { return std::cos(3 * x); });
  const double t = 0.1, rate = std::pow(3.0, 1.2);
  double previous = INFINITY;
  for (int steps : {10, 100, 1000}) {
    Field v = u;
    for (int i = 0; i < steps; ++i) v = step_imex(v, t / steps, params(1.2, 0, 0));
    const double err = max_abs_diff(v, std::exp(-rate * t) * u);
    EXPECT_LT(err, previous / 5.0);
    previous = err;
  }
}

TEST(StepImex, CarryingCapacityIsFixed) {
  const TorusGrid g(64);
  const Field one = Field::constant(g, 1.0);
  for (double dt : {1e-4, 0.1, 10.0}) {
    const Field next = step_imex(one, dt, params(0.6, 2.0, 3.0));
    EXPECT_LE(max_abs_diff(next, one), 1e-14);
  }
}

TEST(StepImex, RejectsNonpositiveStep) {
  const Field one = Field::constant(TorusGrid(16), 1.0);
  EXPECT_THROW(step_imex(one, 0.0, params(1, 1, 1)), DomainError);
  EXPECT_THROW(step_imex(one, -1e-3, params(1, 1, 1)), DomainError);
}

TEST(StepImex, MassChangeIsExactlyTheReactionIntegral) {
  const TorusGrid g(128);
  const Field u = make_initial_condition("bump:2", g);
  const ModelParams p = params(0.9, 1.5, 0.7);
  const double dt = 1e-3;
  const Field next = step_imex(u, dt, p);
  const double reaction = integral(u.map([&](double v) { return p.r * v * (1 - v); }));
  EXPECT_NEAR(integral(next) - integral(u), dt * reaction, 1e-12 * integral(u));
}

TEST(DetectBlowup, Examples) {
  const TorusGrid g(32);
  SolverConfig cfg;
  const Field one = Field::constant(g, 1.0);
  EXPECT_FALSE(detect_blowup(one, collect(one, 0, ModelParams{}), cfg));

  std::vector<double> v(32, 1.0);
  v[4] = INFINITY;
  const Field bad(g, v);
  EXPECT_TRUE(detect_blowup(bad, collect(bad, 0, ModelParams{}), cfg));

  cfg.blowup_linf = 10.0;
  const Field big = Field::constant(g, 11.0);
  EXPECT_TRUE(detect_blowup(big, collect(big, 0, ModelParams{}), cfg));
}

TEST(DetectBlowup, TailMustPersistForTwoRecords) {
  const TorusGrid g(32);
  SolverConfig cfg;
  const Field rough = Field::sample(g, [](double x) { return 2 + std::cos(15 * x); });
  const auto rec = collect(rough, 0, ModelParams{});
  ASSERT_GT(rec.spectral_tail, cfg.blowup_tail);
  EXPECT_FALSE(detect_blowup(rough, rec, cfg));
  const auto calm = collect(Field::constant(g, 1.0), 0, ModelParams{});
  EXPECT_FALSE(detect_blowup(rough, rec, cfg, &calm));
  EXPECT_TRUE(detect_blowup(rough, rec, cfg, &rec));
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n = 7;
  EXPECT_THROW(c.validate(), DomainError);
  c = SolverConfig{};
  c.dt_init = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = SolverConfig{};
  c.t_end = -1;
  EXPECT_THROW(c.validate(), DomainError);
  c = SolverConfig{};
  c.record_every = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Run, RejectsBadInitialData) {
  SolverConfig cfg;
  cfg.n = 32;
  std::vector<double> v(32, 1.0);
  v[0] = -1e-6;
  EXPECT_THROW(run(Field(TorusGrid(32), v), params(1, 1, 1), cfg), DomainError);
  EXPECT_THROW(run(Field::constant(TorusGrid(64), 1.0), params(1, 1, 1), cfg), DomainError);
  v[0] = NAN;
  EXPECT_THROW(run(Field(TorusGrid(32), v), params(1, 1, 1), cfg), NonFiniteError);
}

TEST(Run, LinearDecayMatchesExactSolution) {
  SolverConfig cfg;
  cfg.n = 32;
  cfg.dt_init = 1e-4;
  const TorusGrid g(32);
  const auto traj = run(cosine_ic(g, 0.1), params(1, 0, 0), cfg);
  ASSERT_EQ(traj.outcome, Outcome::Completed);
  EXPECT_NEAR(traj.records.back().t, 1.0, 1e-12);
  const Field exact = Field::sample(g, [](double x) { return 1 + 0.1 * std::exp(-1.0) * std::cos(x); });
  EXPECT_LE(max_abs_diff(traj.final_field, exact), 1e-4);
}

TEST(Run, HomogeneousLogisticMatchesClosedForm) {
  SolverConfig cfg;
  cfg.n = 16;
  cfg.dt_init = 1e-4;
  const auto traj = run(Field::constant(TorusGrid(16), 0.5), params(1, 1, 1), cfg);
  ASSERT_EQ(traj.outcome, Outcome::Completed);
  const double expect = logistic(0.5, 1.0, 1.0);
  for (double v : traj.final_field.values()) EXPECT_LE(std::abs(v - expect) / expect, 1e-3);
}

TEST(Run, LogisticAttractor) {
  SolverConfig cfg;
  cfg.n = 16;
  cfg.t_end = 5.0;
  const auto traj = run(Field::constant(TorusGrid(16), 0.3), params(1, 0, 1), cfg);
  ASSERT_EQ(traj.outcome, Outcome::Completed);
  // closed form at t = 5 is 0.98, and the carrying capacity is 1
  const double expect = logistic(0.3, 1.0, 5.0);
  for (double v : traj.final_field.values()) EXPECT_LE(std::abs(v - expect) / expect, 1e-3);
}

TEST(Run, ConservesMassWithoutReaction) {
  SolverConfig cfg;
  cfg.n = 128;
  cfg.t_end = 0.5;
  const Field u0 = make_initial_condition("bump:1", TorusGrid(128));
  const auto traj = run(u0, params(1.2, 1.0, 0), cfg);
  ASSERT_EQ(traj.outcome, Outcome::Completed);
  EXPECT_NEAR(integral(traj.final_field), integral(u0), 1e-11);
  for (const auto& rec : traj.records) EXPECT_NEAR(rec.mass, kTwoPi, 1e-9);
}

TEST(Run, RecordsStartAtZeroAndEndAtTEnd) {
  SolverConfig cfg;
  cfg.n = 32;
  cfg.dt_init = 1e-2;
  cfg.t_end = 0.35;
  cfg.record_every = 10;
  const auto traj = run(cosine_ic(TorusGrid(32), 0.5), params(1.5, 1, 1), cfg);
  ASSERT_EQ(traj.outcome, Outcome::Completed);
  EXPECT_EQ(traj.records.front().t, 0.0);
  EXPECT_NEAR(traj.records.back().t, 0.35, 1e-12);
  for (std::size_t i = 1; i < traj.records.size(); ++i) EXPECT_GT(traj.records[i].t, traj.records[i - 1].t);
  EXPECT_FALSE(traj.snapshots.empty());
  EXPECT_LE(traj.snapshots.size(), 2 * kMaxSnapshots);
}

TEST(Run, HardCapIsBlowup) {
  SolverConfig cfg;
  cfg.n = 16;
  cfg.record_every = 1;
  cfg.blowup_linf = 2.0;
  const auto traj = run(Field::constant(TorusGrid(16), 3.0), params(1, 0, 0), cfg);
  EXPECT_EQ(traj.outcome, Outcome::BlowupDetected);
  EXPECT_EQ(to_string(traj.outcome), "BLOWUP_DETECTED");
  EXPECT_TRUE(traj.records.back().blowup);
}

TEST(Run, FixedStepNonFiniteIsBlowup) {
  // Explicit reaction with a huge step overflows.
  SolverConfig cfg;
  cfg.n = 16;
  cfg.adapt = false;
  cfg.dt_init = 50.0;
  cfg.t_end = 5000.0;
  cfg.blowup_linf = INFINITY;
  const auto traj = run(Field::constant(TorusGrid(16), 2.0), params(1, 0, 1), cfg);
  EXPECT_EQ(traj.outcome, Outcome::BlowupDetected);
}

TEST(Run, MollifiedDataKeepsMass) {
  SolverConfig cfg;
  cfg.n = 64;
  cfg.t_end = 1e-3;
  cfg.mollify_ic_eps = 0.01;
  const Field u0 = make_initial_condition("bump:3", TorusGrid(64));
  const auto traj = run(u0, params(1, 1, 0), cfg);
  EXPECT_NEAR(traj.records.front().mass, integral(u0), 1e-12);
  EXPECT_LT(traj.records.front().linf, lp_norm(u0, kInfinity));
}

TEST(Run, RegularizedModelDampsMore) {
  SolverConfig cfg;
  cfg.n = 64;
  cfg.t_end = 0.2;
  const Field u0 = cosine_ic(TorusGrid(64), 0.5);
  ModelParams plain = params(0.5, 0, 0), reg = plain;
  reg.epsilon = 0.5;
  const auto a = run(u0, plain, cfg), b = run(u0, reg, cfg);
  EXPECT_LT(b.records.back().linf, a.records.back().linf);
}

TEST(Json, ParamsAndConfigRoundTrip) {
  ModelParams p = params(0.75, 1.25, 0.5);
  p.variant = DriftVariant::Riesz;
  p.epsilon = 0.1;
  const ModelParams q = nlohmann::json(p).get<ModelParams>();
  EXPECT_EQ(q.alpha, p.alpha);
  EXPECT_EQ(q.chi, p.chi);
  EXPECT_EQ(q.variant, p.variant);
  EXPECT_EQ(q.epsilon, p.epsilon);

  SolverConfig c;
  c.n = 512;
  c.adapt = false;
  c.blowup_tail = 0.2;
  const SolverConfig d = nlohmann::json(c).get<SolverConfig>();
  EXPECT_EQ(d.n, 512);
  EXPECT_FALSE(d.adapt);
  EXPECT_EQ(d.blowup_tail, 0.2);
  EXPECT_EQ(nlohmann::json::object().get<SolverConfig>().n, SolverConfig{}.n);
}

TEST(InitialConditions, Families) {
  const TorusGrid g(256);
  const Field c = make_initial_condition("cosine:0.25", g);
  EXPECT_DOUBLE_EQ(c[128], 1.25);
  const Field b = make_initial_condition("bump:5", g);
  EXPECT_NEAR(mean(b), 5.0, 1e-12);
  EXPECT_GT(lp_norm(b, kInfinity), 25.0);
  EXPECT_GE(extrema(b).min, 0.0);
  const Field e = make_initial_condition("expcos", g);
  EXPECT_NEAR(e[128], std::exp(1.0), 1e-15);
}

TEST(InitialConditions, BadSpecsThrow) {
  const TorusGrid g(16);
  for (const char* spec : {"cosine", "cosine:2", "cosine:x", "bump:-1", "expcos:1", "gauss:1", "bump:1e999", ""})
    EXPECT_THROW(make_initial_condition(spec, g), DomainError) << spec;
}

TEST(TrajectoryIo, WritesRunDirectory) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "fracks_traj_io_test";
  fs::remove_all(base);
  SolverConfig cfg;
  cfg.n = 32;
  cfg.t_end = 0.05;
  const Field u0 = cosine_ic(TorusGrid(32), 0.3);
  const auto traj = run(u0, params(1, 1, 1), cfg);
  const fs::path dir = write_trajectory(traj, u0, base);
  EXPECT_EQ(dir.filename().string(), run_id(traj.params, traj.config, u0));
  for (const char* name : {"metadata.json", "records.csv", "final_field.csv"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  std::ifstream meta(dir / "metadata.json");
  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j.at("outcome"), "COMPLETED");
  EXPECT_EQ(j.at("params").at("alpha"), 1.0);
  std::ifstream field(dir / "final_field.csv");
  const Field back = read_field_csv(field);
  EXPECT_EQ(max_abs_diff(back, traj.final_field), 0.0);
  fs::remove_all(base);
}

TEST(TrajectoryIo, RunIdTracksInputs) {
  const Field u0 = cosine_ic(TorusGrid(32), 0.3);
  SolverConfig cfg;
  cfg.n = 32;
  const auto a = run_id(params(1, 1, 1), cfg, u0);
  EXPECT_EQ(a, run_id(params(1, 1, 1), cfg, u0));
  EXPECT_NE(a, run_id(params(1, 1, 0.9), cfg, u0));
  EXPECT_NE(a, run_id(params(1, 1, 1), cfg, cosine_ic(TorusGrid(32), 0.31)));
  EXPECT_EQ(a.size(), 4u + 16u);
}
