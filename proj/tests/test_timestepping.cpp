#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"
#include "sqg/timestepping.hpp"
#include "sqg/verification.hpp"
#include "support/oracles.hpp"

using namespace sqg;

namespace {

SolverConfig config_for(const BasisPtr& b) {
  SolverConfig cfg;
  cfg.domain = b->domain();
  cfg.lr.clear();
  return cfg;
}

double l2(const SpectralField& f) { return std::sqrt(dot(f, f)); }

}  // namespace

TEST(Step, LinearFlowIsExactForEveryScheme) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.nonlinear = false;
  cfg.kappa = 0.8;
  cfg.alpha = 0.6;
  cfg.dt = 0.01;
  const SpectralField e1 = SpectralField::unit(b, 0);
  const double exact = std::exp(-cfg.kappa * std::pow(2.0, cfg.alpha) * cfg.dt);
  cfg.scheme = Scheme::etdrk2;
  EXPECT_NEAR(step(e1, cfg)[0], exact, 1e-15);
  cfg.scheme = Scheme::imex_euler;
  EXPECT_NEAR(step(e1, cfg)[0], 1.0 / (1.0 + cfg.kappa * std::pow(2.0, cfg.alpha) * cfg.dt), 1e-15);
  cfg.scheme = Scheme::rk4;
  EXPECT_NEAR(step(e1, cfg)[0], exact, 1e-10);
}

TEST(Step, SingleModeIsSteadyWithoutDissipation) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  const SpectralField theta = 1.7 * SpectralField::unit(b, 4);
  for (Scheme s : {Scheme::etdrk2, Scheme::imex_euler, Scheme::rk4}) {
    cfg.scheme = s;
    EXPECT_LE((step(theta, cfg) - theta).max_abs(), 1e-13);
  }
}

TEST(Step, Rk4ConservesEnergyToFifthOrderPerStep) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  cfg.scheme = Scheme::rk4;
  const SpectralField theta = 30.0 * oracle::gaussian_field(b, 8);
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    cfg.dt = dt;
    const double drift = std::abs(l2(step(theta, cfg)) - l2(theta));
    // O(dt^5) predicts 32; allow some pre-asymptotic slack
    if (prev > 0.0) EXPECT_GT(prev / drift, 28.0) << dt;
    prev = drift;
  }
}

TEST(Step, RejectsForeignBasis) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  const SolverConfig cfg = config_for(build_basis(DomainSpec::with_modes(3)));
  EXPECT_THROW(step(SpectralField(b), cfg), ShapeError);
}

TEST(Advance, NonFiniteStateRaisesBlowUp) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(2));
  Dynamics dyn;
  dyn.decay.assign(b->size(), 0.0);
  dyn.advection = [](const SpectralField& theta, double) {
    SpectralField out(theta.basis());
    out[0] = std::numeric_limits<double>::infinity();
    return out;
  };
  EXPECT_THROW(advance(SpectralField::unit(b, 0), 0.0, 0.1, Scheme::rk4, dyn), BlowUpError);
}

TEST(Run, ZeroDataStaysZero) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.1;
  const RunResult r = run(SpectralField(b), cfg);
  ASSERT_TRUE(r.completed());
  for (const SpectralField& s : r.trajectory.snapshots) EXPECT_TRUE(s.is_zero());
  for (double res : energy_residuals(r.rows, cfg.kappa)) EXPECT_EQ(res, 0.0);
}

TEST(Run, SingleModeDecaysExactly) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(8));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 1.0;
  cfg.alpha = 0.5;
  cfg.snapshot_stride = 25;
  const RunResult r = run(SpectralField::unit(b, 0), cfg);
  ASSERT_TRUE(r.completed());
  ASSERT_EQ(r.rows.size(), 41u);
  for (const DiagnosticsRow& row : r.rows) EXPECT_NEAR(row.l2, std::exp(-std::sqrt(2.0) * row.t), 1e-10);
  EXPECT_NEAR(r.rows.back().t, 1.0, 1e-12);
}

TEST(Run, InviscidConservationRk4) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  cfg.scheme = Scheme::rk4;
  cfg.snapshot_stride = 1;
  const RunResult r = run(oracle::gaussian_field(b, 31), cfg);
  double drift = 0.0;
  for (const DiagnosticsRow& row : r.rows) drift = std::max(drift, std::abs(row.l2 - r.rows[0].l2) / r.rows[0].l2);
  EXPECT_LE(drift, 1e-8);
}

TEST(Run, DiagnosticsRowsAndNorms) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.05;
  cfg.lr = {2.0, 4.0};
  const SpectralField theta = oracle::gaussian_field(b, 3);
  const RunResult r = run(theta, cfg);
  const DiagnosticsRow& row = r.rows.front();
  EXPECT_NEAR(row.l2, sobolev_norm(theta, 0.0), 1e-14);
  EXPECT_NEAR(row.h2alpha, sobolev_norm(theta, 2.5), 1e-12);
  ASSERT_EQ(row.lr.size(), 2u);
  EXPECT_NEAR(row.lr[0], row.l2, 1e-12 * row.l2);
  EXPECT_NEAR(lr_norm(theta, 2.0), row.l2, 1e-12 * row.l2);
  EXPECT_GE(row.h2, std::pow(2.0, 1.0) * row.l2 * (1 - 1e-14));
  EXPECT_EQ(row.energy_residual, 0.0);
}

TEST(Run, BlowUpGuardReportsTime) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  cfg.dt = 0.05;
  cfg.T = 50.0;
  cfg.scheme = Scheme::rk4;
  const RunResult r = run(100.0 * oracle::gaussian_field(b, 2), cfg);
  ASSERT_FALSE(r.completed());
  EXPECT_GT(r.blow_up->time, 0.0);
  EXPECT_FALSE(r.blow_up->reason.empty());
}

TEST(LocalExistenceTime, Arithmetic) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  const SpectralField f = with_sobolev_norm(oracle::gaussian_field(b, 1), 2.0, 1.0);
  EXPECT_NEAR(local_existence_time(f, 1.0, 1.0), 1.0, 1e-14);
  // ||e1||_{2,D}^2 = lambda_1^2 = 4
  EXPECT_NEAR(local_existence_time(SpectralField::unit(b, 0), 2.0, 4.0), 0.125, 1e-15);
  EXPECT_NEAR(local_existence_time(3.0 * f, 1.0, 1.0), local_existence_time(f, 1.0, 1.0) / 9.0, 1e-15);
  EXPECT_THROW(local_existence_time(SpectralField(b), 1.0, 1.0), DomainError);
  EXPECT_THROW(local_existence_time(f, 0.0, 1.0), DomainError);
}

TEST(SmallnessMargin, SignFlipsAtThreshold) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  EXPECT_DOUBLE_EQ(smallness_margin(SpectralField(b), 2.0, 4.0), 0.5);
  const SpectralField f = with_sobolev_norm(oracle::gaussian_field(b, 1), 2.0, 0.5);
  EXPECT_NEAR(smallness_margin(f, 2.0, 4.0), 0.0, 1e-15);
  EXPECT_GT(smallness_margin(0.99 * f, 2.0, 4.0), 0.0);
  EXPECT_LT(smallness_margin(1.01 * f, 2.0, 4.0), 0.0);
  EXPECT_THROW(smallness_margin(f, 1.0, 0.0), DomainError);
}

TEST(LinearAdvection, ZeroVelocityIsHeatFlow) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.5;
  cfg.snapshot_stride = 100;
  const SpectralField theta0 = oracle::gaussian_field(b, 12);
  const VelocityField zero = velocity(SpectralField(b));
  const LinearAdvectionResult r = solve_linear_advection([&](double) { return zero; }, theta0, cfg);
  ASSERT_TRUE(r.run.completed());
  const SpectralField& last = r.run.trajectory.snapshots.back();
  const double t = r.run.trajectory.times.back();
  for (std::size_t j = 0; j < b->size(); ++j) {
    EXPECT_NEAR(last[j], theta0[j] * std::exp(-std::pow(b->lambda(j), cfg.alpha) * t), 1e-10);
  }
  EXPECT_LE(r.growth_ratio, 1.0);
}

TEST(LinearAdvection, FrozenVelocityKeepsL2Nonincreasing) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(6));
  SolverConfig cfg = config_for(b);
  cfg.snapshot_stride = 1;
  const VelocityField u = velocity(SpectralField::unit(b, 0));
  const RunResult r = solve_linear_advection([&](double) { return u; }, SpectralField::unit(b, 0), cfg).run;
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_LE(r.rows[k].l2, r.rows[k - 1].l2 * (1 + 1e-13));
  const RunResult z = solve_linear_advection([&](double) { return u; }, SpectralField(b), cfg).run;
  EXPECT_TRUE(z.trajectory.snapshots.back().is_zero());
}

TEST(LinearAdvection, RejectsCompressibleVelocity) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.01;
  VelocityField u = velocity(SpectralField::unit(b, 0));
  // u1 = sin(x) sin(y) has nonzero divergence and vanishes on the boundary
  for (std::size_t i = 0; i < u.u1.nx(); ++i)
    for (std::size_t k = 0; k < u.u1.ny(); ++k)
      u.u1.at(i, k) = std::sin(b->grid().x.nodes[i]) * std::sin(b->grid().y.nodes[k]);
  EXPECT_THROW(solve_linear_advection([&](double) { return u; }, SpectralField::unit(b, 0), cfg), PreconditionError);
}

TEST(Mollifier, BumpAndWeights) {
  EXPECT_EQ(mollifier_bump(1.0), 0.0);
  EXPECT_EQ(mollifier_bump(2.0), 0.0);
  EXPECT_EQ(mollifier_bump(0.3), 0.0);
  EXPECT_NEAR(mollifier_bump(1.5), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(mollifier_bump(1.25), mollifier_bump(1.75), 1e-15);

  const MollifierWeights w = mollifier_weights(0.1, 0.001);
  EXPECT_EQ(w.first, 100);
  EXPECT_EQ(w.weights.size(), 101u);
  EXPECT_NEAR(std::accumulate(w.weights.begin(), w.weights.end(), 0.0), 1.0, 1e-14);
  EXPECT_EQ(w.weights.front(), 0.0);
  EXPECT_EQ(w.weights.back(), 0.0);
  EXPECT_THROW(mollifier_weights(0.001, 0.001), ConfigError);
  EXPECT_THROW(mollifier_weights(0.0, 0.001), ConfigError);
}

TEST(RetardedMollification, FirstWindowIsPureDecay) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(6));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.3;
  cfg.snapshot_stride = 10;
  const double delta = 0.1;
  const SpectralField theta0 = oracle::gaussian_field(b, 21);
  const RunResult r = run_retarded_mollification(theta0, delta, cfg);
  ASSERT_TRUE(r.completed());
  bool later_differs = false;
  for (std::size_t i = 0; i < r.trajectory.times.size(); ++i) {
    const double t = r.trajectory.times[i];
    double err = 0.0;
    for (std::size_t j = 0; j < b->size(); ++j) {
      err = std::max(err, std::abs(r.trajectory.snapshots[i][j] -
                                   theta0[j] * std::exp(-cfg.kappa * std::pow(b->lambda(j), cfg.alpha) * t)));
    }
    if (t <= delta + 1e-12) EXPECT_LE(err, 1e-12) << t;
    else if (err > 1e-6) later_differs = true;
  }
  EXPECT_TRUE(later_differs);
  EXPECT_TRUE(run_retarded_mollification(SpectralField(b), delta, cfg).trajectory.snapshots.back().is_zero());
}

TEST(RetardedMollification, FirstOrderInDeltaWhenDiffusionIsSlow) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(6));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.1;
  cfg.snapshot_stride = 10;
  const SpectralField theta0 = with_sobolev_norm(oracle::gaussian_field(b, 41), 2.0, 5.0);
  std::vector<Trajectory> runs;
  for (double delta : {0.2, 0.1, 0.05}) runs.push_back(run_retarded_mollification(theta0, delta, cfg).trajectory);
  auto sup_diff = [](const Trajectory& x, const Trajectory& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.snapshots.size(); ++i) m = std::max(m, l2(x.snapshots[i] - y.snapshots[i]));
    return m;
  };
  const double d1 = sup_diff(runs[0], runs[1]);
  const double d2 = sup_diff(runs[1], runs[2]);
  EXPECT_NEAR(d1 / d2, 2.0, 0.3);
}

TEST(Picard, SingleModeConvergesImmediately) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  cfg.T = 0.1;
  const PicardResult r = run_picard_inviscid(0.5 * SpectralField::unit(b, 2), PicardOptions{}, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  const PicardResult z = run_picard_inviscid(SpectralField(b), PicardOptions{}, cfg);
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.iterations, 1);
  EXPECT_TRUE(z.trajectory.snapshots.back().is_zero());
}

TEST(Picard, SmallDataResidualsDecreaseGeometrically) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(6));
  SolverConfig cfg = config_for(b);
  cfg.kappa = 0.0;
  cfg.T = 0.1;
  const SpectralField theta0 = with_sobolev_norm(oracle::gaussian_field(b, 99), 2.0, 0.1);
  const PicardResult r = run_picard_inviscid(theta0, PicardOptions{}, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 10);
  ASSERT_GE(r.residuals.size(), 2u);
  for (std::size_t n = 1; n < r.residuals.size(); ++n) EXPECT_LT(r.residuals[n], r.residuals[n - 1]);
  EXPECT_EQ(r.w2p_proxy.size(), r.residuals.size() + 1);
}

TEST(Picard, RejectsBadOptions) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(2));
  const SolverConfig cfg = config_for(b);
  EXPECT_THROW(run_picard_inviscid(SpectralField(b), PicardOptions{0.0}, cfg), ConfigError);
  EXPECT_THROW(run_picard_inviscid(SpectralField(b), PicardOptions{0.05, 1e-10, 0}, cfg), ConfigError);
}

TEST(Calibration, BoundedRunAndDegenerateBracket) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  SolverConfig cfg = config_for(b);
  cfg.T = 0.2;
  EXPECT_TRUE(keeps_h2_bounded_by_initial(SpectralField::unit(b, 0), cfg));
  CalibrationOptions opts;
  opts.shapes = 2;
  const ConstantCalibration c = calibrate_small_data_constant(cfg, opts);
  EXPECT_EQ(c.per_shape.size(), 2u);
  EXPECT_GT(c.constant, 0.0);
  EXPECT_FALSE(c.provenance.empty());
  cfg.kappa = 0.0;
  EXPECT_THROW(calibrate_small_data_constant(cfg, opts), ConfigError);
}
