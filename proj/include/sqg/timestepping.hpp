#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/eigenbasis.hpp"
#include "sqg/sqg_core.hpp"

namespace sqg {

/// Norms monitored along a run. `h2` and `h2alpha` are the A and B of the
/// D(Lambda^2) energy estimates.
struct DiagnosticsRow {
  double t = 0.0;
  double l2 = 0.0;
  double halpha = 0.0;
  double h2 = 0.0;
  double h2alpha = 0.0;
  std::vector<double> lr;
  /// 1/2 d/dt ||theta||^2 + kappa ||Lambda^alpha theta||^2 over the interval
  /// ending at this row (trapezoid in time); 0 on the first row.
  double energy_residual = 0.0;
};

struct Trajectory {
  BasisPtr basis;
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
};

/// Non-finite state or norm explosion. Carries the last finite state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, SpectralField last_state)
      : std::runtime_error(what), time_(time), state_(std::move(last_state)) {}
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] const SpectralField& last_state() const { return state_; }

 private:
  double time_;
  SpectralField state_;
};

struct BlowUp {
  double time = 0.0;
  std::string reason;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<DiagnosticsRow> rows;
  std::optional<BlowUp> blow_up;

  [[nodiscard]] bool completed() const { return !blow_up.has_value(); }
};

/// Threshold of the norm-explosion guard relative to the initial ||.||_{2,D}.
inline constexpr double kBlowUpFactor = 1e6;

/// Linear-plus-advection dynamics d theta_j/dt = -decay_j theta_j - A(theta, t)_j.
struct Dynamics {
  std::vector<double> decay;
  /// Advection term A; empty means A = 0.
  std::function<SpectralField(const SpectralField&, double)> advection;
  /// Called with the accepted state after every step (and once at t = 0).
  std::function<void(const SpectralField&, double)> on_state;
  /// Called before each step with its start time.
  std::function<void(double)> on_step_begin;
};

/// One step of `scheme` for `dyn`. Throws BlowUpError on a non-finite result.
SpectralField advance(const SpectralField& theta, double t, double dt, Scheme scheme, const Dynamics& dyn);

/// Norm bookkeeping for rows: alpha and kappa of the energy law
/// 1/2 d/dt ||theta||^2 + kappa ||theta||_{alpha,D}^2 = 0.
struct EnergyLaw {
  double alpha = 0.5;
  double kappa = 0.0;
};

DiagnosticsRow diagnose(const SpectralField& theta, double t, double alpha, const std::vector<double>& lr);

/// Grid-quadrature Lr norm of the synthesized field.
double lr_norm(const SpectralField& theta, double r);

/// SQG dynamics for `cfg`: decay kappa lambda^alpha plus the configured
/// nonlinearity.
Dynamics sqg_dynamics(const SolverConfig& cfg);

/// One step of the Galerkin SQG system.
SpectralField step(const SpectralField& theta, const SolverConfig& cfg);

/// Integrates `dyn` from theta0 on [0, cfg.T] with rows every
/// cfg.snapshot_stride steps. Blow-up is reported in the result.
RunResult integrate(const SpectralField& theta0, const SolverConfig& cfg, const Dynamics& dyn, EnergyLaw law);

/// Galerkin SQG run.
RunResult run(const SpectralField& theta0, const SolverConfig& cfg);

double local_existence_time(const SpectralField& theta0, double kappa, double M);
double smallness_margin(const SpectralField& theta0, double kappa, double C);

// ---------------------------------------------------------------------------
// Linear advection-diffusion with a prescribed velocity
// ---------------------------------------------------------------------------

using VelocityProvider = std::function<VelocityField(double t)>;

struct LinearAdvectionResult {
  RunResult run;
  /// Running integral of the B-norm proxy of u at each row.
  std::vector<double> u_b_integral;
  /// max_t ||theta(t)||_{2,D} / (||theta0||_{2,D} exp(int ||u||_B)).
  double growth_ratio = 0.0;
};

/// B-norm proxy ||u||_{L2} + max|grad u| + ||Delta u||_{L^q} on the grid.
double velocity_b_norm(const VelocityField& u, double q = 4.0);

/// Tolerance of the div/trace precondition applied to every provided velocity.
inline constexpr double kVelocityTolerance = 1e-10;

/// d theta/dt + u.grad theta + kappa Lambda^{2 alpha} theta = 0 with u held
/// frozen over each step at its value at the step start.
LinearAdvectionResult solve_linear_advection(const VelocityProvider& provider, const SpectralField& theta0,
                                             const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Retarded mollification
// ---------------------------------------------------------------------------

/// Smooth bump on (1,2), unnormalized: exp(-1/(1-(2 tau - 3)^2)).
double mollifier_bump(double tau);

/// Weights omega_n (n = first..last) for theta(t - n dt), proportional to
/// phi(n dt / delta) and summing to one.
struct MollifierWeights {
  int first = 0;
  std::vector<double> weights;
};
MollifierWeights mollifier_weights(double delta, double dt);

/// SQG with the time-lagged velocity U_delta[theta]; theta = 0 for t < 0.
RunResult run_retarded_mollification(const SpectralField& theta0, double delta, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Picard iteration with viscosity
// ---------------------------------------------------------------------------

struct PicardResult {
  Trajectory trajectory;  // last iterate at the snapshot stride
  std::vector<DiagnosticsRow> rows;
  /// residuals[n-1] = sup_t ||theta_n - theta_{n-1}||_{L2}, n >= 1.
  std::vector<double> residuals;
  /// sup_t ||Delta theta_n||_{L^p} per iterate n = 0, 1, ...
  std::vector<double> w2p_proxy;
  bool converged = false;
  int iterations = 0;  // index of the last iterate
};

struct PicardOptions {
  double kappa_visc = 0.05;
  double tol = 1e-10;
  int max_iter = 10;
  double proxy_p = 4.0;
};

PicardResult run_picard_inviscid(const SpectralField& theta0, const PicardOptions& opts, const SolverConfig& cfg);

// ---------------------------------------------------------------------------
// Empirical constants
// ---------------------------------------------------------------------------

/// True iff max_t ||theta(t)||_{2,D} <= (1 + rel_tol) ||theta0||_{2,D} over
/// [0, cfg.T] and the run completes.
bool keeps_h2_bounded_by_initial(const SpectralField& theta0, const SolverConfig& cfg, double rel_tol = 1e-6);

struct CalibrationOptions {
  int shapes = 32;
  std::uint64_t seed = 7001;
  double decay = 2.0;       // coefficient decay of the calibration shapes
  double rel_tol = 1e-3;    // geometric bisection stops once hi - lo <= rel_tol * hi
  double lower = 1e-3;      // initial bracket on ||theta0||_{2,D} / kappa
  double upper = 1e5;
};

struct ConstantCalibration {
  double constant = 0.0;
  std::vector<double> per_shape;  // critical amplitude (small data) or required M
  std::string provenance;
};

/// Smallest C with: ||theta0||_{2,D} < kappa/C => ||theta(t)||_{2,D} <= ||theta0||_{2,D},
/// bisected on the amplitude of each calibration shape; C = kappa / min
/// critical amplitude.
ConstantCalibration calibrate_small_data_constant(const SolverConfig& base, const CalibrationOptions& opts);

/// Largest M needed so that ||theta||_{2,D}^2 <= 2 ||theta0||_{2,D}^2 on
/// [0, kappa/(M ||theta0||^2_{2,D})] across the calibration shapes, scaled to
/// the given amplitudes.
ConstantCalibration calibrate_local_existence_constant(const SolverConfig& base, const CalibrationOptions& opts,
                                                       const std::vector<double>& amplitudes);

}  // namespace sqg
