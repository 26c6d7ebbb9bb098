#include "sqg/timestepping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"
#include "sqg/verification.hpp"

namespace sqg {

namespace {

// phi1(z) = (1 - e^{-z})/z, phi2(z) = (e^{-z} - 1 + z)/z^2 for decay z = c h >= 0.
double phi1(double z) {
  if (z < 1e-8) return 1.0 - 0.5 * z;
  return -std::expm1(-z) / z;
}

double phi2(double z) {
  if (z < 1e-2) {
    // alternating series sum_{n>=0} (-z)^n / (n+2)!
    double term = 0.5;
    double sum = 0.5;
    for (int n = 1; n < 10; ++n) {
      term *= -z / (n + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(-z) + z) / (z * z);
}

SpectralField apply_advection(const Dynamics& dyn, const SpectralField& theta, double t) {
  if (!dyn.advection) return SpectralField(theta.basis());
  return dyn.advection(theta, t);
}

void require_finite(const SpectralField& next, const SpectralField& last, double t) {
  if (!next.all_finite()) throw BlowUpError("non-finite coefficient", t, last);
}

}  // namespace

SpectralField advance(const SpectralField& theta, double t, double h, Scheme scheme, const Dynamics& dyn) {
  const std::size_t m = theta.size();
  if (dyn.decay.size() != m) throw ShapeError("advance: decay vector does not match the field");
  switch (scheme) {
    case Scheme::etdrk2: {
      const SpectralField nu = apply_advection(dyn, theta, t);
      SpectralField a(theta.basis());
      for (std::size_t j = 0; j < m; ++j) {
        const double z = dyn.decay[j] * h;
        a[j] = std::exp(-z) * theta[j] - h * phi1(z) * nu[j];
      }
      require_finite(a, theta, t);
      const SpectralField na = apply_advection(dyn, a, t + h);
      SpectralField out = a;
      for (std::size_t j = 0; j < m; ++j) out[j] -= h * phi2(dyn.decay[j] * h) * (na[j] - nu[j]);
      require_finite(out, theta, t);
      return out;
    }
    case Scheme::imex_euler: {
      const SpectralField nu = apply_advection(dyn, theta, t);
      SpectralField out(theta.basis());
      for (std::size_t j = 0; j < m; ++j) out[j] = (theta[j] - h * nu[j]) / (1.0 + h * dyn.decay[j]);
      require_finite(out, theta, t);
      return out;
    }
    case Scheme::rk4: {
      auto f = [&](const SpectralField& u, double time) {
        SpectralField r = apply_advection(dyn, u, time);
        for (std::size_t j = 0; j < m; ++j) r[j] = -r[j] - dyn.decay[j] * u[j];
        return r;
      };
      const SpectralField k1 = f(theta, t);
      const SpectralField k2 = f(SpectralField(theta).axpy(0.5 * h, k1), t + 0.5 * h);
      const SpectralField k3 = f(SpectralField(theta).axpy(0.5 * h, k2), t + 0.5 * h);
      const SpectralField k4 = f(SpectralField(theta).axpy(h, k3), t + h);
      SpectralField out = theta;
      for (std::size_t j = 0; j < m; ++j) out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      require_finite(out, theta, t);
      return out;
    }
  }
  throw ConfigError("advance: unknown scheme");
}

double lr_norm(const SpectralField& theta, double r) {
  GridField g = synthesize(theta);
  for (double& v : g.values()) v = std::pow(std::abs(v), r);
  return std::pow(std::max(0.0, g.integral()), 1.0 / r);
}

DiagnosticsRow diagnose(const SpectralField& theta, double t, double alpha, const std::vector<double>& lr) {
  DiagnosticsRow row;
  row.t = t;
  row.l2 = sobolev_norm(theta, 0.0);
  row.halpha = sobolev_norm(theta, alpha);
  row.h2 = sobolev_norm(theta, 2.0);
  row.h2alpha = sobolev_norm(theta, 2.0 + alpha);
  row.lr.reserve(lr.size());
  for (double r : lr) row.lr.push_back(lr_norm(theta, r));
  return row;
}

Dynamics sqg_dynamics(const SolverConfig& cfg) {
  const BasisPtr basis = build_basis(cfg.domain);
  Dynamics dyn;
  dyn.decay.resize(basis->size());
  for (std::size_t j = 0; j < basis->size(); ++j) dyn.decay[j] = cfg.kappa * std::pow(basis->lambda(j), cfg.alpha);
  if (cfg.nonlinear) {
    dyn.advection = [cfg](const SpectralField& theta, double) { return configured_nonlinearity(theta, cfg); };
  }
  return dyn;
}

SpectralField step(const SpectralField& theta, const SolverConfig& cfg) {
  cfg.validate();
  if (!(theta.basis()->domain() == cfg.domain)) throw ShapeError("step: field basis does not match the config domain");
  return advance(theta, 0.0, cfg.dt, cfg.scheme, sqg_dynamics(cfg));
}

RunResult integrate(const SpectralField& theta0, const SolverConfig& cfg, const Dynamics& dyn, EnergyLaw law) {
  cfg.validate();
  if (!(theta0.basis()->domain() == cfg.domain)) {
    throw ShapeError("integrate: initial field basis does not match the config domain");
  }
  const long n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / cfg.dt - 1e-9)));
  RunResult result;
  result.trajectory.basis = theta0.basis();

  auto record = [&](const SpectralField& theta, double t) {
    DiagnosticsRow row = diagnose(theta, t, law.alpha, cfg.lr);
    if (!result.rows.empty()) {
      const DiagnosticsRow& prev = result.rows.back();
      const double span = t - prev.t;
      row.energy_residual = 0.5 * (row.l2 * row.l2 - prev.l2 * prev.l2) / span +
                            law.kappa * 0.5 * (prev.halpha * prev.halpha + row.halpha * row.halpha);
    }
    result.rows.push_back(std::move(row));
    result.trajectory.times.push_back(t);
    result.trajectory.snapshots.push_back(theta);
  };

  const double h2_initial = sobolev_norm(theta0, 2.0);
  SpectralField theta = theta0;
  if (dyn.on_state) dyn.on_state(theta, 0.0);
  record(theta, 0.0);

  for (long n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    const bool last = n + 1 == n_steps;
    const double t_next = last ? cfg.T : static_cast<double>(n + 1) * cfg.dt;
    if (dyn.on_step_begin) dyn.on_step_begin(t);
    try {
      theta = advance(theta, t, t_next - t, cfg.scheme, dyn);
    } catch (const BlowUpError& e) {
      result.blow_up = BlowUp{t, e.what()};
      break;
    }
    if (h2_initial > 0.0 && sobolev_norm(theta, 2.0) > kBlowUpFactor * h2_initial) {
      result.blow_up = BlowUp{t, "||theta||_{2,D} exceeded the blow-up guard"};
      break;
    }
    if (dyn.on_state) dyn.on_state(theta, t_next);
    if ((n + 1) % cfg.snapshot_stride == 0 || last) record(theta, t_next);
  }
  return result;
}

RunResult run(const SpectralField& theta0, const SolverConfig& cfg) {
  return integrate(theta0, cfg, sqg_dynamics(cfg), EnergyLaw{cfg.alpha, cfg.kappa});
}

double local_existence_time(const SpectralField& theta0, double kappa, double M) {
  if (!(kappa > 0.0)) throw DomainError("local_existence_time: kappa must be > 0");
  if (!(M > 0.0)) throw DomainError("local_existence_time: M must be > 0");
  const double a = sobolev_norm(theta0, 2.0);
  if (a == 0.0) throw DomainError("local_existence_time: undefined for zero data");
  return kappa / (M * a * a);
}

double smallness_margin(const SpectralField& theta0, double kappa, double C) {
  if (!(kappa > 0.0)) throw DomainError("smallness_margin: kappa must be > 0");
  if (!(C > 0.0)) throw DomainError("smallness_margin: C must be > 0");
  return kappa / C - sobolev_norm(theta0, 2.0);
}

// ---------------------------------------------------------------------------
// Linear advection
// ---------------------------------------------------------------------------

double velocity_b_norm(const VelocityField& u, double q) {
  const GridField& u1 = u.u1;
  double l2 = 0.0;
  {
    GridField sq(u1.basis());
    auto s = sq.values();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = u1.values()[i] * u1.values()[i] + u.u2.values()[i] * u.u2.values()[i];
    l2 = std::sqrt(std::max(0.0, sq.integral()));
  }
  // grad u from the stream function: (-psi_xy, -psi_yy; psi_xx, psi_xy).
  const GridField pxy = synthesize_derivative(u.psi, 1, 1);
  const GridField pxx = synthesize_derivative(u.psi, 2, 0);
  const GridField pyy = synthesize_derivative(u.psi, 0, 2);
  double grad_max = 0.0;
  for (std::size_t i = 0; i < pxy.values().size(); ++i) {
    const double a = pxy.values()[i];
    const double b = pxx.values()[i];
    const double c = pyy.values()[i];
    grad_max = std::max(grad_max, std::sqrt(2.0 * a * a + b * b + c * c));
  }
  SpectralField lap = frac_laplacian(u.psi, 2.0);
  lap *= -1.0;
  const GridField l1 = synthesize_derivative(lap, 0, 1);
  const GridField l2g = synthesize_derivative(lap, 1, 0);
  GridField mag(u1.basis());
  for (std::size_t i = 0; i < mag.values().size(); ++i) {
    const double a = l1.values()[i];
    const double b = l2g.values()[i];
    mag.values()[i] = std::pow(a * a + b * b, 0.5 * q);
  }
  const double lap_q = std::pow(std::max(0.0, mag.integral()), 1.0 / q);
  return l2 + grad_max + lap_q;
}

LinearAdvectionResult solve_linear_advection(const VelocityProvider& provider, const SpectralField& theta0,
                                             const SolverConfig& cfg) {
  if (!provider) throw ConfigError("solve_linear_advection: missing velocity provider");
  SolverConfig linear = cfg;
  linear.nonlinear = false;
  Dynamics dyn = sqg_dynamics(linear);
  auto current = std::make_shared<std::optional<VelocityField>>();
  auto b_norms = std::make_shared<std::vector<std::pair<double, double>>>();  // (t_start, ||u||_B)
  const BasisPtr basis = theta0.basis();
  dyn.on_step_begin = [=](double t) {
    VelocityField u = provider(t);
    if (!(u.psi.basis()->domain() == basis->domain())) {
      throw ShapeError("solve_linear_advection: velocity lives on another basis");
    }
    const double scale = std::max(1.0, std::max(u.u1.max_abs(), u.u2.max_abs()));
    const InequalityReport report = check_velocity(u, kVelocityTolerance * scale);
    if (!report.pass) {
      std::ostringstream msg;
      msg << "solve_linear_advection: velocity at t = " << t << " is not divergence-free and tangential (defect "
          << -report.worst_violation << ")";
      throw PreconditionError(msg.str());
    }
    b_norms->emplace_back(t, velocity_b_norm(u));
    *current = std::move(u);
  };
  dyn.advection = [current](const SpectralField& theta, double) { return advection_term(current->value(), theta); };

  LinearAdvectionResult out;
  out.run = integrate(theta0, cfg, dyn, EnergyLaw{cfg.alpha, cfg.kappa});

  const double h2_0 = sobolev_norm(theta0, 2.0);
  std::size_t next = 0;
  double integral = 0.0;
  for (const DiagnosticsRow& row : out.run.rows) {
    while (next < b_norms->size() && (*b_norms)[next].first < row.t - 1e-12) {
      const double t0 = (*b_norms)[next].first;
      const double t1 = next + 1 < b_norms->size() ? (*b_norms)[next + 1].first : std::min(cfg.T, t0 + cfg.dt);
      integral += (*b_norms)[next].second * (t1 - t0);
      ++next;
    }
    out.u_b_integral.push_back(integral);
    if (h2_0 > 0.0) out.growth_ratio = std::max(out.growth_ratio, row.h2 / (h2_0 * std::exp(integral)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Retarded mollification
// ---------------------------------------------------------------------------

double mollifier_bump(double tau) {
  if (tau <= 1.0 || tau >= 2.0) return 0.0;
  const double s = 2.0 * tau - 3.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

MollifierWeights mollifier_weights(double delta, double dt) {
  if (!(delta > 0.0)) throw ConfigError("delta: must be > 0");
  if (delta < 2.0 * dt) throw ConfigError("delta: must be at least 2 dt to resolve the mollifier");
  MollifierWeights w;
  w.first = static_cast<int>(std::ceil(delta / dt - 1e-9));
  const int last = static_cast<int>(std::floor(2.0 * delta / dt + 1e-9));
  double sum = 0.0;
  for (int n = w.first; n <= last; ++n) {
    const double v = mollifier_bump(n * dt / delta);
    w.weights.push_back(v);
    sum += v;
  }
  if (!(sum > 0.0)) throw ConfigError("delta: mollifier support contains no interior step");
  for (double& v : w.weights) v /= sum;
  return w;
}

namespace {

/// Accepted step states keyed by step index, with a bounded window.
class StepHistory {
 public:
  StepHistory(BasisPtr basis, double dt, std::size_t capacity)
      : basis_(std::move(basis)), dt_(dt), capacity_(capacity) {}

  void push(const SpectralField& theta, double t) {
    const long index = std::lround(t / dt_);
    states_.emplace_back(index, theta);
    while (capacity_ > 0 && states_.size() > capacity_) states_.pop_front();
  }

  /// theta(t), zero for t < 0, linear in time between stored steps.
  [[nodiscard]] SpectralField at(double t) const {
    const double p = t / dt_;
    if (p < -1e-9) return SpectralField(basis_);
    const double r = std::round(p);
    if (std::abs(p - r) < 1e-9) return lookup(static_cast<long>(r));
    const long lo = static_cast<long>(std::floor(p));
    const double frac = p - static_cast<double>(lo);
    SpectralField out = lookup(lo);
    out *= 1.0 - frac;
    out.axpy(frac, lookup(lo + 1));
    return out;
  }

  [[nodiscard]] const std::deque<std::pair<long, SpectralField>>& states() const { return states_; }

 private:
  [[nodiscard]] const SpectralField& lookup(long index) const {
    if (states_.empty() || index < states_.front().first || index > states_.back().first) {
      throw std::logic_error("step history underrun at step " + std::to_string(index));
    }
    return states_[static_cast<std::size_t>(index - states_.front().first)].second;
  }

  BasisPtr basis_;
  double dt_;
  std::size_t capacity_;
  std::deque<std::pair<long, SpectralField>> states_;
};

}  // namespace

RunResult run_retarded_mollification(const SpectralField& theta0, double delta, const SolverConfig& cfg) {
  cfg.validate();
  const MollifierWeights weights = mollifier_weights(delta, cfg.dt);
  const std::size_t capacity = static_cast<std::size_t>(weights.first) + weights.weights.size() + 3;
  auto history = std::make_shared<StepHistory>(theta0.basis(), cfg.dt, capacity);

  SolverConfig linear = cfg;
  linear.nonlinear = false;
  Dynamics dyn = sqg_dynamics(linear);
  dyn.on_state = [history](const SpectralField& theta, double t) { history->push(theta, t); };
  if (cfg.nonlinear) {
    const double dt = cfg.dt;
    dyn.advection = [history, weights, dt](const SpectralField& theta, double t) {
      SpectralField lagged(theta.basis());
      for (std::size_t i = 0; i < weights.weights.size(); ++i) {
        const double tau_t = t - static_cast<double>(weights.first + static_cast<int>(i)) * dt;
        if (tau_t < -1e-9 * dt) continue;  // theta = 0 before the start
        lagged.axpy(weights.weights[i], history->at(tau_t));
      }
      if (lagged.is_zero()) return SpectralField(theta.basis());
      return advection_term(velocity(lagged), theta);
    };
  }
  return integrate(theta0, cfg, dyn, EnergyLaw{cfg.alpha, cfg.kappa});
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

PicardResult run_picard_inviscid(const SpectralField& theta0, const PicardOptions& opts, const SolverConfig& cfg) {
  cfg.validate();
  if (!(opts.kappa_visc > 0.0)) throw ConfigError("kappa_visc: must be > 0");
  if (!(opts.tol > 0.0)) throw ConfigError("tol: must be > 0");
  if (opts.max_iter < 1) throw ConfigError("max_iter: must be >= 1");
  const BasisPtr basis = theta0.basis();

  Dynamics base;
  base.decay.resize(basis->size());
  for (std::size_t j = 0; j < basis->size(); ++j) base.decay[j] = opts.kappa_visc * basis->lambda(j);
  const EnergyLaw law{1.0, opts.kappa_visc};

  auto proxy = [&](const StepHistory& h) {
    double worst = 0.0;
    for (const auto& [index, state] : h.states()) {
      worst = std::max(worst, lr_norm(frac_laplacian(state, 2.0), opts.proxy_p));
    }
    return worst;
  };

  PicardResult result;
  auto previous = std::make_shared<StepHistory>(basis, cfg.dt, 0);
  {
    Dynamics dyn = base;
    dyn.on_state = [previous](const SpectralField& theta, double t) { previous->push(theta, t); };
    RunResult r = integrate(theta0, cfg, dyn, law);
    result.trajectory = std::move(r.trajectory);
    result.rows = std::move(r.rows);
    if (r.blow_up) return result;
  }
  result.w2p_proxy.push_back(proxy(*previous));

  for (int n = 1; n <= opts.max_iter; ++n) {
    auto current = std::make_shared<StepHistory>(basis, cfg.dt, 0);
    Dynamics dyn = base;
    dyn.on_state = [current](const SpectralField& theta, double t) { current->push(theta, t); };
    dyn.advection = [previous](const SpectralField& theta, double t) {
      return advection_term(velocity(previous->at(t)), theta);
    };
    RunResult r = integrate(theta0, cfg, dyn, law);
    result.iterations = n;
    if (r.blow_up) {
      result.trajectory = std::move(r.trajectory);
      result.rows = std::move(r.rows);
      return result;
    }
    double residual = 0.0;
    const auto& a = current->states();
    const auto& b = previous->states();
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      residual = std::max(residual, sobolev_norm(a[i].second - b[i].second, 0.0));
    }
    result.residuals.push_back(residual);
    result.w2p_proxy.push_back(proxy(*current));
    result.trajectory = std::move(r.trajectory);
    result.rows = std::move(r.rows);
    previous = current;
    if (residual < opts.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

namespace {

struct BoundExceeded {};

SpectralField calibration_shape(const BasisPtr& basis, const CalibrationOptions& opts, int index) {
  std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(index));
  return with_sobolev_norm(random_field(basis, rng, opts.decay), 2.0, 1.0);
}

}  // namespace

bool keeps_h2_bounded_by_initial(const SpectralField& theta0, const SolverConfig& cfg, double rel_tol) {
  const double bound = (1.0 + rel_tol) * sobolev_norm(theta0, 2.0);
  Dynamics dyn = sqg_dynamics(cfg);
  dyn.on_state = [bound](const SpectralField& theta, double) {
    if (sobolev_norm(theta, 2.0) > bound) throw BoundExceeded{};
  };
  SolverConfig quiet = cfg;
  quiet.lr.clear();
  quiet.snapshot_stride = std::numeric_limits<int>::max();
  try {
    return integrate(theta0, quiet, dyn, EnergyLaw{cfg.alpha, cfg.kappa}).completed();
  } catch (const BoundExceeded&) {
    return false;
  }
}

ConstantCalibration calibrate_small_data_constant(const SolverConfig& base, const CalibrationOptions& opts) {
  base.validate();
  if (!(base.kappa > 0.0)) throw ConfigError("calibrate C: kappa must be > 0");
  const BasisPtr basis = build_basis(base.domain);
  ConstantCalibration out;
  double critical_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < opts.shapes; ++s) {
    const SpectralField shape = calibration_shape(basis, opts, s);
    auto passes = [&](double amplitude) { return keeps_h2_bounded_by_initial(amplitude * shape, base); };
    double lo = opts.lower * base.kappa;
    double hi = opts.upper * base.kappa;
    double critical = 0.0;
    if (passes(hi)) {
      critical = hi;
    } else if (!passes(lo)) {
      critical = lo;
    } else {
      while (hi - lo > opts.rel_tol * hi) {
        const double mid = std::sqrt(lo * hi);
        (passes(mid) ? lo : hi) = mid;
      }
      critical = lo;
    }
    out.per_shape.push_back(critical);
    critical_min = std::min(critical_min, critical);
  }
  out.constant = base.kappa / critical_min;
  std::ostringstream p;
  p << "bisection on ||theta0||_{2,D} over " << opts.shapes << " random shapes (seed " << opts.seed << ", decay "
    << opts.decay << "), J=" << base.domain.modes << ", alpha=" << base.alpha << ", kappa=" << base.kappa
    << ", T=" << base.T << ", dt=" << base.dt << ", scheme=" << to_string(base.scheme);
  out.provenance = p.str();
  return out;
}

ConstantCalibration calibrate_local_existence_constant(const SolverConfig& base, const CalibrationOptions& opts,
                                                       const std::vector<double>& amplitudes) {
  base.validate();
  if (!(base.kappa > 0.0)) throw ConfigError("calibrate M: kappa must be > 0");
  if (amplitudes.empty()) throw ConfigError("calibrate M: no amplitudes given");
  const BasisPtr basis = build_basis(base.domain);
  ConstantCalibration out;
  double largest = 0.0;
  double a_max = 0.0;
  for (int s = 0; s < opts.shapes; ++s) {
    const SpectralField shape = calibration_shape(basis, opts, s);
    for (double a : amplitudes) {
      a_max = std::max(a_max, a);
      const double limit2 = 2.0 * a * a;
      double first_exceed = -1.0;
      Dynamics dyn = sqg_dynamics(base);
      dyn.on_state = [&](const SpectralField& theta, double t) {
        const double h2 = sobolev_norm(theta, 2.0);
        if (h2 * h2 > limit2) {
          first_exceed = t;
          throw BoundExceeded{};
        }
      };
      SolverConfig quiet = base;
      quiet.lr.clear();
      quiet.snapshot_stride = std::numeric_limits<int>::max();
      bool blew_up = false;
      try {
        blew_up = !integrate(a * shape, quiet, dyn, EnergyLaw{base.alpha, base.kappa}).completed();
      } catch (const BoundExceeded&) {
      }
      double needed = 0.0;
      if (first_exceed > 0.0) needed = base.kappa / (first_exceed * a * a);
      if (blew_up) needed = std::numeric_limits<double>::infinity();
      out.per_shape.push_back(needed);
      largest = std::max(largest, needed);
    }
  }
  // Never predict a window longer than the observed horizon.
  out.constant = std::max(largest, base.kappa / (base.T * a_max * a_max));
  std::ostringstream p;
  p << "first time ||theta||_{2,D}^2 > 2||theta0||_{2,D}^2 over " << opts.shapes << " shapes x " << amplitudes.size()
    << " amplitudes (seed " << opts.seed << "), J=" << base.domain.modes << ", alpha=" << base.alpha
    << ", kappa=" << base.kappa << ", horizon T=" << base.T << ", dt=" << base.dt;
  out.provenance = p.str();
  return out;
}

}  // namespace sqg
