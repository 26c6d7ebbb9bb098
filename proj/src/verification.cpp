#include "sqg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"

namespace sqg {

InequalityReport InequalityReport::make(std::string name, int samples, double worst, double tolerance,
                                        std::map<std::string, double> metadata) {
  InequalityReport r;
  r.name = std::move(name);
  r.samples = samples;
  r.worst_violation = worst;
  r.tolerance = tolerance;
  r.pass = worst >= -tolerance;
  r.metadata = std::move(metadata);
  return r;
}

// ---------------------------------------------------------------------------
// Cordoba-Cordoba
// ---------------------------------------------------------------------------

BasisPtr cordoba_check_basis(const EigenBasis& basis, int factor) {
  if (factor < 1) throw ConfigError("cordoba_check_basis: factor must be >= 1");
  const DomainSpec& d = basis.domain();
  return build_basis(DomainSpec::with_modes(factor * d.modes, d.lx, d.ly));
}

namespace {

void require_cordoba_branch(double r, double s) {
  if (!(r >= 2.0)) throw DomainError("cordoba: r must be >= 2");
  if (!(s >= 0.0)) throw DomainError("cordoba: s must be >= 0");
  if (r >= 4.0) {
    if (s > 2.0) throw DomainError("cordoba: s must lie in [0,2]");
  } else if (s > 1.0) {
    throw DomainError("cordoba: r in [2,4) only admits s in [0,1]");
  }
}

}  // namespace

CordobaSample cordoba_sample(const SpectralField& f, double r, double s, const BasisPtr& check_basis) {
  require_cordoba_branch(r, s);
  const SpectralField fc = reproject(f, check_basis);
  const GridField values = synthesize(fc);
  const GridField lsf = synthesize(frac_laplacian(fc, s));
  const double p = 0.5 * r;

  GridField phi(check_basis);
  std::vector<double> dphi(values.values().size());
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    const double z = values.values()[i];
    const double a = std::abs(z);
    phi.values()[i] = std::pow(a, p);
    dphi[i] = z == 0.0 ? 0.0 : std::copysign(p * std::pow(a, p - 1.0), z);
  }
  // Lambda^0 is the identity; no projection of Phi(f) is involved.
  const GridField lsphi = s == 0.0 ? phi : synthesize(frac_laplacian(analyze(phi), s));

  CordobaSample out;
  out.gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    const double first = dphi[i] * lsf.values()[i];
    out.scale = std::max(out.scale, std::abs(first));
    out.gap = std::min(out.gap, first - lsphi.values()[i]);
  }
  return out;
}

double cordoba_gap(const SpectralField& f, double r, double s, int check_factor) {
  return cordoba_sample(f, r, s, cordoba_check_basis(*f.basis(), check_factor)).gap;
}

// ---------------------------------------------------------------------------
// Lp monotonicity
// ---------------------------------------------------------------------------

InequalityReport lp_monotonicity(const Trajectory& traj, double r, double alpha, double tol) {
  if (alpha > 0.5 && !(r >= 4.0)) throw DomainError("lp_monotonicity: alpha > 1/2 requires r >= 4");
  if (!(r >= 2.0)) throw DomainError("lp_monotonicity: r must be >= 2");
  std::vector<double> norms;
  norms.reserve(traj.snapshots.size());
  for (const SpectralField& s : traj.snapshots) norms.push_back(lr_norm(s, r));
  double worst = 0.0;
  if (!norms.empty()) {
    const double ref = norms.front() > 0.0 ? norms.front() : 1.0;
    double running_min = norms.front();
    for (std::size_t k = 1; k < norms.size(); ++k) {
      worst = std::min(worst, (running_min - norms[k]) / ref);
      running_min = std::min(running_min, norms[k]);
    }
  }
  return InequalityReport::make("lp_monotonicity", static_cast<int>(norms.size()), worst, tol,
                                {{"r", r}, {"alpha", alpha}, {"L_r(0)", norms.empty() ? 0.0 : norms.front()}});
}

// ---------------------------------------------------------------------------
// Commutator
// ---------------------------------------------------------------------------

CommutatorRecord commutator_diagnostic(const SpectralField& theta, double alpha) {
  if (theta.is_zero()) throw DomainError("commutator_diagnostic: zero field");
  const SpectralField psi = frac_laplacian(theta, -1.0);
  SpectralField lap_psi = frac_laplacian(psi, 2.0);
  lap_psi *= -1.0;

  const GridField lap_u1 = synthesize_derivative(lap_psi, 0, 1);  // negated below
  const GridField lap_u2 = synthesize_derivative(lap_psi, 1, 0);
  const GridField pxx = synthesize_derivative(psi, 2, 0);
  const GridField pxy = synthesize_derivative(psi, 1, 1);
  const GridField pyy = synthesize_derivative(psi, 0, 2);
  const GridField tx = synthesize_derivative(theta, 1, 0);
  const GridField ty = synthesize_derivative(theta, 0, 1);
  const GridField txx = synthesize_derivative(theta, 2, 0);
  const GridField txy = synthesize_derivative(theta, 1, 1);
  const GridField tyy = synthesize_derivative(theta, 0, 2);

  GridField sq(theta.basis());
  for (std::size_t i = 0; i < sq.values().size(); ++i) {
    // u1 = -psi_y, u2 = psi_x
    const double d1u1 = -pxy.values()[i];
    const double d2u1 = -pyy.values()[i];
    const double d1u2 = pxx.values()[i];
    const double d2u2 = pxy.values()[i];
    const double v = -lap_u1.values()[i] * tx.values()[i] + lap_u2.values()[i] * ty.values()[i] +
                     2.0 * (d1u1 * txx.values()[i] + d2u1 * txy.values()[i] + d1u2 * txy.values()[i] +
                            d2u2 * tyy.values()[i]);
    sq.values()[i] = v * v;
  }
  CommutatorRecord rec;
  rec.lhs = std::sqrt(std::max(0.0, sq.integral()));
  rec.A = sobolev_norm(theta, 2.0);
  rec.B = sobolev_norm(theta, 2.0 + alpha);
  rec.L2 = sobolev_norm(theta, 0.0);
  rec.ratio = rec.lhs / (rec.B * std::pow(rec.A, 0.5 * (2.0 - alpha)) * std::pow(rec.L2, 0.5 * alpha));
  return rec;
}

// ---------------------------------------------------------------------------
// Velocity checks
// ---------------------------------------------------------------------------

namespace {

// Turns unnormalized products int g fx fy into expansion coefficients.
void normalize_projection(std::vector<double>& c, const EigenBasis& basis, Trig fx, Trig fy) {
  const int J = basis.max_index();
  const double lx = basis.domain().lx;
  const double ly = basis.domain().ly;
  auto norm = [](Trig family, int n, double length) {
    if (family == Trig::sine) return n == 0 ? 0.0 : 0.5 * length;
    return n == 0 ? length : 0.5 * length;
  };
  for (int n = 0; n <= J; ++n) {
    for (int p = 0; p <= J; ++p) {
      const double d = norm(fx, n, lx) * norm(fy, p, ly);
      double& v = c[static_cast<std::size_t>(n * (J + 1) + p)];
      v = d == 0.0 ? 0.0 : v / d;
    }
  }
}

}  // namespace

VelocityDefects velocity_defects(const VelocityField& u) {
  const BasisPtr& basis = u.u1.basis();
  std::vector<double> c1 = project_separable(u.u1, Trig::sine, Trig::cosine);
  std::vector<double> c2 = project_separable(u.u2, Trig::cosine, Trig::sine);
  normalize_projection(c1, *basis, Trig::sine, Trig::cosine);
  normalize_projection(c2, *basis, Trig::cosine, Trig::sine);
  const GridField d1 = expand_separable(basis, c1, Trig::sine, 1, Trig::cosine, 0);
  const GridField d2 = expand_separable(basis, c2, Trig::cosine, 0, Trig::sine, 1);

  VelocityDefects out;
  for (std::size_t i = 0; i < d1.values().size(); ++i) {
    out.divergence = std::max(out.divergence, std::abs(d1.values()[i] + d2.values()[i]));
  }
  const std::size_t nx = u.u1.nx();
  const std::size_t ny = u.u1.ny();
  for (std::size_t iy = 0; iy < ny; ++iy) {
    out.normal_trace = std::max({out.normal_trace, std::abs(u.u1.at(0, iy)), std::abs(u.u1.at(nx - 1, iy))});
  }
  for (std::size_t ix = 0; ix < nx; ++ix) {
    out.normal_trace = std::max({out.normal_trace, std::abs(u.u2.at(ix, 0)), std::abs(u.u2.at(ix, ny - 1))});
  }
  return out;
}

InequalityReport check_velocity(const VelocityField& u, double tol) {
  const VelocityDefects d = velocity_defects(u);
  return InequalityReport::make("velocity", static_cast<int>(u.u1.values().size()),
                                -std::max(d.divergence, d.normal_trace), tol,
                                {{"divergence", d.divergence}, {"normal_trace", d.normal_trace}});
}

// ---------------------------------------------------------------------------
// Energy balance
// ---------------------------------------------------------------------------

std::vector<double> energy_residuals(const std::vector<DiagnosticsRow>& rows, double kappa) {
  std::vector<double> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const DiagnosticsRow& a = rows[k - 1];
    const DiagnosticsRow& b = rows[k];
    const double span = b.t - a.t;
    if (!(span > 0.0)) throw ShapeError("energy_residuals: rows are not strictly increasing in time");
    out.push_back(0.5 * (b.l2 * b.l2 - a.l2 * a.l2) / span +
                  kappa * 0.5 * (a.halpha * a.halpha + b.halpha * b.halpha));
  }
  return out;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

InequalityReport energy_balance(const std::vector<DiagnosticsRow>& rows, double kappa, double tol) {
  const std::vector<double> res = energy_residuals(rows, kappa);
  return InequalityReport::make("energy_balance", static_cast<int>(res.size()), -max_abs(res), tol,
                                {{"kappa", kappa}});
}

EnergyConvergence energy_balance_order(const std::vector<DiagnosticsRow>& coarse,
                                       const std::vector<DiagnosticsRow>& fine, double kappa) {
  if (coarse.size() < 2 || fine.size() < 2) throw ShapeError("energy_balance_order: need at least two rows per run");
  const double span = coarse.back().t - coarse.front().t;
  if (std::abs(coarse.front().t - fine.front().t) > 1e-12 * std::max(1.0, span) ||
      std::abs(coarse.back().t - fine.back().t) > 1e-12 * std::max(1.0, span)) {
    throw ShapeError("energy_balance_order: runs cover different intervals");
  }
  EnergyConvergence out;
  out.coarse = max_abs(energy_residuals(coarse, kappa));
  out.fine = max_abs(energy_residuals(fine, kappa));
  out.order = out.fine > 0.0 ? std::log2(out.coarse / out.fine) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace sqg
