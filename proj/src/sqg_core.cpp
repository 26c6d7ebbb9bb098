#include "sqg/sqg_core.hpp"

#include <algorithm>
#include <cmath>

#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"

namespace sqg {

VelocityField velocity_from_stream(const SpectralField& psi) {
  GridField u1 = synthesize_derivative(psi, 0, 1);
  for (double& v : u1.values()) v = -v;
  GridField u2 = synthesize_derivative(psi, 1, 0);
  return VelocityField{psi, std::move(u1), std::move(u2)};
}

VelocityField velocity(const SpectralField& theta) { return velocity_from_stream(frac_laplacian(theta, -1.0)); }

namespace {

void require_exact_products(const EigenBasis& basis) {
  // u . grad theta * w_l has trigonometric degree <= 3J per axis.
  const DomainSpec& d = basis.domain();
  if (3 * d.modes >= 2 * d.quad) {
    throw ConfigError("advection: Nquad = " + std::to_string(d.quad) + " too small for exact triple products at J = " +
                      std::to_string(d.modes));
  }
}

}  // namespace

SpectralField advection_term(const VelocityField& u, const SpectralField& theta) {
  if (u.u1.basis() != theta.basis() && !(u.u1.basis()->domain() == theta.basis()->domain())) {
    throw ShapeError("advection_term: velocity and scalar live on different grids");
  }
  require_exact_products(*theta.basis());
  const GridField tx = synthesize_derivative(theta, 1, 0);
  const GridField ty = synthesize_derivative(theta, 0, 1);
  GridField product(theta.basis());
  auto out = product.values();
  const auto a = u.u1.values();
  const auto b = u.u2.values();
  const auto gx = tx.values();
  const auto gy = ty.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * gx[i] + b[i] * gy[i];
  return analyze(product);
}

SpectralField nonlinear_term(const SpectralField& theta) { return advection_term(velocity(theta), theta); }

// ---------------------------------------------------------------------------
// Gamma tensor
// ---------------------------------------------------------------------------

GammaTensor::GammaTensor(BasisPtr basis, std::vector<double> entries)
    : basis_(std::move(basis)), m_(basis_->size()), data_(std::move(entries)) {
  if (data_.size() != m_ * m_ * m_) throw ShapeError("GammaTensor: expected m^3 entries");
}

double GammaTensor::antisymmetry_defect() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < m_; ++j)
    for (std::size_t k = 0; k < m_; ++k)
      for (std::size_t l = k; l < m_; ++l) worst = std::max(worst, std::abs(at(j, k, l) + at(j, l, k)));
  return worst;
}

GammaTensor gamma_tensor(const BasisPtr& basis, bool allow_large) {
  if (basis->max_index() > kGammaMaxModes && !allow_large) {
    throw ConfigError("gamma_tensor: J = " + std::to_string(basis->max_index()) + " exceeds the memory guard J <= " +
                      std::to_string(kGammaMaxModes) + " (pass allow_large to override)");
  }
  require_exact_products(*basis);
  const std::size_t m = basis->size();
  std::vector<GridField> dx;
  std::vector<GridField> dy;
  dx.reserve(m);
  dy.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const SpectralField e = SpectralField::unit(basis, i);
    dx.push_back(synthesize_derivative(e, 1, 0));
    dy.push_back(synthesize_derivative(e, 0, 1));
  }
  std::vector<double> entries(m * m * m, 0.0);
  GridField product(basis);
  auto out = product.values();
  for (std::size_t j = 0; j < m; ++j) {
    const double scale = 1.0 / std::sqrt(basis->lambda(j));
    const auto wx = dx[j].values();
    const auto wy = dy[j].values();
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;  // grad^perp w . grad w = 0 identically
      const auto vx = dx[k].values();
      const auto vy = dy[k].values();
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * (-wy[i] * vx[i] + wx[i] * vy[i]);
      const SpectralField row = analyze(product);
      std::copy(row.coeffs().begin(), row.coeffs().end(), entries.begin() + static_cast<std::ptrdiff_t>((j * m + k) * m));
    }
  }
  GammaTensor gamma(basis, std::move(entries));
  const double scale = std::max(1.0, *std::max_element(gamma.entries().begin(), gamma.entries().end(),
                                                       [](double a, double b) { return std::abs(a) < std::abs(b); }));
  if (gamma.antisymmetry_defect() > 1e-12 * scale) {
    throw std::logic_error("gamma_tensor: antisymmetry in (k,l) violated; quadrature is not exact");
  }
  return gamma;
}

SpectralField nonlinear_via_gamma(const SpectralField& theta, const GammaTensor& gamma) {
  if (theta.size() != gamma.modes()) throw ShapeError("nonlinear_via_gamma: tensor does not match field");
  const std::size_t m = gamma.modes();
  std::vector<double> out(m, 0.0);
  const auto g = gamma.entries();
  for (std::size_t j = 0; j < m; ++j) {
    if (theta[j] == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k) {
      const double w = theta[j] * theta[k];
      if (w == 0.0) continue;
      const double* row = g.data() + (j * m + k) * m;
      for (std::size_t l = 0; l < m; ++l) out[l] += row[l] * w;
    }
  }
  return SpectralField(theta.basis(), std::move(out));
}

// ---------------------------------------------------------------------------
// Configuration and right-hand side
// ---------------------------------------------------------------------------

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::etdrk2: return "etdrk2";
    case Scheme::imex_euler: return "imex_euler";
    case Scheme::rk4: return "rk4_fully_explicit";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "etdrk2") return Scheme::etdrk2;
  if (name == "imex_euler") return Scheme::imex_euler;
  if (name == "rk4_fully_explicit" || name == "rk4") return Scheme::rk4;
  throw ConfigError("scheme: unknown scheme '" + name + "' (expected etdrk2, imex_euler, rk4_fully_explicit)");
}

void SolverConfig::validate() const {
  domain.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha: must lie in (0,1], got " + std::to_string(alpha));
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa: must be >= 0, got " + std::to_string(kappa));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be > 0, got " + std::to_string(dt));
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T: must be > 0, got " + std::to_string(T));
  if (dt > T) throw ConfigError("dt: must not exceed T");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride: must be >= 1");
  for (double r : lr) {
    if (!(r >= 1.0)) throw ConfigError("lr: exponents must be >= 1");
  }
  if (path == NonlinearPath::gamma) {
    if (!gamma) throw ConfigError("nonlinearity: gamma path selected without a tensor");
    if (!(gamma->basis()->domain() == domain)) throw ConfigError("nonlinearity: gamma tensor built for another domain");
  }
}

SpectralField configured_nonlinearity(const SpectralField& theta, const SolverConfig& cfg) {
  if (!cfg.nonlinear) return SpectralField(theta.basis());
  if (cfg.path == NonlinearPath::gamma) return nonlinear_via_gamma(theta, *cfg.gamma);
  return nonlinear_term(theta);
}

SpectralField rhs(const SpectralField& theta, const SolverConfig& cfg) {
  SpectralField out = configured_nonlinearity(theta, cfg);
  out *= -1.0;
  if (cfg.kappa != 0.0) out.axpy(-cfg.kappa, frac_laplacian(theta, 2.0 * cfg.alpha));
  return out;
}

}  // namespace sqg
