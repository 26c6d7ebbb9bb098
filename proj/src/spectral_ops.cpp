#include "sqg/spectral_ops.hpp"

#include <cmath>
#include <string>

#include "sqg/errors.hpp"

namespace sqg {

SpectralField frac_laplacian(const SpectralField& f, double s) {
  if (!std::isfinite(s) || s < -1.0) {
    throw DomainError("frac_laplacian: exponent must be >= -1, got " + std::to_string(s));
  }
  SpectralField out = f;
  if (s == 0.0) return out;
  const auto lambdas = f.basis()->lambdas();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(lambdas[i], 0.5 * s);
  return out;
}

double sobolev_norm(const SpectralField& f, double s) {
  if (!std::isfinite(s) || s < 0.0) throw DomainError("sobolev_norm: exponent must be >= 0, got " + std::to_string(s));
  const auto lambdas = f.basis()->lambdas();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = s == 0.0 ? 1.0 : std::pow(lambdas[i], s);
    sum += w * f[i] * f[i];
  }
  return std::sqrt(sum);
}

double interpolation_slack(const SpectralField& f, double alpha1, double alpha2, double mu) {
  if (alpha1 < 0.0 || alpha2 < 0.0) throw DomainError("interpolation_slack: exponents must be >= 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("interpolation_slack: mu must lie in [0,1]");
  if (f.is_zero()) throw DomainError("interpolation_slack: undefined for the zero field");
  const double alpha = mu * alpha1 + (1.0 - mu) * alpha2;
  const double n1 = sobolev_norm(f, alpha1);
  const double n2 = sobolev_norm(f, alpha2);
  const double n = sobolev_norm(f, alpha);
  return std::pow(n1, mu) * std::pow(n2, 1.0 - mu) - n;
}

SpectralField truncate(const SpectralField& f, int cutoff) {
  const EigenBasis& b = *f.basis();
  if (cutoff > b.max_index()) {
    throw DomainError("truncate: cutoff " + std::to_string(cutoff) + " exceeds J = " + std::to_string(b.max_index()));
  }
  if (cutoff < 0) throw DomainError("truncate: negative cutoff");
  SpectralField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Mode& m = b.mode(i);
    if (m.j > cutoff || m.k > cutoff) out[i] = 0.0;
  }
  return out;
}

SpectralField random_field(const BasisPtr& basis, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(basis);
  const double l1 = basis->lambda(0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = normal(rng) * std::pow(basis->lambda(i) / l1, -0.5 * decay);
  }
  return f;
}

SpectralField with_sobolev_norm(SpectralField f, double s, double target) {
  const double n = sobolev_norm(f, s);
  if (n == 0.0) throw DomainError("with_sobolev_norm: cannot rescale the zero field");
  f *= target / n;
  return f;
}

}  // namespace sqg
