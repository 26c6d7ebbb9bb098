#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sqg/eigenbasis.hpp"

namespace sqg {

/// u = grad^perp psi with psi = Lambda^{-1} theta, sampled on the grid.
struct VelocityField {
  SpectralField psi;
  GridField u1;  // -d_y psi
  GridField u2;  //  d_x psi
};

/// Builds (u1, u2) from a stream function by termwise differentiation.
VelocityField velocity_from_stream(const SpectralField& psi);

/// Constitutive law u = grad^perp Lambda^{-1} theta.
VelocityField velocity(const SpectralField& theta);

/// P_m (u . grad theta) for a given velocity. `u` is used at full grid
/// resolution; only the product is projected.
SpectralField advection_term(const VelocityField& u, const SpectralField& theta);

/// P_m (u . grad theta) with u = velocity(theta), pseudo-spectral path.
SpectralField nonlinear_term(const SpectralField& theta);

/// Dense Galerkin interaction coefficients
/// gamma[j][k][l] = lambda_j^{-1/2} int (grad^perp w_j . grad w_k) w_l.
class GammaTensor {
 public:
  GammaTensor(BasisPtr basis, std::vector<double> entries);

  [[nodiscard]] const BasisPtr& basis() const { return basis_; }
  [[nodiscard]] std::size_t modes() const { return m_; }
  [[nodiscard]] double at(std::size_t j, std::size_t k, std::size_t l) const { return data_[(j * m_ + k) * m_ + l]; }
  double& at(std::size_t j, std::size_t k, std::size_t l) { return data_[(j * m_ + k) * m_ + l]; }
  [[nodiscard]] std::span<const double> entries() const { return data_; }

  /// max |gamma[j][k][l] + gamma[j][l][k]|
  [[nodiscard]] double antisymmetry_defect() const;

 private:
  BasisPtr basis_;
  std::size_t m_ = 0;
  std::vector<double> data_;
};

/// Default memory guard for `gamma_tensor` (m^3 doubles at J = 8 is 2 MiB).
inline constexpr int kGammaMaxModes = 8;

GammaTensor gamma_tensor(const BasisPtr& basis, bool allow_large = false);

/// l-th entry: sum_{j,k} gamma[j][k][l] theta_j theta_k.
SpectralField nonlinear_via_gamma(const SpectralField& theta, const GammaTensor& gamma);

/// Writes the gamma cache: magic, format version, J, Nquad, Lx, Ly and the
/// row-major entries, all little-endian.
void save_gamma(const GammaTensor& gamma, const std::filesystem::path& path);
/// Loads a cache written by `save_gamma`; throws FormatError unless the
/// header matches `basis` exactly.
GammaTensor load_gamma(const std::filesystem::path& path, const BasisPtr& basis);

inline constexpr std::uint32_t kGammaFormatVersion = 1;

enum class Scheme { etdrk2, imex_euler, rk4 };
enum class NonlinearPath { pseudo_spectral, gamma };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct SolverConfig {
  DomainSpec domain = DomainSpec::with_modes(8);
  double alpha = 0.5;
  double kappa = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::etdrk2;
  int snapshot_stride = 10;
  std::uint64_t seed = 0;
  /// Lr exponents reported in diagnostics rows.
  std::vector<double> lr = {4.0};
  /// Switches the advection term off (pure fractional heat flow).
  bool nonlinear = true;
  NonlinearPath path = NonlinearPath::pseudo_spectral;
  /// Required when path == gamma.
  std::shared_ptr<const GammaTensor> gamma;

  void validate() const;
};

/// -P(u.grad theta) - kappa Lambda^{2 alpha} theta.
SpectralField rhs(const SpectralField& theta, const SolverConfig& cfg);

/// The configured advection term alone (zero when cfg.nonlinear is false).
SpectralField configured_nonlinearity(const SpectralField& theta, const SolverConfig& cfg);

}  // namespace sqg
