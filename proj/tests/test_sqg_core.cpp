#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"
#include "sqg/sqg_core.hpp"
#include "sqg/verification.hpp"
#include "support/oracles.hpp"

using namespace sqg;

namespace {

// gamma((1,1),(1,2),(2,1)) on (0,pi)^2; midpoint oracle with 256 cells, frozen.
constexpr double kGamma111221 = -0.3376186185589148;

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sqg_core_" + name);
}

}  // namespace

TEST(Velocity, ZeroAndFirstMode) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  const VelocityField z = velocity(SpectralField(b));
  EXPECT_EQ(z.u1.max_abs(), 0.0);
  EXPECT_EQ(z.u2.max_abs(), 0.0);

  const VelocityField u = velocity(SpectralField::unit(b, 0));
  EXPECT_NEAR(u.psi[0], 1.0 / std::sqrt(2.0), 1e-15);
  const double c = 2.0 / kPi / std::sqrt(2.0);
  const QuadratureGrid& q = b->grid();
  for (std::size_t i = 0; i < u.u1.nx(); ++i) {
    for (std::size_t k = 0; k < u.u1.ny(); ++k) {
      const double x = q.x.nodes[i];
      const double y = q.y.nodes[k];
      EXPECT_NEAR(u.u1.at(i, k), -c * std::sin(x) * std::cos(y), 1e-14);
      EXPECT_NEAR(u.u2.at(i, k), c * std::cos(x) * std::sin(y), 1e-14);
    }
  }
}

TEST(Velocity, DivergenceFreeWithZeroNormalTrace) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4, 1.3, 2.1));
  for (int i = 0; i < 5; ++i) {
    const SpectralField theta = oracle::gaussian_field(b, 50 + i);
    const VelocityField u = velocity(theta);
    const QuadratureGrid& q = b->grid();
    for (std::size_t ix = 0; ix < q.nx(); ++ix) {
      for (std::size_t iy = 0; iy < q.ny(); ++iy) {
        const double x = q.x.nodes[ix];
        const double y = q.y.nodes[iy];
        EXPECT_NEAR(u.u1.at(ix, iy), -oracle::evaluate(u.psi, x, y, 0, 1), 1e-12);
        EXPECT_NEAR(u.u2.at(ix, iy), oracle::evaluate(u.psi, x, y, 1, 0), 1e-12);
      }
    }
    const VelocityDefects d = velocity_defects(u);
    EXPECT_LE(d.divergence, 1e-10);
    EXPECT_LE(d.normal_trace, 1e-12);
  }
}

TEST(Nonlinear, SingleModeAndZeroVanish) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  EXPECT_LE(nonlinear_term(2.5 * SpectralField::unit(b, 0)).max_abs(), 1e-13);
  EXPECT_LE(nonlinear_term(-1.5 * SpectralField::unit(b, 5)).max_abs(), 1e-12);
  EXPECT_TRUE(nonlinear_term(SpectralField(b)).is_zero());
}

TEST(Nonlinear, OrthogonalToTheta) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(8));
  for (int i = 0; i < 10; ++i) {
    const SpectralField theta = oracle::gaussian_field(b, 70 + i);
    const SpectralField n = nonlinear_term(theta);
    EXPECT_NEAR(dot(theta, n), 0.0, 1e-11 * std::sqrt(dot(n, n) * dot(theta, theta)));
  }
}

TEST(Gamma, MatchesBruteForceOracle) {
  const DomainSpec d = DomainSpec::with_modes(3, 1.4, 0.9);
  const BasisPtr b = build_basis(d);
  const GammaTensor g = gamma_tensor(b);
  ASSERT_EQ(g.modes(), b->size());
  for (std::size_t j = 0; j < g.modes(); j += 2) {
    for (std::size_t k = 0; k < g.modes(); ++k) {
      for (std::size_t l = 0; l < g.modes(); l += 3) {
        EXPECT_NEAR(g.at(j, k, l), oracle::gamma_entry(d, b->mode(j), b->mode(k), b->mode(l), 32), 1e-11)
            << j << " " << k << " " << l;
      }
    }
  }
}

TEST(Gamma, FrozenRegressionEntry) {
  const DomainSpec d = DomainSpec::with_modes(2);
  EXPECT_NEAR(oracle::gamma_entry(d, {1, 1}, {1, 2}, {2, 1}, 256), kGamma111221, 1e-13);
  EXPECT_NEAR(kGamma111221, -3.0 / (2.0 * std::sqrt(2.0) * kPi), 1e-15);
  const BasisPtr b = build_basis(d);
  const GammaTensor g = gamma_tensor(b);
  const auto j = static_cast<std::size_t>(b->index_of({1, 1}));
  const auto k = static_cast<std::size_t>(b->index_of({1, 2}));
  const auto l = static_cast<std::size_t>(b->index_of({2, 1}));
  EXPECT_NEAR(g.at(j, k, l), kGamma111221, 1e-13);
}

TEST(Gamma, StructuralZeros) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  const GammaTensor g = gamma_tensor(b);
  EXPECT_LE(g.antisymmetry_defect(), 1e-12);
  for (std::size_t j = 0; j < g.modes(); ++j) {
    for (std::size_t k = 0; k < g.modes(); ++k) {
      EXPECT_LE(std::abs(g.at(j, k, k)), 1e-13);
      EXPECT_LE(std::abs(g.at(j, j, k)), 1e-13);
    }
  }
}

TEST(Gamma, ContractionMatchesPseudoSpectral) {
  for (int J : {3, 4}) {
    const BasisPtr b = build_basis(DomainSpec::with_modes(J, 1.2, 0.8));
    const GammaTensor g = gamma_tensor(b);
    EXPECT_TRUE(nonlinear_via_gamma(SpectralField(b), g).is_zero());
    EXPECT_LE(nonlinear_via_gamma(SpectralField::unit(b, 2), g).max_abs(), 1e-13);
    for (int i = 0; i < 5; ++i) {
      const SpectralField theta = oracle::gaussian_field(b, 90 + i);
      EXPECT_LE((nonlinear_term(theta) - nonlinear_via_gamma(theta, g)).max_abs(), 1e-10);
    }
  }
}

TEST(Gamma, MemoryGuard) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(9));
  EXPECT_THROW(gamma_tensor(b), ConfigError);
}

TEST(Gamma, CacheRoundTripAndHeaderMismatch) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(3));
  const GammaTensor g = gamma_tensor(b);
  const auto path = temp_path("gamma.bin");
  save_gamma(g, path);
  const GammaTensor back = load_gamma(path, b);
  ASSERT_EQ(back.entries().size(), g.entries().size());
  for (std::size_t i = 0; i < g.entries().size(); ++i) EXPECT_EQ(back.entries()[i], g.entries()[i]);
  EXPECT_THROW(load_gamma(path, build_basis(DomainSpec::with_modes(4))), FormatError);
  EXPECT_THROW(load_gamma(path, build_basis(DomainSpec::with_modes(3, 2.0, kPi))), FormatError);
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.put('x');
  }
  EXPECT_THROW(load_gamma(path, b), FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_gamma(path, b), IoError);
}

TEST(Rhs, ClosedFormsAndEnergyLaw) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(6));
  SolverConfig cfg;
  cfg.domain = b->domain();
  cfg.kappa = 0.0;
  EXPECT_LE(rhs(SpectralField::unit(b, 3), cfg).max_abs(), 1e-12);

  cfg.kappa = 1.0;
  cfg.alpha = 0.5;
  const SpectralField r = rhs(SpectralField::unit(b, 0), cfg);
  EXPECT_NEAR(r[0], -std::sqrt(2.0), 1e-13);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_NEAR(r[i], 0.0, 1e-13);

  cfg.kappa = 0.7;
  cfg.alpha = 0.8;
  for (int i = 0; i < 5; ++i) {
    const SpectralField theta = oracle::gaussian_field(b, 400 + i);
    const double h = sobolev_norm(theta, cfg.alpha);
    EXPECT_NEAR(dot(theta, rhs(theta, cfg)), -cfg.kappa * h * h, 1e-11 * std::max(1.0, h * h));
  }
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.alpha = 0.5;
  cfg.kappa = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.kappa = 1.0;
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.dt = 1e-3;
  cfg.path = NonlinearPath::gamma;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(parse_scheme("rk4_fully_explicit"), Scheme::rk4);
  EXPECT_EQ(parse_scheme(to_string(Scheme::imex_euler)), Scheme::imex_euler);
  EXPECT_THROW(parse_scheme("leapfrog"), ConfigError);
}
