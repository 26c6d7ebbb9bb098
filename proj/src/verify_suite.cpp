#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>

#include "sqg/cli_harness.hpp"
#include "sqg/errors.hpp"
#include "sqg/spectral_ops.hpp"

namespace sqg::cli {

namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

SpectralField seeded_field(const BasisPtr& basis, std::uint64_t seed, double decay = 0.0) {
  std::mt19937_64 rng(seed);
  return random_field(basis, rng, decay);
}

void spectral_reports(std::vector<InequalityReport>& out, const VerifyOptions& opts) {
  {
    double worst = 0.0;
    int samples = 0;
    for (int J : {2, 4, 8}) {
      const BasisPtr b = build_basis(DomainSpec::with_modes(J));
      for (int i = 0; i < 20; ++i, ++samples) {
        const SpectralField f = seeded_field(b, opts.seed + 100 * J + i);
        const SpectralField back = analyze(synthesize(f));
        worst = std::max(worst, (back - f).max_abs());
      }
    }
    out.push_back(InequalityReport::make("spectral_round_trip", samples, -worst, 1e-12));
  }
  {
    const BasisPtr b = build_basis(DomainSpec::with_modes(6));
    const double lattice[][3] = {{0.0, 2.0, 0.5}, {0.5, 2.5, 0.3}, {1.0, 3.0, 0.75}, {0.0, 1.0, 0.2}};
    double worst = 0.0;
    int samples = 0;
    for (const auto& p : lattice) {
      for (int i = 0; i < 100; ++i, ++samples) {
        const SpectralField f = seeded_field(b, opts.seed + 1000 + static_cast<std::uint64_t>(samples));
        const double scale = sobolev_norm(f, p[2] * p[0] + (1.0 - p[2]) * p[1]);
        worst = std::min(worst, interpolation_slack(f, p[0], p[1], p[2]) / scale);
      }
    }
    out.push_back(InequalityReport::make("interpolation_slack", samples, worst, 1e-12));
  }
  {
    const BasisPtr b = build_basis(DomainSpec::with_modes(8));
    const VelocityField u = velocity(seeded_field(b, opts.seed + 2000));
    const double scale = std::max(1.0, std::max(u.u1.max_abs(), u.u2.max_abs()));
    InequalityReport r = check_velocity(u, 1e-10 * scale);
    r.name = "velocity_structure";
    out.push_back(std::move(r));
  }
}

GammaTensor mutated_gamma(const BasisPtr& basis, bool inject) {
  GammaTensor g = gamma_tensor(basis);
  if (inject) {
    // first j with a nonzero off-diagonal (k != l) entry
    const std::size_t m = g.modes();
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) {
          if (k != l && std::abs(g.at(j, k, l)) > 1e-3) {
            g.at(j, k, l) = -g.at(j, k, l);
            return g;
          }
        }
      }
    }
  }
  return g;
}

void galerkin_reports(std::vector<InequalityReport>& out, const VerifyOptions& opts) {
  const BasisPtr b = build_basis(DomainSpec::with_modes(4));
  const GammaTensor g = mutated_gamma(b, opts.inject_gamma_sign_error);
  const std::size_t m = g.modes();
  out.push_back(InequalityReport::make("gamma_antisymmetry", static_cast<int>(m * m * m), -g.antisymmetry_defect(), 1e-12));
  double diag = 0.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l) diag = std::max(diag, std::abs(g.at(j, j, l)));
  out.push_back(InequalityReport::make("gamma_diagonal", static_cast<int>(m * m), -diag, 1e-13));
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const SpectralField f = seeded_field(b, opts.seed + 3000 + i);
    worst = std::max(worst, (nonlinear_term(f) - nonlinear_via_gamma(f, g)).max_abs());
  }
  out.push_back(InequalityReport::make("nonlinear_paths", 20, -worst, 1e-10));
}

void energy_reports(std::vector<InequalityReport>& out, const VerifyOptions& opts) {
  const BasisPtr b4 = build_basis(DomainSpec::with_modes(4));
  const SpectralField theta4 = seeded_field(b4, opts.seed + 4000, 1.0);
  const double e0 = dot(theta4, theta4);
  for (NonlinearPath path : {NonlinearPath::gamma, NonlinearPath::pseudo_spectral}) {
    SolverConfig cfg;
    cfg.domain = b4->domain();
    cfg.kappa = 0.0;
    cfg.scheme = Scheme::rk4;
    cfg.T = 0.5;
    cfg.snapshot_stride = 1;
    cfg.lr.clear();
    cfg.path = path;
    if (path == NonlinearPath::gamma) {
      cfg.gamma = std::make_shared<const GammaTensor>(mutated_gamma(b4, opts.inject_gamma_sign_error));
    }
    const RunResult r = run(theta4, cfg);
    InequalityReport rep = energy_balance(r.rows, 0.0, 1e-8 * e0);
    rep.name = path == NonlinearPath::gamma ? "inviscid_energy_gamma_path" : "inviscid_energy_pseudo_spectral";
    rep.metadata["J"] = 4;
    out.push_back(std::move(rep));
  }
  {
    SolverConfig cfg;
    cfg.domain = b4->domain();
    cfg.T = 0.5;
    cfg.dt = 1e-3;
    cfg.snapshot_stride = 1;
    cfg.lr.clear();
    const RunResult coarse = run(theta4, cfg);
    cfg.dt = 5e-4;
    const RunResult fine = run(theta4, cfg);
    const EnergyConvergence conv = energy_balance_order(coarse.rows, fine.rows, cfg.kappa);
    out.push_back(InequalityReport::make("energy_identity_order", 2, conv.order - 1.99, 0.0,
                                         {{"order", conv.order}, {"coarse", conv.coarse}, {"fine", conv.fine}}));
  }
  {
    const BasisPtr b8 = build_basis(DomainSpec::with_modes(8));
    SolverConfig cfg;
    cfg.snapshot_stride = 1;
    cfg.lr.clear();
    const RunResult r = run(seeded_field(b8, opts.seed + 4100, 1.0), cfg);
    double worst = 0.0;
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
      worst = std::min(worst, (r.rows[k - 1].l2 - r.rows[k].l2) / r.rows.front().l2);
    }
    out.push_back(InequalityReport::make("l2_monotone", static_cast<int>(r.rows.size()), worst, 1e-9));
  }
}

void inequality_reports(std::vector<InequalityReport>& out, const VerifyOptions& opts) {
  {
    const BasisPtr b = build_basis(DomainSpec::with_modes(6));
    const BasisPtr check = cordoba_check_basis(*b);
    const double cases[][2] = {{4, 0.5}, {4, 1}, {4, 1.5}, {4, 2}, {6, 0.5}, {6, 1},
                               {6, 1.5}, {6, 2}, {2, 0.5}, {2, 1},  {3, 0.5}, {3, 1}};
    for (const auto& c : cases) {
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const CordobaSample s = cordoba_sample(seeded_field(b, opts.seed + 5000 + i), c[0], c[1], check);
        if (s.scale > 0.0) worst = std::min(worst, s.gap / s.scale);
      }
      out.push_back(InequalityReport::make(fmt("cordoba_r%g_s%g", c[0], c[1]), 20, worst, 1e-8,
                                           {{"r", c[0]}, {"s", c[1]}, {"check_factor", kCordobaCheckFactor}}));
    }
  }
  {
    const BasisPtr b = build_basis(DomainSpec::with_modes(8));
    const SpectralField theta0 = with_sobolev_norm(seeded_field(b, opts.seed + 6000, 2.0), 2.0, 1.0);
    for (const auto& [alpha, r] : {std::pair{0.75, 4.0}, std::pair{0.5, 2.0}}) {
      SolverConfig cfg;
      cfg.alpha = alpha;
      cfg.T = 2.0;
      cfg.lr = {r};
      const RunResult run_result = run(theta0, cfg);
      InequalityReport rep = lp_monotonicity(run_result.trajectory, r, alpha);
      rep.name = fmt("lp_monotonicity_alpha%g_r%g", alpha, r);
      out.push_back(std::move(rep));
    }
  }
  {
    const BasisPtr b = build_basis(DomainSpec::with_modes(6));
    double worst = 0.0;
    double peak = 0.0;
    for (int i = 0; i < 500; ++i) {
      const SpectralField f = seeded_field(b, opts.seed + 7000 + i);
      const double ratio = commutator_diagnostic(f, 0.5).ratio;
      peak = std::max(peak, ratio);
      if (i < 20) {
        for (double c : {0.1, 3.7}) {
          worst = std::max(worst, std::abs(commutator_diagnostic(c * f, 0.5).ratio - ratio) / ratio);
        }
      }
    }
    out.push_back(InequalityReport::make("commutator_homogeneity", 20, -worst, 1e-10));
    out.push_back(InequalityReport::make("commutator_envelope", 500, (kCommutatorRatioEnvelope - peak) / kCommutatorRatioEnvelope,
                                         0.0, {{"max_ratio", peak}, {"envelope", kCommutatorRatioEnvelope}}));
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"default", "spectral", "galerkin", "energy", "inequalities", "empty"};
  return names;
}

std::vector<InequalityReport> run_verify(const std::string& suite, const VerifyOptions& opts) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw ConfigError("suite: unknown suite '" + suite + "'");
  }
  std::vector<InequalityReport> out;
  const bool all = suite == "default";
  if (all || suite == "spectral") spectral_reports(out, opts);
  if (all || suite == "galerkin") galerkin_reports(out, opts);
  if (all || suite == "energy") energy_reports(out, opts);
  if (all || suite == "inequalities") inequality_reports(out, opts);
  return out;
}

}  // namespace sqg::cli
