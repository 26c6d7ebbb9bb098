#pragma once

#include <map>
#include <string>
#include <vector>

#include "sqg/eigenbasis.hpp"
#include "sqg/sqg_core.hpp"
#include "sqg/timestepping.hpp"

namespace sqg {

/// Outcome of one inequality check. `worst_violation` is the smallest value
/// of the quantity that must stay nonnegative; pass <=> worst >= -tolerance.
struct InequalityReport {
  std::string name;
  int samples = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::map<std::string, double> metadata;

  static InequalityReport make(std::string name, int samples, double worst, double tolerance,
                               std::map<std::string, double> metadata = {});
};

/// Enlargement of the basis used to project Phi(f) in the Cordoba-Cordoba check.
inline constexpr int kCordobaCheckFactor = 4;

/// Check basis for `f`'s domain with factor*J modes per axis.
BasisPtr cordoba_check_basis(const EigenBasis& basis, int factor = kCordobaCheckFactor);

struct CordobaSample {
  double gap = 0.0;    // min over check-grid nodes of Phi'(f) Lambda^s f - Lambda^s Phi(f)
  double scale = 0.0;  // max |Phi'(f) Lambda^s f|
};

/// Phi(z) = |z|^{r/2}. r >= 4 admits s in [0,2]; r in [2,4) (C^1 branch)
/// admits s in [0,1]. Anything else is a DomainError.
CordobaSample cordoba_sample(const SpectralField& f, double r, double s, const BasisPtr& check_basis);
double cordoba_gap(const SpectralField& f, double r, double s, int check_factor = kCordobaCheckFactor);

/// Lr norms along `traj` must not exceed any earlier value by more than
/// tol * Lr(0). Branch rule: alpha > 1/2 needs r >= 4, otherwise r >= 2.
InequalityReport lp_monotonicity(const Trajectory& traj, double r, double alpha, double tol = 1e-6);

struct CommutatorRecord {
  double lhs = 0.0;  // || Delta u . grad theta + 2 grad u : grad grad theta ||_{L2}
  double A = 0.0;    // ||theta||_{2,D}
  double B = 0.0;    // ||theta||_{2+alpha,D}
  double L2 = 0.0;
  double ratio = 0.0;  // lhs / (B A^{(2-alpha)/2} L2^{alpha/2})
};

CommutatorRecord commutator_diagnostic(const SpectralField& theta, double alpha);

/// 1.1 x the largest ratio over 500 N(0,1) fields, J = 6, alpha = 1/2, seeds 27240..27739.
inline constexpr double kCommutatorRatioEnvelope = 0.019197736830124479;

struct VelocityDefects {
  double divergence = 0.0;    // grid max of div u after projection on the
                              // sin-cos / cos-sin families of u1 / u2
  double normal_trace = 0.0;  // max |u . n| on the boundary nodes
};

VelocityDefects velocity_defects(const VelocityField& u);
InequalityReport check_velocity(const VelocityField& u, double tol = 1e-10);

/// residual_k = 1/2 (L2_{k+1}^2 - L2_k^2)/dt_k + kappa (Halpha_k^2 + Halpha_{k+1}^2)/2
std::vector<double> energy_residuals(const std::vector<DiagnosticsRow>& rows, double kappa);
InequalityReport energy_balance(const std::vector<DiagnosticsRow>& rows, double kappa, double tol);

struct EnergyConvergence {
  double coarse = 0.0;  // max |residual| at dt
  double fine = 0.0;    // max |residual| at dt/2
  double order = 0.0;   // log2(coarse / fine)
};

/// Observed order of the energy residual from runs at dt and dt/2 covering
/// the same interval.
EnergyConvergence energy_balance_order(const std::vector<DiagnosticsRow>& coarse,
                                       const std::vector<DiagnosticsRow>& fine, double kappa);

}  // namespace sqg
