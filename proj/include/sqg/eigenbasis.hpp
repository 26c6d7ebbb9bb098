#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace sqg {

inline constexpr double kPi = std::numbers::pi;

/// Rectangle (0,lx) x (0,ly) truncated to modes (j,k) in {1..modes}^2.
///
/// `quad` is the number of uniform intervals per axis; the grid carries
/// quad+1 nodes per axis including both boundary nodes.
struct DomainSpec {
  double lx = kPi;
  double ly = kPi;
  int modes = 8;
  int quad = 18;

  /// Smallest admissible grid for `modes`: 2*modes + 2 intervals.
  static DomainSpec with_modes(int modes, double lx = kPi, double ly = kPi);

  void validate() const;
  bool operator==(const DomainSpec&) const = default;
};

struct Mode {
  int j = 1;  // x wavenumber index
  int k = 1;  // y wavenumber index
  auto operator<=>(const Mode&) const = default;
};

/// One axis of the composite quadrature.
///
/// Nodes x_i = i*L/N, i = 0..N. `weights` is the trapezoid rule, exact for
/// cos(n*pi*x/L) with n < 2N; every Galerkin integrand (products of sines,
/// cosines and their derivatives with an even number of sine factors) is of
/// this type. `sine_weights` is the interpolatory rule on the interior nodes
/// exact for sin(n*pi*x/L), n < N, used for odd-parity integrands.
struct AxisRule {
  double length = kPi;
  int intervals = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> sine_weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] double integrate(std::span<const double> values) const;
  [[nodiscard]] double integrate_odd(std::span<const double> values) const;
};

AxisRule make_axis_rule(double length, int intervals);

struct QuadratureGrid {
  AxisRule x;
  AxisRule y;

  [[nodiscard]] std::size_t nx() const { return x.size(); }
  [[nodiscard]] std::size_t ny() const { return y.size(); }
  [[nodiscard]] std::size_t size() const { return nx() * ny(); }
  [[nodiscard]] std::size_t index(std::size_t ix, std::size_t iy) const { return ix * ny() + iy; }
  /// Tensor-product trapezoid integral of row-major grid values.
  [[nodiscard]] double integrate(std::span<const double> values) const;
};

QuadratureGrid quadrature_grid(const DomainSpec& domain);

/// Trigonometric family along one axis, used by the separable transforms.
enum class Trig { sine, cosine };

/// Dirichlet eigenpairs of the rectangle, sorted by eigenvalue with
/// lexicographic (j,k) tie-breaking. Immutable once built.
class EigenBasis {
 public:
  explicit EigenBasis(const DomainSpec& domain);

  [[nodiscard]] const DomainSpec& domain() const { return domain_; }
  [[nodiscard]] const QuadratureGrid& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return modes_.size(); }
  [[nodiscard]] int max_index() const { return domain_.modes; }
  [[nodiscard]] std::span<const Mode> modes() const { return modes_; }
  [[nodiscard]] std::span<const double> lambdas() const { return lambdas_; }
  [[nodiscard]] double lambda(std::size_t i) const { return lambdas_[i]; }
  [[nodiscard]] const Mode& mode(std::size_t i) const { return modes_[i]; }
  /// 2/sqrt(lx*ly).
  [[nodiscard]] double norm_const() const { return norm_const_; }
  /// Position of (j,k) in the sorted order, or -1 when outside the truncation.
  [[nodiscard]] std::ptrdiff_t index_of(Mode m) const;
  /// Wavenumber n*pi/L along x (axis 0) or y (axis 1).
  [[nodiscard]] double wavenumber(int axis, int n) const;

  /// Column table t[i*(modes+1) + n] = d^order/dx^order of trig(n*pi*x_i/L),
  /// n = 0..modes, for the nodes of `axis`.
  [[nodiscard]] std::vector<double> axis_table(int axis, Trig family, int order) const;
  /// Family produced by differentiating `family` `order` times.
  static Trig derived_family(Trig family, int order);

 private:
  DomainSpec domain_;
  QuadratureGrid grid_;
  std::vector<Mode> modes_;
  std::vector<double> lambdas_;
  std::vector<std::ptrdiff_t> lookup_;  // (j-1)*J + (k-1) -> position
  std::vector<double> sin_table_[2];    // [axis][i*(J+1) + n]
  std::vector<double> cos_table_[2];
  double norm_const_ = 0.0;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

BasisPtr build_basis(const DomainSpec& domain);

/// Coefficients of a field in an EigenBasis, aligned with `basis->modes()`.
class SpectralField {
 public:
  explicit SpectralField(BasisPtr basis);
  SpectralField(BasisPtr basis, std::vector<double> coeffs);

  static SpectralField unit(BasisPtr basis, std::size_t index);

  [[nodiscard]] const BasisPtr& basis() const { return basis_; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }
  [[nodiscard]] std::span<const double> coeffs() const { return coeffs_; }
  [[nodiscard]] std::span<double> coeffs() { return coeffs_; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] double max_abs() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);
  /// this += scale * other
  SpectralField& axpy(double scale, const SpectralField& other);

 private:
  BasisPtr basis_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Euclidean coefficient dot product (= L2 inner product).
double dot(const SpectralField& a, const SpectralField& b);

void require_same_basis(const SpectralField& a, const SpectralField& b);

/// Values on the closed quadrature grid of a basis, row-major (ix, iy).
class GridField {
 public:
  explicit GridField(BasisPtr basis);
  GridField(BasisPtr basis, std::vector<double> values);

  [[nodiscard]] const BasisPtr& basis() const { return basis_; }
  [[nodiscard]] std::size_t nx() const { return basis_->grid().nx(); }
  [[nodiscard]] std::size_t ny() const { return basis_->grid().ny(); }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }
  double& at(std::size_t ix, std::size_t iy) { return values_[ix * ny() + iy]; }
  [[nodiscard]] double at(std::size_t ix, std::size_t iy) const { return values_[ix * ny() + iy]; }

  [[nodiscard]] double max_abs() const;
  /// Quadrature integral of the values.
  [[nodiscard]] double integral() const;

 private:
  BasisPtr basis_;
  std::vector<double> values_;
};

/// Pointwise sum_j f_j w_j at the grid nodes.
GridField synthesize(const SpectralField& f);

/// Pointwise d^{dx}_x d^{dy}_y (sum_j f_j w_j), differentiated mode by mode.
GridField synthesize_derivative(const SpectralField& f, int dx, int dy);

/// f_j = quadrature of g * w_j.
SpectralField analyze(const GridField& g);

/// Coefficients of g against the unnormalized products
/// fx(n*pi*x/Lx) * fy(p*pi*y/Ly), n, p = 0..modes, laid out [n*(modes+1) + p].
/// Exact (up to round-off) whenever g*fx*fy has cosine parity in each axis.
std::vector<double> project_separable(const GridField& g, Trig fx, Trig fy);

/// Grid values of sum_{n,p} c[n,p] d^{ox} fx(n..x) d^{oy} fy(p..y) for a
/// (modes+1)^2 coefficient matrix in the layout of `project_separable`.
GridField expand_separable(const BasisPtr& basis, std::span<const double> c, Trig fx, int ox,
                           Trig fy, int oy);

/// Copies the coefficients of `f` into `target`, matching modes by (j,k).
/// Modes absent from `target` are dropped.
SpectralField reproject(const SpectralField& f, const BasisPtr& target);

}  // namespace sqg
