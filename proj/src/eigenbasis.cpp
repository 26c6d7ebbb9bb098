#include "sqg/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sqg/errors.hpp"

namespace sqg {

DomainSpec DomainSpec::with_modes(int modes, double lx, double ly) {
  return DomainSpec{lx, ly, modes, 2 * modes + 2};
}

void DomainSpec::validate() const {
  if (!(std::isfinite(lx) && lx > 0.0)) throw ConfigError("domain: Lx must be positive, got " + std::to_string(lx));
  if (!(std::isfinite(ly) && ly > 0.0)) throw ConfigError("domain: Ly must be positive, got " + std::to_string(ly));
  if (modes < 1) throw ConfigError("domain: J must be >= 1, got " + std::to_string(modes));
  if (quad < 2 * modes + 2) {
    throw ConfigError("domain: Nquad must be >= 2J+2 = " + std::to_string(2 * modes + 2) + ", got " +
                      std::to_string(quad));
  }
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

AxisRule make_axis_rule(double length, int intervals) {
  if (intervals < 2) throw ConfigError("quadrature: need at least 2 intervals");
  AxisRule rule;
  rule.length = length;
  rule.intervals = intervals;
  const auto n_nodes = static_cast<std::size_t>(intervals) + 1;
  const double h = length / intervals;
  rule.nodes.resize(n_nodes);
  rule.weights.assign(n_nodes, h);
  rule.weights.front() = rule.weights.back() = 0.5 * h;
  for (std::size_t i = 0; i < n_nodes; ++i) rule.nodes[i] = static_cast<double>(i) * h;

  // Interpolatory sine rule: sum_i w_i sin(n pi i/N) = int_0^L sin(n pi x/L) dx
  // for n = 1..N-1, solved through DST-I orthogonality.
  rule.sine_weights.assign(n_nodes, 0.0);
  for (int i = 1; i < intervals; ++i) {
    double w = 0.0;
    for (int n = 1; n < intervals; n += 2) {  // even n integrate to zero
      w += std::sin(kPi * n * i / intervals) * 2.0 * length / (n * kPi);
    }
    rule.sine_weights[static_cast<std::size_t>(i)] = 2.0 / intervals * w;
  }
  return rule;
}

double AxisRule::integrate(std::span<const double> values) const {
  if (values.size() != nodes.size()) throw ShapeError("quadrature: value count does not match nodes");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
  return s;
}

double AxisRule::integrate_odd(std::span<const double> values) const {
  if (values.size() != nodes.size()) throw ShapeError("quadrature: value count does not match nodes");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += sine_weights[i] * values[i];
  return s;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
  if (values.size() != size()) throw ShapeError("quadrature: grid size mismatch");
  double s = 0.0;
  for (std::size_t ix = 0; ix < nx(); ++ix) {
    double row = 0.0;
    for (std::size_t iy = 0; iy < ny(); ++iy) row += y.weights[iy] * values[index(ix, iy)];
    s += x.weights[ix] * row;
  }
  return s;
}

QuadratureGrid quadrature_grid(const DomainSpec& domain) {
  domain.validate();
  return QuadratureGrid{make_axis_rule(domain.lx, domain.quad), make_axis_rule(domain.ly, domain.quad)};
}

// ---------------------------------------------------------------------------
// EigenBasis
// ---------------------------------------------------------------------------

EigenBasis::EigenBasis(const DomainSpec& domain) : domain_(domain), grid_(quadrature_grid(domain)) {
  const int J = domain.modes;
  modes_.reserve(static_cast<std::size_t>(J * J));
  for (int j = 1; j <= J; ++j)
    for (int k = 1; k <= J; ++k) modes_.push_back({j, k});

  auto eigenvalue = [&](const Mode& m) {
    const double a = m.j * kPi / domain.lx;
    const double b = m.k * kPi / domain.ly;
    return a * a + b * b;
  };
  // Ties (to round-off) fall back to lexicographic (j,k); modes_ starts in
  // lexicographic order and the sort is stable.
  std::stable_sort(modes_.begin(), modes_.end(), [&](const Mode& a, const Mode& b) {
    const double la = eigenvalue(a);
    const double lb = eigenvalue(b);
    if (std::abs(la - lb) <= 1e-12 * std::max(la, lb)) return false;
    return la < lb;
  });

  lambdas_.reserve(modes_.size());
  lookup_.assign(modes_.size(), -1);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    lambdas_.push_back(eigenvalue(modes_[i]));
    lookup_[static_cast<std::size_t>((modes_[i].j - 1) * J + (modes_[i].k - 1))] = static_cast<std::ptrdiff_t>(i);
  }
  norm_const_ = 2.0 / std::sqrt(domain.lx * domain.ly);

  for (int axis = 0; axis < 2; ++axis) {
    const AxisRule& rule = axis == 0 ? grid_.x : grid_.y;
    const auto width = static_cast<std::size_t>(J) + 1;
    sin_table_[axis].resize(rule.size() * width);
    cos_table_[axis].resize(rule.size() * width);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      for (int n = 0; n <= J; ++n) {
        // n*i/N reduced exactly so boundary nodes give sin = 0 to the last bit.
        const long num = static_cast<long>(n) * static_cast<long>(i) % (2L * rule.intervals);
        const double arg = kPi * static_cast<double>(num) / rule.intervals;
        sin_table_[axis][i * width + static_cast<std::size_t>(n)] = (num % rule.intervals == 0) ? 0.0 : std::sin(arg);
        cos_table_[axis][i * width + static_cast<std::size_t>(n)] = std::cos(arg);
      }
    }
  }
}

std::ptrdiff_t EigenBasis::index_of(Mode m) const {
  const int J = domain_.modes;
  if (m.j < 1 || m.k < 1 || m.j > J || m.k > J) return -1;
  return lookup_[static_cast<std::size_t>((m.j - 1) * J + (m.k - 1))];
}

double EigenBasis::wavenumber(int axis, int n) const {
  return n * kPi / (axis == 0 ? domain_.lx : domain_.ly);
}

Trig EigenBasis::derived_family(Trig family, int order) {
  if (order % 2 == 0) return family;
  return family == Trig::sine ? Trig::cosine : Trig::sine;
}

std::vector<double> EigenBasis::axis_table(int axis, Trig family, int order) const {
  const AxisRule& rule = axis == 0 ? grid_.x : grid_.y;
  const int J = domain_.modes;
  const auto width = static_cast<std::size_t>(J) + 1;
  std::vector<double> table(rule.size() * width);
  // d/dx sin = k cos, d/dx cos = -k sin.
  const int phase = order % 4;
  const Trig out = derived_family(family, order);
  double sign = 1.0;
  if (family == Trig::sine) {
    sign = (phase == 2 || phase == 3) ? -1.0 : 1.0;
  } else {
    sign = (phase == 1 || phase == 2) ? -1.0 : 1.0;
  }
  const auto& base = out == Trig::sine ? sin_table_[axis] : cos_table_[axis];
  for (std::size_t i = 0; i < rule.size(); ++i) {
    for (int n = 0; n <= J; ++n) {
      const double kn = wavenumber(axis, n);
      const double v = base[i * width + static_cast<std::size_t>(n)];
      table[i * width + static_cast<std::size_t>(n)] = sign * std::pow(kn, order) * v;
    }
  }
  return table;
}

BasisPtr build_basis(const DomainSpec& domain) {
  domain.validate();
  return std::make_shared<const EigenBasis>(domain);
}

// ---------------------------------------------------------------------------
// SpectralField
// ---------------------------------------------------------------------------

SpectralField::SpectralField(BasisPtr basis) : basis_(std::move(basis)) {
  if (!basis_) throw ShapeError("SpectralField: null basis");
  coeffs_.assign(basis_->size(), 0.0);
}

SpectralField::SpectralField(BasisPtr basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ShapeError("SpectralField: null basis");
  if (coeffs_.size() != basis_->size()) {
    throw ShapeError("SpectralField: expected " + std::to_string(basis_->size()) + " coefficients, got " +
                     std::to_string(coeffs_.size()));
  }
  if (!all_finite()) throw DomainError("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::unit(BasisPtr basis, std::size_t index) {
  SpectralField f(std::move(basis));
  if (index >= f.size()) throw ShapeError("SpectralField::unit: index out of range");
  f[index] = 1.0;
  return f;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return v == 0.0; });
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (double v : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

void require_same_basis(const SpectralField& a, const SpectralField& b) {
  if (a.basis() != b.basis() && !(a.basis()->domain() == b.basis()->domain())) {
    throw ShapeError("spectral fields live on different bases");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_basis(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_basis(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (double& v : coeffs_) v *= scale;
  return *this;
}

SpectralField& SpectralField::axpy(double scale, const SpectralField& other) {
  require_same_basis(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += scale * other.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double dot(const SpectralField& a, const SpectralField& b) {
  require_same_basis(a, b);
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  return std::inner_product(ca.begin(), ca.end(), cb.begin(), 0.0);
}

// ---------------------------------------------------------------------------
// GridField
// ---------------------------------------------------------------------------

GridField::GridField(BasisPtr basis) : basis_(std::move(basis)) {
  if (!basis_) throw ShapeError("GridField: null basis");
  values_.assign(basis_->grid().size(), 0.0);
}

GridField::GridField(BasisPtr basis, std::vector<double> values)
    : basis_(std::move(basis)), values_(std::move(values)) {
  if (!basis_) throw ShapeError("GridField: null basis");
  if (values_.size() != basis_->grid().size()) throw ShapeError("GridField: value count does not match grid");
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::integral() const { return basis_->grid().integrate(values_); }

// ---------------------------------------------------------------------------
// Separable transforms
// ---------------------------------------------------------------------------

GridField expand_separable(const BasisPtr& basis, std::span<const double> c, Trig fx, int ox, Trig fy,
                           int oy) {
  const auto width = static_cast<std::size_t>(basis->max_index()) + 1;
  if (c.size() != width * width) throw ShapeError("expand_separable: coefficient matrix has wrong size");
  const auto tx = basis->axis_table(0, fx, ox);
  const auto ty = basis->axis_table(1, fy, oy);
  const std::size_t nx = basis->grid().nx();
  const std::size_t ny = basis->grid().ny();

  // partial[ix][p] = sum_n tx[ix][n] c[n][p]
  std::vector<double> partial(nx * width, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t n = 0; n < width; ++n) {
      const double t = tx[ix * width + n];
      if (t == 0.0) continue;
      for (std::size_t p = 0; p < width; ++p) partial[ix * width + p] += t * c[n * width + p];
    }
  }
  GridField out(basis);
  auto v = out.values();
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      double s = 0.0;
      for (std::size_t p = 0; p < width; ++p) s += partial[ix * width + p] * ty[iy * width + p];
      v[ix * ny + iy] = s;
    }
  }
  return out;
}

std::vector<double> project_separable(const GridField& g, Trig fx, Trig fy) {
  const BasisPtr& basis = g.basis();
  const auto width = static_cast<std::size_t>(basis->max_index()) + 1;
  const auto tx = basis->axis_table(0, fx, 0);
  const auto ty = basis->axis_table(1, fy, 0);
  const auto& wx = basis->grid().x.weights;
  const auto& wy = basis->grid().y.weights;
  const std::size_t nx = basis->grid().nx();
  const std::size_t ny = basis->grid().ny();
  const auto v = g.values();

  // partial[n][iy] = sum_ix wx tx[ix][n] g[ix][iy]
  std::vector<double> partial(width * ny, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t n = 0; n < width; ++n) {
      const double t = wx[ix] * tx[ix * width + n];
      if (t == 0.0) continue;
      for (std::size_t iy = 0; iy < ny; ++iy) partial[n * ny + iy] += t * v[ix * ny + iy];
    }
  }
  std::vector<double> out(width * width, 0.0);
  for (std::size_t n = 0; n < width; ++n) {
    for (std::size_t p = 0; p < width; ++p) {
      double s = 0.0;
      for (std::size_t iy = 0; iy < ny; ++iy) s += partial[n * ny + iy] * wy[iy] * ty[iy * width + p];
      out[n * width + p] = s;
    }
  }
  return out;
}

namespace {

std::vector<double> to_matrix(const SpectralField& f) {
  const EigenBasis& b = *f.basis();
  const auto width = static_cast<std::size_t>(b.max_index()) + 1;
  std::vector<double> c(width * width, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Mode& m = b.mode(i);
    c[static_cast<std::size_t>(m.j) * width + static_cast<std::size_t>(m.k)] = b.norm_const() * f[i];
  }
  return c;
}

}  // namespace

GridField synthesize(const SpectralField& f) { return synthesize_derivative(f, 0, 0); }

GridField synthesize_derivative(const SpectralField& f, int dx, int dy) {
  if (dx < 0 || dy < 0) throw DomainError("synthesize_derivative: negative derivative order");
  return expand_separable(f.basis(), to_matrix(f), Trig::sine, dx, Trig::sine, dy);
}

SpectralField analyze(const GridField& g) {
  const BasisPtr& basis = g.basis();
  const auto width = static_cast<std::size_t>(basis->max_index()) + 1;
  const auto p = project_separable(g, Trig::sine, Trig::sine);
  SpectralField f(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Mode& m = basis->mode(i);
    f[i] = basis->norm_const() * p[static_cast<std::size_t>(m.j) * width + static_cast<std::size_t>(m.k)];
  }
  return f;
}

SpectralField reproject(const SpectralField& f, const BasisPtr& target) {
  const EigenBasis& src = *f.basis();
  const DomainSpec& a = src.domain();
  const DomainSpec& b = target->domain();
  if (a.lx != b.lx || a.ly != b.ly) throw ShapeError("reproject: domains differ in size");
  SpectralField out(target);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto pos = target->index_of(src.mode(i));
    if (pos >= 0) out[static_cast<std::size_t>(pos)] = f[i];
  }
  return out;
}

}  // namespace sqg
