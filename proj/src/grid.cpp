#include "phdisk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "phdisk/spectral.hpp"

namespace phdisk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

DiskGrid::DiskGrid(int n_theta, int n_r, double outer_radius)
    : n_theta_(n_theta), n_r_(n_r), outer_radius_(outer_radius) {
  if (!power_of_two(n_theta) || n_theta < 8)
    throw InvalidArgument("n_theta must be a power of two >= 8 (spectral transforms require it), got " +
                          std::to_string(n_theta));
  if (n_r < 4) throw InvalidArgument("n_r must be >= 4, got " + std::to_string(n_r));
  if (!(outer_radius > 0.0)) throw InvalidArgument("outer radius must be positive");
  radii_.resize(n_r);
  for (int j = 0; j < n_r; ++j) radii_[j] = outer_radius * (j + 1) / n_r;
  // The interpolatory quadrature needs six rings; coarser grids fall back to
  // the trapezoid rule.
  if (n_r >= RadialQuadrature::kStencil) {
    quadrature_ = std::make_shared<RadialQuadrature>(n_r, outer_radius);
    const auto& w = quadrature_->integration_weights();
    radial_weights_.resize(n_r);
    for (int j = 0; j < n_r; ++j) radial_weights_[j] = w[j] * radii_[j];
  } else {
    radial_weights_.resize(n_r);
    const double h = outer_radius / n_r;
    for (int j = 0; j < n_r; ++j) radial_weights_[j] = h * radii_[j] * (j + 1 == n_r ? 0.5 : 1.0);
  }
}

double DiskGrid::theta(int k) const { return kTwoPi * k / n_theta_; }

cplx DiskGrid::node(int j, int k) const { return std::polar(radii_[j], theta(k)); }

double DiskGrid::angular_weight() const { return kTwoPi / n_theta_; }

const RadialQuadrature& DiskGrid::quadrature() const {
  if (!quadrature_) throw InvalidArgument("integral transforms need a grid with n_r >= 6");
  return *quadrature_;
}

int DiskGrid::radius_index(double rho) const {
  const double pos = rho / outer_radius_ * n_r_ - 1.0;
  const long idx = std::lround(pos);
  if (idx < 0 || idx >= n_r_ || std::abs(radii_[idx] - rho) > 1e-12 * std::max(1.0, rho))
    throw InvalidArgument("radius " + std::to_string(rho) + " is not a grid radius");
  return static_cast<int>(idx);
}

int DiskGrid::ring_at_or_below(double rho) const {
  const int idx = static_cast<int>(std::floor(rho / outer_radius_ * n_r_ + 1e-9)) - 1;
  return std::clamp(idx, 0, n_r_ - 1);
}

GridPtr make_grid(int n_theta, int n_r) { return std::make_shared<const DiskGrid>(n_theta, n_r, 1.0); }

GridPtr make_scaled_grid(int n_theta, int n_r, double outer_radius) {
  return std::make_shared<const DiskGrid>(n_theta, n_r, outer_radius);
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}

GridFunction::GridFunction(GridPtr grid, std::vector<cplx> values, std::vector<std::uint8_t> mask)
    : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.size() != grid_->size()) throw InvalidArgument("grid function shape does not match grid");
  if (!mask_.empty() && mask_.size() != values_.size())
    throw InvalidArgument("mask shape does not match grid");
  if (!mask_.empty() && std::none_of(mask_.begin(), mask_.end(), [](auto m) { return m != 0; }))
    mask_.clear();
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<cplx(cplx)>& f) {
  GridFunction out(grid);
  for (int j = 0; j < grid->n_r(); ++j)
    for (int k = 0; k < grid->n_theta(); ++k) {
      const cplx v = f(grid->node(j, k));
      if (is_finite(v))
        out(j, k) = v;
      else
        out.set_masked(j, k);
    }
  return out;
}

void GridFunction::set_masked(int j, int k) {
  if (mask_.empty()) mask_.assign(values_.size(), 0);
  mask_[index(j, k)] = 1;
  values_[index(j, k)] = {kNaN, kNaN};
}

std::size_t GridFunction::masked_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

void GridFunction::require_finite(const char* what) const {
  if (has_mask())
    throw MaskedValueError(std::string(what) + ": input has " + std::to_string(masked_count()) +
                           " masked node(s)");
  for (const auto& v : values_)
    if (!is_finite(v)) throw MaskedValueError(std::string(what) + ": input has non-finite values");
}

GridFunction GridFunction::map(const std::function<cplx(cplx)>& f) const {
  GridFunction out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (masked_flat(i)) continue;
    out.values_[i] = f(values_[i]);
  }
  out.mask_ = mask_;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (masked_flat(i)) out.values_[i] = {kNaN, kNaN};
  return out;
}

GridFunction GridFunction::conj() const { return map([](cplx z) { return std::conj(z); }); }
GridFunction GridFunction::real() const { return map([](cplx z) { return cplx(z.real(), 0.0); }); }
GridFunction GridFunction::imag() const { return map([](cplx z) { return cplx(z.imag(), 0.0); }); }

void GridFunction::merge_mask(const GridFunction& other) {
  if (other.grid_->n_r() != grid_->n_r() || other.grid_->n_theta() != grid_->n_theta())
    throw InvalidArgument("grid functions live on different grids");
  if (!other.has_mask()) return;
  if (mask_.empty()) mask_.assign(values_.size(), 0);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (other.mask_[i]) {
      mask_[i] = 1;
    }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  merge_mask(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  merge_mask(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
  merge_mask(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx scalar) {
  for (auto& v : values_) v *= scalar;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

GridFunction exp(const GridFunction& f) {
  GridFunction out = f.map([](cplx z) { return std::exp(z); });
  // Overflow at singular nodes becomes a mask bit.
  for (int j = 0; j < f.grid().n_r(); ++j)
    for (int k = 0; k < f.grid().n_theta(); ++k)
      if (!out.masked(j, k) && !is_finite(out(j, k))) out.set_masked(j, k);
  return out;
}

// ---------------------------------------------------------------------------

BoundaryFunction::BoundaryFunction(std::vector<cplx> values, std::vector<std::uint8_t> mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
  if (!mask_.empty() && mask_.size() != values_.size())
    throw InvalidArgument("boundary mask shape does not match values");
  if (!mask_.empty() && std::none_of(mask_.begin(), mask_.end(), [](auto m) { return m != 0; }))
    mask_.clear();
}

BoundaryFunction BoundaryFunction::sample(int n, const std::function<cplx(double)>& f) {
  std::vector<cplx> v(n);
  std::vector<std::uint8_t> mask;
  for (int k = 0; k < n; ++k) {
    v[k] = f(kTwoPi * k / n);
    if (!is_finite(v[k])) {
      if (mask.empty()) mask.assign(n, 0);
      mask[k] = 1;
      v[k] = {kNaN, kNaN};
    }
  }
  return BoundaryFunction(std::move(v), std::move(mask));
}

BoundaryFunction BoundaryFunction::real_valued(const std::vector<double>& values) {
  std::vector<cplx> v(values.begin(), values.end());
  return BoundaryFunction(std::move(v));
}

double BoundaryFunction::theta(int k) const { return kTwoPi * k / size(); }

void BoundaryFunction::require_finite(const char* what) const {
  if (has_mask()) throw MaskedValueError(std::string(what) + ": boundary data has masked samples");
  for (const auto& v : values_)
    if (!is_finite(v)) throw MaskedValueError(std::string(what) + ": boundary data is not finite");
}

double BoundaryFunction::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

BoundaryFunction BoundaryFunction::map(const std::function<cplx(cplx)>& f) const {
  std::vector<cplx> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = masked(static_cast<int>(k)) ? values_[k] : f(values_[k]);
  return BoundaryFunction(std::move(v), mask_);
}

const std::vector<cplx>& BoundaryFunction::fourier() const {
  if (fourier_cache_.size() != values_.size()) {
    require_finite("Fourier coefficients");
    fourier_cache_ = forward_dft(values_);
  }
  return fourier_cache_;
}

namespace {
BoundaryFunction zip(const BoundaryFunction& a, const BoundaryFunction& b,
                     const std::function<cplx(cplx, cplx)>& op) {
  if (a.size() != b.size()) throw InvalidArgument("boundary functions have different lengths");
  std::vector<cplx> v(a.size());
  std::vector<std::uint8_t> mask;
  for (int k = 0; k < a.size(); ++k) {
    if (a.masked(k) || b.masked(k)) {
      if (mask.empty()) mask.assign(a.size(), 0);
      mask[k] = 1;
      v[k] = {kNaN, kNaN};
    } else {
      v[k] = op(a[k], b[k]);
    }
  }
  return BoundaryFunction(std::move(v), std::move(mask));
}
}  // namespace

BoundaryFunction operator+(const BoundaryFunction& a, const BoundaryFunction& b) {
  return zip(a, b, [](cplx x, cplx y) { return x + y; });
}
BoundaryFunction operator-(const BoundaryFunction& a, const BoundaryFunction& b) {
  return zip(a, b, [](cplx x, cplx y) { return x - y; });
}
BoundaryFunction operator*(const BoundaryFunction& a, const BoundaryFunction& b) {
  return zip(a, b, [](cplx x, cplx y) { return x * y; });
}
BoundaryFunction operator*(cplx s, const BoundaryFunction& a) {
  return a.map([s](cplx x) { return s * x; });
}

// ---------------------------------------------------------------------------

bool Cone::contains(cplx z) const {
  const double s = std::sin(gamma);
  if (std::abs(z) <= s) return true;
  const cplx d = vertex - z;
  const double along = (d * std::conj(vertex)).real();  // component toward the origin
  if (!(along > std::abs(d) * std::cos(gamma))) return false;
  // Keep only the component between the vertex and D_{sin gamma}.
  return (z * std::conj(vertex)).real() > s * s;
}

cplx area_integral(const GridFunction& f) {
  f.require_finite("area_integral");
  const auto& g = f.grid();
  cplx total = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    cplx ring = 0.0;
    for (const auto& v : f.ring(j)) ring += v;
    total += g.radial_weight(j) * ring;
  }
  return total * g.angular_weight();
}

double area_lp_norm(const GridFunction& f, double p, double rho) {
  const auto& g = f.grid();
  const int ring = g.ring_at_or_below(rho);
  std::vector<double> weights;
  if (ring == g.n_r() - 1 || g.n_r() < RadialQuadrature::kStencil) {
    weights = g.radial_weights();
    if (ring != g.n_r() - 1) std::fill(weights.begin() + ring + 1, weights.end(), 0.0);
  } else {
    weights = g.quadrature().partial_weights(ring);
    for (int j = 0; j < g.n_r(); ++j) weights[j] *= g.radius(j);
  }
  double total = 0.0;
  for (int j = 0; j < g.n_r(); ++j) {
    if (weights[j] == 0.0) continue;
    double s = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx v = f(j, k);
      if (f.masked(j, k) || !is_finite(v))
        throw MaskedValueError("area_lp_norm: masked or non-finite node inside the integration disk");
      s += std::pow(std::abs(v), p);
    }
    total += weights[j] * s;
  }
  return std::pow(std::max(total, 0.0) * g.angular_weight(), 1.0 / p);
}

double interior_l2_norm(const GridFunction& f) { return area_lp_norm(f, 2.0, kInteriorRadius); }

double ring_norm(const GridFunction& f, int ring, double p) {
  const auto& g = f.grid();
  double s = 0.0;
  for (int k = 0; k < g.n_theta(); ++k) {
    if (f.masked(ring, k)) throw MaskedValueError("circle_norm: masked node on the circle");
    s += std::pow(std::abs(f(ring, k)), p);
  }
  return std::pow(s * g.radius(ring) * g.angular_weight(), 1.0 / p);
}

double circle_norm(const GridFunction& f, double rho, double p) {
  if (p < 1.0) throw InvalidArgument("circle_norm: exponent must be >= 1");
  return ring_norm(f, f.grid().radius_index(rho), p);
}

double hardy_norm(const GridFunction& f, double p) {
  double best = 0.0;
  for (int j = 0; j < f.grid().boundary_index(); ++j) best = std::max(best, ring_norm(f, j, p));
  return best;
}

std::pair<GridFunction, GridFunction> wirtinger_derivatives(const GridFunction& f) {
  const auto& g = f.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double h = g.dr();

  // Angular derivative, spectrally per ring; the Nyquist mode is dropped.
  GridFunction f_theta(f.grid_ptr());
  {
    std::vector<cplx> ring(nt);
    for (int j = 0; j < nr; ++j) {
      bool ring_masked = false;
      for (int k = 0; k < nt; ++k) ring_masked |= f.masked(j, k);
      if (ring_masked) continue;
      auto c = forward_dft(f.ring(j));
      for (int s = 0; s < nt; ++s) {
        const int m = mode_of_slot(s, nt);
        c[s] = in_band(m, nt) ? c[s] * cplx(0.0, m) : 0.0;
      }
      const auto d = inverse_dft(c);
      for (int k = 0; k < nt; ++k) f_theta(j, k) = d[k];
    }
  }

  // Radial derivative: centered 5-point stencil, one-sided 5-point closures
  // on the first two and last two rings.
  static constexpr double kFirst[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
  static constexpr double kSecond[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
  static constexpr double kCentral[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  auto radial = [&](int j, int k, bool& bad) {
    const double* c;
    int start;
    double sign = 1.0;
    if (j == 0) {
      c = kFirst, start = 0;
    } else if (j == 1) {
      c = kSecond, start = 0;
    } else if (j == nr - 1) {
      c = kFirst, start = nr - 1, sign = -1.0;
    } else if (j == nr - 2) {
      c = kSecond, start = nr - 1, sign = -1.0;
    } else {
      c = kCentral, start = j - 2;
    }
    cplx acc = 0.0;
    for (int s = 0; s < 5; ++s) {
      const int jj = sign > 0 ? start + s : start - s;
      if (f.masked(jj, k)) bad = true;
      acc += c[s] * f(jj, k);
    }
    return sign * acc / (12.0 * h);
  };

  GridFunction d(f.grid_ptr()), dbar(f.grid_ptr());
  for (int j = 0; j < nr; ++j) {
    const double r = g.radius(j);
    bool ring_masked = false;
    for (int k = 0; k < nt; ++k) ring_masked |= f.masked(j, k);
    for (int k = 0; k < nt; ++k) {
      bool bad = ring_masked;
      const cplx fr = radial(j, k, bad);
      if (bad) {
        d.set_masked(j, k);
        dbar.set_masked(j, k);
        continue;
      }
      const cplx ft = f_theta(j, k);
      const cplx e = std::polar(1.0, g.theta(k));
      d(j, k) = 0.5 * std::conj(e) * (fr - cplx(0.0, 1.0) / r * ft);
      dbar(j, k) = 0.5 * e * (fr + cplx(0.0, 1.0) / r * ft);
    }
  }
  return {std::move(d), std::move(dbar)};
}

double sobolev_norm(const GridFunction& f, double p) {
  const auto [d, dbar] = wirtinger_derivatives(f);
  return area_lp_norm(f, p) + area_lp_norm(d, p) + area_lp_norm(dbar, p);
}

BoundaryFunction boundary_trace(const GridFunction& f, MaskPolicy policy) {
  const auto& g = f.grid();
  const int jb = g.boundary_index();
  std::vector<cplx> v(g.n_theta());
  std::vector<std::uint8_t> mask;
  for (int k = 0; k < g.n_theta(); ++k) {
    v[k] = f(jb, k);
    if (f.masked(jb, k)) {
      if (policy == MaskPolicy::reject)
        throw MaskedValueError("boundary_trace: masked value on the boundary ring");
      if (mask.empty()) mask.assign(g.n_theta(), 0);
      mask[k] = 1;
    }
  }
  return BoundaryFunction(std::move(v), std::move(mask));
}

BoundaryFunction nontangential_max(const GridFunction& f, double gamma) {
  if (!(gamma > 0.0 && gamma < std::numbers::pi / 2))
    throw InvalidArgument("nontangential_max: gamma must lie in (0, pi/2)");
  const auto& g = f.grid();
  std::vector<cplx> out(g.n_theta());
  for (int k = 0; k < g.n_theta(); ++k) {
    const Cone cone{std::polar(1.0, g.theta(k)), gamma};
    double best = -1.0;
    for (int j = 0; j < g.boundary_index(); ++j)
      for (int l = 0; l < g.n_theta(); ++l) {
        if (!cone.contains(g.node(j, l))) continue;
        if (f.masked(j, l)) throw MaskedValueError("nontangential_max: masked node inside a cone");
        best = std::max(best, std::abs(f(j, l)));
      }
    if (best < 0.0)
      throw InvalidArgument("nontangential_max: cone at theta_" + std::to_string(k) +
                            " contains no interior node; use a finer grid");
    out[k] = best;
  }
  return BoundaryFunction(std::move(out));
}

double boundary_lp_norm(const BoundaryFunction& g, double p) {
  g.require_finite("boundary_lp_norm");
  double s = 0.0;
  for (const auto& v : g.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * kTwoPi / g.size(), 1.0 / p);
}

cplx boundary_integral(const BoundaryFunction& g) {
  g.require_finite("boundary_integral");
  cplx s = 0.0;
  for (const auto& v : g.values()) s += v;
  return s * kTwoPi / static_cast<double>(g.size());
}

cplx boundary_mean(const BoundaryFunction& g) { return boundary_integral(g) / kTwoPi; }

}  // namespace phdisk
