#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "phdisk/error.hpp"

namespace phdisk {

using cplx = std::complex<double>;

class RadialQuadrature;
class DiskGrid;
using GridPtr = std::shared_ptr<const DiskGrid>;

////////////////////////////////////////////////////////////////////////////////
/// Polar tensor grid on the closed disk of radius `outer_radius` (1 for the
/// unit disk). Radial nodes r_j = (j+1)/n_r * outer_radius, j = 0..n_r-1, so
/// the origin is excluded and the last ring is the boundary circle. Angular
/// nodes theta_k = 2*pi*k/n_theta.
///
/// Radial weights approximate int_0^R f(r) r dr. They come from integrating a
/// local degree-5 interpolant of f(r) r, which makes them exact for
/// polynomials of degree <= 4 in r (after the Jacobian).
////////////////////////////////////////////////////////////////////////////////
class DiskGrid {
 public:
  DiskGrid(int n_theta, int n_r, double outer_radius = 1.0);

  int n_theta() const { return n_theta_; }
  int n_r() const { return n_r_; }
  std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_r_; }
  double outer_radius() const { return outer_radius_; }
  double dr() const { return outer_radius_ / n_r_; }

  double radius(int j) const { return radii_[j]; }
  const std::vector<double>& radii() const { return radii_; }
  double theta(int k) const;
  cplx node(int j, int k) const;

  double radial_weight(int j) const { return radial_weights_[j]; }
  const std::vector<double>& radial_weights() const { return radial_weights_; }
  double angular_weight() const;

  int boundary_index() const { return n_r_ - 1; }

  // Index of the ring at radius rho; throws InvalidArgument if rho is not a
  // grid radius (relative tolerance 1e-12).
  int radius_index(double rho) const;

  // Largest ring index with r_j <= rho.
  int ring_at_or_below(double rho) const;

  // Throws InvalidArgument for grids with fewer than six rings.
  const RadialQuadrature& quadrature() const;

 private:
  int n_theta_;
  int n_r_;
  double outer_radius_;
  std::vector<double> radii_;
  std::vector<double> radial_weights_;
  std::shared_ptr<RadialQuadrature> quadrature_;
};

// n_theta must be a power of two >= 8 and n_r >= 4.
GridPtr make_grid(int n_theta, int n_r);

// Same node layout on the disk of radius outer_radius.
GridPtr make_scaled_grid(int n_theta, int n_r, double outer_radius);

////////////////////////////////////////////////////////////////////////////////
/// Complex samples of a function on a DiskGrid, row-major by radius.
/// Nodes where the function is singular carry a mask bit; their stored value
/// is NaN.
////////////////////////////////////////////////////////////////////////////////
class GridFunction {
 public:
  explicit GridFunction(GridPtr grid);
  GridFunction(GridPtr grid, std::vector<cplx> values,
               std::vector<std::uint8_t> mask = {});

  // Samples f at every node; non-finite results are masked.
  static GridFunction sample(GridPtr grid, const std::function<cplx(cplx)>& f);

  const DiskGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  cplx operator()(int j, int k) const { return values_[index(j, k)]; }
  cplx& operator()(int j, int k) { return values_[index(j, k)]; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> ring(int j) const {
    return {values_.data() + index(j, 0), static_cast<std::size_t>(grid_->n_theta())};
  }

  bool has_mask() const { return !mask_.empty(); }
  bool masked(int j, int k) const { return has_mask() && mask_[index(j, k)] != 0; }
  bool masked_flat(std::size_t i) const { return has_mask() && mask_[i] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  void set_masked(int j, int k);
  std::size_t masked_count() const;

  // Throws MaskedValueError naming `what` if any node is masked or non-finite.
  void require_finite(const char* what) const;

  GridFunction map(const std::function<cplx(cplx)>& f) const;
  GridFunction conj() const;
  GridFunction real() const;
  GridFunction imag() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(const GridFunction& other);
  GridFunction& operator*=(cplx scalar);

 private:
  std::size_t index(int j, int k) const {
    return static_cast<std::size_t>(j) * grid_->n_theta() + k;
  }
  void merge_mask(const GridFunction& other);

  GridPtr grid_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> mask_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);
GridFunction exp(const GridFunction& f);

////////////////////////////////////////////////////////////////////////////////
/// Samples on the unit circle at theta_k = 2*pi*k/n.
////////////////////////////////////////////////////////////////////////////////
class BoundaryFunction {
 public:
  BoundaryFunction() = default;
  explicit BoundaryFunction(std::vector<cplx> values, std::vector<std::uint8_t> mask = {});

  static BoundaryFunction sample(int n, const std::function<cplx(double)>& f);
  static BoundaryFunction real_valued(const std::vector<double>& values);

  int size() const { return static_cast<int>(values_.size()); }
  double theta(int k) const;
  cplx operator[](int k) const { return values_[k]; }
  cplx& operator[](int k) {
    fourier_cache_.clear();
    return values_[k];
  }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() {
    fourier_cache_.clear();
    return values_;
  }

  bool has_mask() const { return !mask_.empty(); }
  bool masked(int k) const { return has_mask() && mask_[k] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  void require_finite(const char* what) const;

  // Largest |Im| over the samples.
  double max_abs_imag() const;
  BoundaryFunction map(const std::function<cplx(cplx)>& f) const;

  // Discrete Fourier coefficients c_n with values[k] = sum_n c_n e^{i n theta_k},
  // in FFT index order (n = k for k < n/2, k - n otherwise).
  const std::vector<cplx>& fourier() const;

 private:
  std::vector<cplx> values_;
  std::vector<std::uint8_t> mask_;
  mutable std::vector<cplx> fourier_cache_;
};

BoundaryFunction operator+(const BoundaryFunction& a, const BoundaryFunction& b);
BoundaryFunction operator-(const BoundaryFunction& a, const BoundaryFunction& b);
BoundaryFunction operator*(const BoundaryFunction& a, const BoundaryFunction& b);
BoundaryFunction operator*(cplx s, const BoundaryFunction& a);

/// Cone Gamma_{xi,gamma}: the part of the open cone with vertex xi and
/// half-opening gamma lying between xi and the disk D_{sin gamma}, together
/// with the closed disk D_{sin gamma} itself.
struct Cone {
  cplx vertex;
  double gamma;

  bool contains(cplx z) const;
};

// int_D f dm by the grid quadrature.
cplx area_integral(const GridFunction& f);

// (int_{D_rho} |f|^p dm)^{1/p} where rho snaps down to the nearest ring.
double area_lp_norm(const GridFunction& f, double p, double rho = 1.0);

// L^2 norm on the interior disk D_{0.9} (snapped to the ring at or below 0.9).
double interior_l2_norm(const GridFunction& f);
inline constexpr double kInteriorRadius = 0.9;

// (sum_k |f(rho e^{i theta_k})|^p rho 2pi/n_theta)^{1/p}: unnormalized arclength.
double circle_norm(const GridFunction& f, double rho, double p);
double ring_norm(const GridFunction& f, int ring, double p);

// Max of circle_norm over the interior rings (boundary ring excluded).
double hardy_norm(const GridFunction& f, double p);

// (d f, dbar f) with spectral angular and 4th-order radial differences.
std::pair<GridFunction, GridFunction> wirtinger_derivatives(const GridFunction& f);

// ||f||_p + ||d f||_p + ||dbar f||_p over D.
double sobolev_norm(const GridFunction& f, double p);

enum class MaskPolicy { reject, propagate };

BoundaryFunction boundary_trace(const GridFunction& f, MaskPolicy policy = MaskPolicy::reject);

// M_gamma f(xi_k): max |f| over interior nodes inside the cone at xi_k.
BoundaryFunction nontangential_max(const GridFunction& f, double gamma);

// (sum_k |g_k|^p 2pi/n)^{1/p}.
double boundary_lp_norm(const BoundaryFunction& g, double p);
// int_T g dtheta (unnormalized).
cplx boundary_integral(const BoundaryFunction& g);
cplx boundary_mean(const BoundaryFunction& g);

}  // namespace phdisk
