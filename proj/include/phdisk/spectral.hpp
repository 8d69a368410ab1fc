#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "phdisk/grid.hpp"

namespace phdisk {

// Angular mode carried by FFT slot k of an n-point transform.
inline int mode_of_slot(int k, int n) { return k < n / 2 ? k : k - n; }
inline int slot_of_mode(int mode, int n) { return mode >= 0 ? mode : mode + n; }
// Modes strictly inside the alias-free band |m| < n/2.
inline bool in_band(int mode, int n) { return mode > -n / 2 && mode < n / 2; }

// Forward DFT normalized so that x_k = sum_n c_n e^{i n theta_k}.
std::vector<cplx> forward_dft(std::span<const cplx> x);
std::vector<cplx> inverse_dft(std::span<const cplx> c);

/// Per-ring Fourier coefficients of a GridFunction, coeffs[j*n_theta + slot].
struct ModalField {
  GridPtr grid;
  std::vector<cplx> coeffs;

  explicit ModalField(GridPtr g);
  cplx& at(int ring, int mode);
  cplx at(int ring, int mode) const;
};

ModalField to_modes(const GridFunction& f);
GridFunction from_modes(const ModalField& m);

/// Radial profile of one angular mode.
struct ModeProfile {
  int mode_index = 0;
  std::vector<cplx> radial_values;
};

ModeProfile mode_profile(const GridFunction& f, int mode);

////////////////////////////////////////////////////////////////////////////////
/// Cumulative radial integrals against the power kernels that appear in every
/// per-mode expansion of the disk kernels:
///
///   inner(g, p)[j] = int_0^{r_j} g(rho) (rho / r_j)^p d rho
///   outer(g, p)[j] = int_{r_j}^{R} g(rho) (r_j / rho)^p d rho
///
/// g is represented by its nodal samples; on each cell it is replaced by the
/// degree-5 Lagrange interpolant through the six nearest nodes (extrapolated
/// on the first cell [0, r_1]) and the kernel moments are integrated by
/// Gauss-Legendre rules of sufficient order. The cumulative sums are carried
/// with the rescaling factor ((j-1)/j)^p so no intermediate power overflows.
/// Cell weights are built lazily per exponent and cached.
////////////////////////////////////////////////////////////////////////////////
class RadialQuadrature {
 public:
  static constexpr int kStencil = 6;

  RadialQuadrature(int n_r, double outer_radius);

  int n_r() const { return n_r_; }

  std::vector<cplx> inner(std::span<const cplx> g, int p) const;
  std::vector<cplx> outer(std::span<const cplx> g, int p) const;

  // int_0^R g(rho) d rho.
  cplx integrate(std::span<const cplx> g) const;
  // Weights W_i with int_0^R g = sum_i W_i g(r_i).
  const std::vector<double>& integration_weights() const { return integration_weights_; }
  // Weights W_i(J) for int_0^{r_J} g.
  std::vector<double> partial_weights(int ring) const;

 private:
  struct CellTable {
    // weights[cell * kStencil + s], cell = 0..n_r-1 covering [r_{cell-1}, r_cell]
    // (r_{-1} = 0) for inner, [r_cell, r_{cell+1}] for outer.
    std::vector<double> weights;
    std::vector<double> carry;  // per-cell rescaling factor
  };

  int stencil_start(int cell) const;
  const CellTable& inner_table(int p) const;
  const CellTable& outer_table(int p) const;
  CellTable build_inner(int p) const;
  CellTable build_outer(int p) const;

  int n_r_;
  double outer_radius_;
  double h_;
  std::vector<double> integration_weights_;
  mutable std::mutex mutex_;
  mutable std::map<int, CellTable> inner_cache_;
  mutable std::map<int, CellTable> outer_cache_;
};

}  // namespace phdisk
