#pragma once

#include "phdisk/grid.hpp"

namespace phdisk {

// Area Cauchy transform C(h)(z) = (1/pi) int_D h(t)/(z-t) dm(t), evaluated on
// the grid of h. Computed per angular mode: 1/(z-t) is expanded in a
// geometric series on either side of |t| = |z|, so input mode m feeds output
// mode m-1 through a one-sided radial integral.
GridFunction cauchy(const GridFunction& h);

// Beurling transform B(h) = d C(h), differentiating the per-mode Cauchy
// expressions analytically. Input mode m feeds output mode m-2.
GridFunction beurling(const GridFunction& h);

// Renormalized transform C_2(h) for h supported in D, evaluated on a grid
// over D_R (eval_grid->outer_radius() == R). Rings inside D must coincide
// with rings of h's grid; rings outside D use the exterior expansion.
GridFunction cauchy_renormalized(const GridFunction& h, double R, const GridPtr& eval_grid);

// ||C_2(h)||_{L^2(D_R)}: grid quadrature on D plus the exact per-mode
// integral over the annulus 1 < |z| < R.
double cauchy_renormalized_l2_norm(const GridFunction& h, double R);

// R(beta)(z) = -(1/pi) int_D z conj(beta(xi)) / (1 - conj(xi) z) dm(xi).
// Holomorphic in D with R(beta)(0) = 0.
GridFunction reflect_transform(const GridFunction& beta);

// Green potential P(psi) = -(1/2pi) int_D log|(1 - conj(z) t)/(z - t)| psi(t) dm(t):
// Laplacian psi, zero on the boundary ring.
GridFunction green_potential(const GridFunction& psi);

// Harmonic extension: boundary mode u_n becomes u_n r^{|n|}. The boundary
// ring of the result is a copy of u.
GridFunction poisson_extend(const BoundaryFunction& u, const GridPtr& grid);

// Harmonic conjugate of the harmonic extension of u's boundary trace, with
// zero boundary mean.
GridFunction harmonic_conjugate(const GridFunction& u);

// Interior L^2 distance between u and the harmonic extension of its trace.
double harmonicity_defect(const GridFunction& u);

// Conjugate function: Fourier multiplier -i sgn(n), the mean and the Nyquist
// mode are sent to zero.
BoundaryFunction conjugate_function(const BoundaryFunction& psi);

// Holomorphic function whose real part on T equals the real data u and whose
// boundary mean of the imaginary part is imag_mean.
GridFunction holomorphic_extension(const BoundaryFunction& u, double imag_mean, const GridPtr& grid);

struct DbarSolution {
  GridFunction A;
  double dbar_residual = 0.0;   // ||dbar A - a||_{L^2(D_0.9)}
  double trace_residual = 0.0;  // ||tr Re(e^{i theta0} A) - psi||_{L^2(T)}
  double mean_residual = 0.0;   // |int_T Im(e^{i theta0} A) - lambda|
};

// The unique A with dbar A = a, tr Re(e^{i theta0} A) = psi and
// int_T Im(e^{i theta0} A) = lambda (unnormalized arclength).
DbarSolution solve_dbar(const GridFunction& a, const BoundaryFunction& psi, double lambda,
                        double theta0);

}  // namespace phdisk
