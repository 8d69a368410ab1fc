#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phdisk/grid.hpp"

namespace phdisk {

/// Arc of T from `start` to `end` (radians, end > start, length <= 2 pi).
/// A boundary node theta_k belongs to the arc when start <= theta_k < end
/// modulo 2 pi; the arc measure is the node count times 2 pi / n.
struct Arc {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  bool contains(double theta) const;
};

struct ArcFamily {
  std::vector<Arc> arcs;

  // All dyadic arcs [2 pi i / 2^k, 2 pi (i+1) / 2^k) with 2 pi / 2^k >= 2 pi / n_theta_coarse,
  // T itself included (k = 0).
  static ArcFamily dyadic(int n_theta_coarse);
};

struct DiagnosticReport {
  std::string name;
  std::vector<std::string> labels;
  std::vector<double> measured;
  std::vector<double> bound;
  std::vector<bool> satisfied;  // measured[i] <= bound[i] * (1 + slack)
  double slack = 0.0;
  std::map<std::string, std::vector<double>> tables;
  std::map<std::string, double> extras;

  bool all_satisfied() const;
  void add(std::string label, double measured_value, double bound_value);
};

// (1/|I|) sum_{theta_k in I} |h_k - h_I| 2pi/n.
double mean_oscillation(const BoundaryFunction& h, const Arc& arc);

// M_h(I): sup of the mean oscillation over I and its dyadic subdivisions.
double localized_oscillation(const BoundaryFunction& h, const Arc& arc);

struct BmoResult {
  double seminorm = 0.0;
  std::vector<double> per_arc;
};

BmoResult bmo_oscillation(const BoundaryFunction& h, const ArcFamily& family);

double ap_constant(const BoundaryFunction& weight, double p, const ArcFamily& family);

// Both sides of int_I e^{|h|/(4e M)} <= (1+e) |I| e^{|h_I|/(4e M)}, M = M_h(I).
DiagnosticReport jn_exp_check(const BoundaryFunction& h, const Arc& arc);

struct ExpIntegrabilityOptions {
  std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  // Integrate over the disk bounded by the last interior ring, for functions
  // singular on T.
  bool exclude_boundary_ring = false;
};

// For each ell: log int_D e^{ell lambda |f|} over lambda, fitted by
// a + b lambda^2 and by a + b lambda^2 + c lambda^3. measured = 0.95 R^2_cubic,
// bound = R^2_quadratic.
DiagnosticReport exp_integrability_report(const GridFunction& f, const std::vector<double>& ells,
                                          const ExpIntegrabilityOptions& options = {});

// For each side length eps (taken in decreasing order), the max over squares
// Q of side eps on the lattice (eps/2) Z^2 of ||d C(beta)||_{L^2(Q cap D)} +
// ||dbar C(beta)||_{L^2(Q cap D)}. satisfied: non-increasing as eps shrinks.
DiagnosticReport equicontinuity_modulus(const GridFunction& beta, std::vector<double> side_lengths);

// ||C_2(h)||_{L^2(D_R)} / (R (1 + sqrt(log R)) ||h||_{L^2}) per R; satisfied
// while the ratio stays within 5% of its value at the smallest R.
DiagnosticReport c2_growth_curve(const GridFunction& h, const std::vector<double>& radii);

// sup_rho (int_{T_rho} e^{p f} |g|^p)^{1/p} / ||M_gamma g||_{L^p(T)}.
double multiplier_ratio(const GridFunction& f, const GridFunction& g, double p, double gamma);

// Ratios over all (f, g) pairs; satisfied when max <= 10 * median.
DiagnosticReport multiplier_family(const std::vector<GridFunction>& fs, const std::vector<GridFunction>& gs,
                                   double p, double gamma);

// ||tr w_rho - w_T||_{L^p(T)} over rings 3n/4 .. n-2; satisfied when the
// last entry is at most half the first.
DiagnosticReport trace_convergence(const GridFunction& w, double p);

double boundary_sobolev_seminorm(const BoundaryFunction& g);

// int |conj psi|^2 w / int |psi|^2 w.
double weighted_conjugate_ratio(const BoundaryFunction& psi, const BoundaryFunction& weight);

}  // namespace phdisk
