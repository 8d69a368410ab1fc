#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phdisk/grid.hpp"
#include "phdisk/similarity.hpp"

namespace phdisk {

struct SolverConfig {
  double tol = 1e-8;        // on the W^{1,2} norm of the fixed-point increment
  int max_iter = 200;
  double damping = 1.0;     // initial step; halved when the increment grows
  double zero_threshold = -1.0;  // negative: relative default, see phase_factor
  double p = 2.0;           // Hardy exponent used in reported norms
  double gamma = 0.7853981633974483;  // cone half-angle for diagnostics

  void validate() const;
};

inline constexpr double kMinDamping = 1.0 / 64.0;

struct SolveReport {
  int iterations = 0;
  std::vector<double> increment_history;
  double final_damping = 1.0;
  double residual_beltrami = 0.0;
  double boundary_mismatch = 0.0;
  std::vector<double> normalization_defects;
  double measured_constant = 0.0;
  std::map<std::string, double> extras;
};

struct ParametrizeResult {
  GridFunction s;
  SolveReport report;
};

// s with dbar(e^s F) = alpha conj(e^s F), tr Im s = psi, int_T Re s = lambda.
// initial_s, when given, seeds the iteration (default s = 0).
ParametrizeResult parametrize_imag(const GridFunction& alpha, const GridFunction& F, const BoundaryFunction& psi,
                                   double lambda, const SolverConfig& cfg,
                                   const std::optional<GridFunction>& initial_s = std::nullopt);

// Same equation with tr Re s = psi and int_T Im s = lambda.
ParametrizeResult parametrize_real(const GridFunction& alpha, const GridFunction& F, const BoundaryFunction& psi,
                                   double lambda, const SolverConfig& cfg,
                                   const std::optional<GridFunction>& initial_s = std::nullopt);

struct RieszResult {
  GridFunction w;
  BoundaryFunction psi_sharp;  // Im w_T
  GridFunction s;              // w = e^s F, s real on T
  GridFunction F;
  SolveReport report;
};

// w with dbar w = alpha conj(w), Re w_T = psi, int_T Im w_T = c.
RieszResult solve_riesz(const GridFunction& alpha, const BoundaryFunction& psi, double c, const SolverConfig& cfg,
                        const std::optional<GridFunction>& initial_s = std::nullopt);

struct ConductivityResult {
  GridFunction u;
  GridFunction v;
  GridFunction w;
  SolveReport report;
};

// div(sigma grad u) = 0 with u = psi on T; v is the conjugate with zero flux
// mean, w = sigma^{1/2} u + i sigma^{-1/2} v.
ConductivityResult solve_conductivity(const GridFunction& sigma, const BoundaryFunction& psi,
                                      const SolverConfig& cfg);

// ||4 Re d(sigma dbar u)||_{L^2(D_0.9)} for real u.
double conductivity_residual(const GridFunction& sigma, const GridFunction& u);

}  // namespace phdisk
