#pragma once

#include "phdisk/grid.hpp"

namespace phdisk {

enum class Normalization { real_on_T, imaginary_on_T };

const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// w = e^s F with F holomorphic. For w identically zero the result is
/// degenerate: F = 0 and every node of s is masked.
struct Factorization {
  GridFunction s;
  GridFunction F;
  Normalization normalization = Normalization::real_on_T;
  double residual_holo = 0.0;       // ||dbar F||_{L^2(D_0.9)}
  double residual_beltrami = 0.0;   // of e^s F against alpha
  bool degenerate = false;
};

// Relative zero threshold used when the caller passes a negative value.
inline constexpr double kDefaultZeroThreshold = 1e-12;

// conj(w)/w with the phase set to 0 where |w| <= threshold. A negative
// threshold means kDefaultZeroThreshold * max|w|. Masked nodes get phase 0.
GridFunction phase_factor(const GridFunction& w, double zero_threshold = -1.0);

Factorization factorize(const GridFunction& w, const GridFunction& alpha, Normalization normalization,
                        double zero_threshold = -1.0);

GridFunction reconstruct(const GridFunction& s, const GridFunction& F);

// ||dbar w - alpha conj(w)||_{L^2(D_0.9)}.
double residual_beltrami(const GridFunction& w, const GridFunction& alpha);

// alpha = dbar s * e^{s - conj(s)} * F / conj(F), zero where |F| <= threshold.
GridFunction alpha_from_pair(const GridFunction& s, const GridFunction& F, double zero_threshold = -1.0);

}  // namespace phdisk
