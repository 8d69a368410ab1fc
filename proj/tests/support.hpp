#pragma once

// Shared helpers for the unit and acceptance tests: random band-limited
// samples, error measures and independent reference computations.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "phdisk/grid.hpp"

namespace phdisk::testing {

inline constexpr double kPi = std::numbers::pi;

inline double max_abs_diff(const GridFunction& a, const GridFunction& b, double rho = 1.0) {
  double m = 0.0;
  const auto& g = a.grid();
  for (int j = 0; j < g.n_r() && g.radius(j) <= rho + 1e-12; ++j)
    for (int k = 0; k < g.n_theta(); ++k) {
      if (a.masked(j, k) || b.masked(j, k)) continue;
      m = std::max(m, std::abs(a(j, k) - b(j, k)));
    }
  return m;
}

inline double max_abs(const GridFunction& a, double rho = 1.0) {
  return max_abs_diff(a, GridFunction(a.grid_ptr()), rho);
}

inline double max_abs_diff(const BoundaryFunction& a, const BoundaryFunction& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline GridFunction sample(const GridPtr& g, std::function<cplx(cplx)> f) { return GridFunction::sample(g, f); }

inline BoundaryFunction sample_boundary(int n, std::function<cplx(double)> f) {
  return BoundaryFunction::sample(n, f);
}

// sum over |n| <= max_mode of r^{|n|} (a_n + b_n r^2 + c_n r^4) e^{i n theta},
// coefficients complex normal scaled by 1/(1+|n|)^2.
inline GridFunction random_band_limited(const GridPtr& g, std::mt19937_64& rng, int max_mode) {
  std::normal_distribution<double> nd;
  struct Term {
    int n;
    cplx a, b, c;
  };
  std::vector<Term> terms;
  for (int n = -max_mode; n <= max_mode; ++n) {
    const double s = 1.0 / ((1.0 + std::abs(n)) * (1.0 + std::abs(n)));
    terms.push_back({n, s * cplx(nd(rng), nd(rng)), s * cplx(nd(rng), nd(rng)), s * cplx(nd(rng), nd(rng))});
  }
  return sample(g, [terms](cplx z) {
    const double r = std::abs(z), t = std::arg(z), r2 = r * r;
    cplx v = 0.0;
    for (const auto& T : terms)
      v += std::pow(r, std::abs(T.n)) * (T.a + T.b * r2 + T.c * r2 * r2) * std::polar(1.0, T.n * t);
    return v;
  });
}

// Real trigonometric polynomial of degree <= max_mode; zero mean on request.
inline BoundaryFunction random_boundary(int n, std::mt19937_64& rng, int max_mode, bool zero_mean = false) {
  std::normal_distribution<double> nd;
  std::vector<double> a(max_mode + 1), b(max_mode + 1);
  for (int m = 0; m <= max_mode; ++m) {
    a[m] = nd(rng) / (1.0 + m);
    b[m] = nd(rng) / (1.0 + m);
  }
  if (zero_mean) a[0] = 0.0;
  return sample_boundary(n, [a, b](double t) {
    double v = a[0];
    for (std::size_t m = 1; m < a.size(); ++m) v += a[m] * std::cos(m * t) + b[m] * std::sin(m * t);
    return cplx(v);
  });
}

// max |a - b| / max |b| over r <= rho.
inline double rel_max_error(const GridFunction& a, const GridFunction& b, double rho = 1.0) {
  const double scale = max_abs(b, rho);
  return max_abs_diff(a, b, rho) / (scale > 0 ? scale : 1.0);
}

// ||a - b||_{L^2(D)} / ||b||_{L^2(D)}.
inline double rel_l2_error(const GridFunction& a, const GridFunction& b) {
  return area_lp_norm(a - b, 2.0) / area_lp_norm(b, 2.0);
}

inline double sobolev_error(const GridFunction& a, const GridFunction& b) { return sobolev_norm(a - b, 2.0); }

// Area integral over D_R of a function given on a scaled grid whose rings
// inside D coincide with `unit`: the unit grid quadrature on D plus the
// trapezoidal rule in r on the annulus, so a kink at |z| = 1 is not
// straddled by one interpolation stencil.
inline cplx piecewise_area_integral(const GridFunction& f, const GridPtr& unit) {
  const auto& g = f.grid();
  const int n_in = unit->n_r();
  GridFunction inside(unit);
  for (int j = 0; j < n_in; ++j)
    for (int k = 0; k < g.n_theta(); ++k) inside(j, k) = f(j, k);
  cplx total = area_integral(inside);
  const double dt = 2 * kPi / g.n_theta();
  for (int j = n_in; j < g.n_r(); ++j) {
    const double r0 = g.radius(j - 1), r1 = g.radius(j);
    cplx a = 0.0, b = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) {
      a += f(j - 1, k);
      b += f(j, k);
    }
    total += 0.5 * (r1 - r0) * (a * r0 + b * r1) * dt;
  }
  return total;
}

inline GridFunction constant(const GridPtr& g, cplx c) {
  return sample(g, [c](cplx) { return c; });
}

}  // namespace phdisk::testing
