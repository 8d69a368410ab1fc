#include "phdisk/transforms.hpp"

#include <cmath>
#include <numbers>

#include "phdisk/spectral.hpp"

namespace phdisk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<cplx> radial_column(const ModalField& m, int mode) {
  const int nr = m.grid->n_r();
  std::vector<cplx> col(nr);
  for (int j = 0; j < nr; ++j) col[j] = m.at(j, mode);
  return col;
}

void require_boundary_size(const BoundaryFunction& u, const DiskGrid& g, const char* what) {
  if (u.size() != g.n_theta())
    throw InvalidArgument(std::string(what) + ": boundary data has " + std::to_string(u.size()) +
                          " samples, grid has n_theta = " + std::to_string(g.n_theta()));
}

void require_unit_disk(const DiskGrid& g, const char* what) {
  if (std::abs(g.outer_radius() - 1.0) > 1e-14)
    throw InvalidArgument(std::string(what) + " operates on unit-disk grids");
}

}  // namespace

GridFunction cauchy(const GridFunction& h) {
  const auto& g = h.grid();
  require_unit_disk(g, "cauchy");
  const auto& quad = g.quadrature();
  const int nt = g.n_theta();
  const auto in = to_modes(h);
  ModalField out(h.grid_ptr());
  for (int m = -nt / 2 + 1; m < nt / 2; ++m) {
    if (!in_band(m - 1, nt)) continue;
    const auto col = radial_column(in, m);
    if (m <= 0) {
      const auto I = quad.inner(col, 1 - m);
      for (int j = 0; j < g.n_r(); ++j) out.at(j, m - 1) = 2.0 * I[j];
    } else {
      const auto O = quad.outer(col, m - 1);
      for (int j = 0; j < g.n_r(); ++j) out.at(j, m - 1) = -2.0 * O[j];
    }
  }
  return from_modes(out);
}

GridFunction beurling(const GridFunction& h) {
  const auto& g = h.grid();
  require_unit_disk(g, "beurling");
  const auto& quad = g.quadrature();
  const int nt = g.n_theta();
  const auto in = to_modes(h);
  ModalField out(h.grid_ptr());
  for (int m = -nt / 2 + 1; m < nt / 2; ++m) {
    if (!in_band(m - 2, nt)) continue;
    const auto col = radial_column(in, m);
    const double n = m - 1;  // mode index of the Cauchy term being differentiated
    if (m <= 0) {
      const auto I = quad.inner(col, 1 - m);
      for (int j = 0; j < g.n_r(); ++j) out.at(j, m - 2) = 2.0 * n / g.radius(j) * I[j] + col[j];
    } else {
      const auto O = quad.outer(col, m - 1);
      for (int j = 0; j < g.n_r(); ++j) out.at(j, m - 2) = -2.0 * n / g.radius(j) * O[j] + col[j];
    }
  }
  return from_modes(out);
}

GridFunction cauchy_renormalized(const GridFunction& h, double R, const GridPtr& eval_grid) {
  if (!(R >= 1.0)) throw InvalidArgument("cauchy_renormalized: R must be >= 1");
  const auto& g = h.grid();
  require_unit_disk(g, "cauchy_renormalized");
  if (std::abs(eval_grid->outer_radius() - R) > 1e-12 * R)
    throw InvalidArgument("cauchy_renormalized: evaluation grid must cover D_R");
  if (eval_grid->n_theta() != g.n_theta())
    throw InvalidArgument("cauchy_renormalized: evaluation grid must share n_theta with the source");
  const int nt = g.n_theta();
  const auto& quad = g.quadrature();
  const auto inside = cauchy(h);
  const auto inside_modes = to_modes(inside);
  const auto in = to_modes(h);

  // Exterior: only modes m <= 0 survive, C_{m-1}(r) = 2 r^{m-1} int_0^1 h_m rho^{1-m}.
  std::vector<cplx> moments(nt, 0.0);
  for (int m = -nt / 2 + 1; m <= 0; ++m) {
    if (!in_band(m - 1, nt)) continue;
    const auto col = radial_column(in, m);
    moments[slot_of_mode(m, nt)] = quad.inner(col, 1 - m)[g.n_r() - 1];
  }

  ModalField out(eval_grid);
  for (int j = 0; j < eval_grid->n_r(); ++j) {
    const double r = eval_grid->radius(j);
    if (r <= 1.0 + 1e-12) {
      const int src = g.radius_index(r);
      for (int s = 0; s < nt; ++s) out.coeffs[static_cast<std::size_t>(j) * nt + s] =
          inside_modes.coeffs[static_cast<std::size_t>(src) * nt + s];
    } else {
      for (int m = -nt / 2 + 1; m <= 0; ++m) {
        if (!in_band(m - 1, nt)) continue;
        out.at(j, m - 1) = 2.0 * std::pow(r, m - 1) * moments[slot_of_mode(m, nt)];
      }
    }
  }
  return from_modes(out);
}

double cauchy_renormalized_l2_norm(const GridFunction& h, double R) {
  if (!(R >= 1.0)) throw InvalidArgument("cauchy_renormalized_l2_norm: R must be >= 1");
  const auto& g = h.grid();
  require_unit_disk(g, "cauchy_renormalized_l2_norm");
  const int nt = g.n_theta();
  const auto& quad = g.quadrature();
  const double inside = area_lp_norm(cauchy(h), 2.0);
  const auto in = to_modes(h);
  double exterior = 0.0;
  for (int m = -nt / 2 + 1; m <= 0; ++m) {
    if (!in_band(m - 1, nt)) continue;
    const auto col = radial_column(in, m);
    const cplx c = 2.0 * quad.inner(col, 1 - m)[g.n_r() - 1];
    // int_1^R r^{2(m-1)} r dr
    const double radial = m == 0 ? std::log(R) : (1.0 - std::pow(R, 2.0 * m)) / (-2.0 * m);
    exterior += kTwoPi * std::norm(c) * radial;
  }
  return std::sqrt(inside * inside + exterior);
}

GridFunction reflect_transform(const GridFunction& beta) {
  const auto& g = beta.grid();
  require_unit_disk(g, "reflect_transform");
  const auto& quad = g.quadrature();
  const int nt = g.n_theta();
  const int last = g.n_r() - 1;
  const auto in = to_modes(beta);
  ModalField out(beta.grid_ptr());
  for (int k = 0; in_band(k + 1, nt); ++k) {
    if (!in_band(-k, nt)) continue;
    std::vector<cplx> col(g.n_r());
    for (int j = 0; j < g.n_r(); ++j) col[j] = std::conj(in.at(j, -k)) * g.radius(j);
    const cplx c = -2.0 * quad.inner(col, k)[last];
    for (int j = 0; j < g.n_r(); ++j) out.at(j, k + 1) = c * std::pow(g.radius(j), k + 1);
  }
  return from_modes(out);
}

GridFunction green_potential(const GridFunction& psi) {
  const auto& g = psi.grid();
  require_unit_disk(g, "green_potential");
  const auto& quad = g.quadrature();
  const int nt = g.n_theta();
  const int nr = g.n_r();
  const auto in = to_modes(psi);
  ModalField out(psi.grid_ptr());
  for (int m = -nt / 2 + 1; m < nt / 2; ++m) {
    auto col = radial_column(in, m);
    for (int j = 0; j < nr; ++j) col[j] *= g.radius(j);
    if (m == 0) {
      // P_0(r) = -int_r^1 G(rho)/rho d rho with G(rho) = int_0^rho psi_0 t dt.
      auto G = quad.inner(col, 0);
      for (int j = 0; j < nr; ++j) G[j] /= g.radius(j);
      const auto P = quad.outer(G, 0);
      for (int j = 0; j < nr; ++j) out.at(j, 0) = -P[j];
    } else {
      const int k = std::abs(m);
      const auto I = quad.inner(col, k);
      const auto O = quad.outer(col, k);
      const cplx full = I[nr - 1];
      for (int j = 0; j < nr; ++j)
        out.at(j, m) = (std::pow(g.radius(j), k) * full - I[j] - O[j]) / (2.0 * k);
    }
  }
  auto result = from_modes(out);
  for (int k = 0; k < nt; ++k) result(g.boundary_index(), k) = 0.0;
  return result;
}

GridFunction poisson_extend(const BoundaryFunction& u, const GridPtr& grid) {
  const auto& g = *grid;
  require_boundary_size(u, g, "poisson_extend");
  const auto& c = u.fourier();
  const int nt = g.n_theta();
  ModalField out(grid);
  for (int j = 0; j < g.n_r(); ++j) {
    const double r = g.radius(j) / g.outer_radius();
    for (int s = 0; s < nt; ++s) {
      const int m = mode_of_slot(s, nt);
      out.coeffs[static_cast<std::size_t>(j) * nt + s] = c[s] * std::pow(r, std::abs(m));
    }
  }
  auto result = from_modes(out);
  for (int k = 0; k < nt; ++k) result(g.boundary_index(), k) = u[k];
  return result;
}

BoundaryFunction conjugate_function(const BoundaryFunction& psi) {
  const auto& c = psi.fourier();
  const int n = psi.size();
  std::vector<cplx> d(n, 0.0);
  for (int s = 0; s < n; ++s) {
    const int m = mode_of_slot(s, n);
    if (m == 0 || !in_band(m, n)) continue;
    d[s] = c[s] * cplx(0.0, m > 0 ? -1.0 : 1.0);
  }
  auto v = inverse_dft(d);
  // Real data stays real; strip the round-off imaginary part in that case.
  if (psi.max_abs_imag() == 0.0)
    for (auto& x : v) x = {x.real(), 0.0};
  return BoundaryFunction(std::move(v));
}

GridFunction harmonic_conjugate(const GridFunction& u) {
  return poisson_extend(conjugate_function(boundary_trace(u)), u.grid_ptr());
}

double harmonicity_defect(const GridFunction& u) {
  return interior_l2_norm(u - poisson_extend(boundary_trace(u), u.grid_ptr()));
}

GridFunction holomorphic_extension(const BoundaryFunction& u, double imag_mean, const GridPtr& grid) {
  const auto& g = *grid;
  require_boundary_size(u, g, "holomorphic_extension");
  const int nt = g.n_theta();
  // Real part of the data only.
  const auto re = u.map([](cplx z) { return cplx(z.real(), 0.0); });
  const auto& c = re.fourier();
  std::vector<cplx> hol(nt, 0.0);
  hol[0] = cplx(c[0].real(), imag_mean);
  for (int m = 1; m < nt / 2; ++m) hol[slot_of_mode(m, nt)] = 2.0 * c[slot_of_mode(m, nt)];
  // The Nyquist term is real at the nodes; carry it as z^{n/2}.
  hol[nt / 2] = c[nt / 2];
  ModalField out(grid);
  for (int j = 0; j < g.n_r(); ++j) {
    const double r = g.radius(j) / g.outer_radius();
    for (int m = 0; m <= nt / 2; ++m) {
      const int s = m == nt / 2 ? nt / 2 : slot_of_mode(m, nt);
      out.coeffs[static_cast<std::size_t>(j) * nt + s] = hol[s] * std::pow(r, m);
    }
  }
  return from_modes(out);
}

DbarSolution solve_dbar(const GridFunction& a, const BoundaryFunction& psi, double lambda, double theta0) {
  const auto& g = a.grid();
  require_boundary_size(psi, g, "solve_dbar");
  if (psi.max_abs_imag() > 0.0) throw InvalidArgument("solve_dbar: boundary data psi must be real-valued");
  const cplx rot = std::polar(1.0, theta0);
  const auto Ca = cauchy(a);
  const auto trace_c = rot * boundary_trace(Ca);
  const auto target = psi - trace_c.map([](cplx z) { return cplx(z.real(), 0.0); });
  const double imag_int = boundary_integral(trace_c).imag();
  const double kappa = (lambda - imag_int) / kTwoPi;
  auto G = holomorphic_extension(target, kappa, a.grid_ptr());
  DbarSolution sol{Ca + std::conj(rot) * G, 0.0, 0.0, 0.0};

  const auto dbarA = wirtinger_derivatives(sol.A).second;
  sol.dbar_residual = interior_l2_norm(dbarA - a);
  const auto tr = rot * boundary_trace(sol.A);
  const auto re_tr = tr.map([](cplx z) { return cplx(z.real(), 0.0); });
  sol.trace_residual = boundary_lp_norm(re_tr - psi, 2.0);
  sol.mean_residual = std::abs(boundary_integral(tr).imag() - lambda);
  return sol;
}

}  // namespace phdisk
