#include "phdisk/diagnostics.hpp"

#include <gsl/gsl_multifit.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phdisk/transforms.hpp"

namespace phdisk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kArcTol = 1e-12;

std::vector<int> nodes_in(const Arc& arc, int n) {
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    if (arc.contains(kTwoPi * k / n)) out.push_back(k);
  return out;
}

double node_measure(std::size_t count, int n) { return static_cast<double>(count) * kTwoPi / n; }

cplx arc_mean(const BoundaryFunction& h, const std::vector<int>& nodes) {
  cplx s = 0.0;
  for (int k : nodes) s += h[k];
  return s / static_cast<double>(nodes.size());
}

double oscillation_on(const BoundaryFunction& h, const std::vector<int>& nodes) {
  if (nodes.empty()) return 0.0;
  const cplx m = arc_mean(h, nodes);
  double s = 0.0;
  for (int k : nodes) s += std::abs(h[k] - m);
  return s / static_cast<double>(nodes.size());
}

double localized(const BoundaryFunction& h, const Arc& arc) {
  const auto nodes = nodes_in(arc, h.size());
  if (nodes.size() < 2) return 0.0;
  const double mid = 0.5 * (arc.start + arc.end);
  return std::max({oscillation_on(h, nodes), localized(h, {arc.start, mid}), localized(h, {mid, arc.end})});
}

// Coefficient of determination of the least-squares fit of y on the columns
// of X (first column constant).
double r_squared(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  const std::size_t n = y.size();
  const std::size_t m = X.front().size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mean) * (v - mean);
  if (ss_tot <= 1e-300) return 1.0;

  gsl_matrix* A = gsl_matrix_alloc(n, m);
  gsl_vector* b = gsl_vector_alloc(n);
  gsl_vector* c = gsl_vector_alloc(m);
  gsl_matrix* cov = gsl_matrix_alloc(m, m);
  gsl_multifit_linear_workspace* ws = gsl_multifit_linear_alloc(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(b, i, y[i]);
    for (std::size_t j = 0; j < m; ++j) gsl_matrix_set(A, i, j, X[i][j]);
  }
  double chisq = 0.0;
  gsl_multifit_linear(A, b, c, cov, &chisq, ws);
  gsl_multifit_linear_free(ws);
  gsl_matrix_free(cov);
  gsl_vector_free(c);
  gsl_vector_free(b);
  gsl_matrix_free(A);
  return 1.0 - chisq / ss_tot;
}

}  // namespace

bool Arc::contains(double theta) const {
  double t = std::fmod(theta - start, kTwoPi);
  if (t < -kArcTol) t += kTwoPi;
  if (t > kTwoPi - kArcTol) t -= kTwoPi;
  return t >= -kArcTol && t < length() - kArcTol;
}

ArcFamily ArcFamily::dyadic(int n_theta_coarse) {
  if (n_theta_coarse < 1) throw InvalidArgument("dyadic arc family: resolution must be positive");
  ArcFamily f;
  for (int count = 1; count <= n_theta_coarse; count *= 2)
    for (int i = 0; i < count; ++i) f.arcs.push_back({kTwoPi * i / count, kTwoPi * (i + 1) / count});
  return f;
}

bool DiagnosticReport::all_satisfied() const {
  return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

void DiagnosticReport::add(std::string label, double measured_value, double bound_value) {
  labels.push_back(std::move(label));
  measured.push_back(measured_value);
  bound.push_back(bound_value);
  satisfied.push_back(measured_value <= bound_value * (1.0 + slack));
}

double mean_oscillation(const BoundaryFunction& h, const Arc& arc) {
  h.require_finite("mean_oscillation");
  return oscillation_on(h, nodes_in(arc, h.size()));
}

double localized_oscillation(const BoundaryFunction& h, const Arc& arc) {
  h.require_finite("localized_oscillation");
  return localized(h, arc);
}

BmoResult bmo_oscillation(const BoundaryFunction& h, const ArcFamily& family) {
  h.require_finite("bmo_oscillation");
  BmoResult r;
  for (const auto& arc : family.arcs) {
    r.per_arc.push_back(oscillation_on(h, nodes_in(arc, h.size())));
    r.seminorm = std::max(r.seminorm, r.per_arc.back());
  }
  return r;
}

double ap_constant(const BoundaryFunction& weight, double p, const ArcFamily& family) {
  if (!(p > 1.0)) throw InvalidArgument("ap_constant: exponent must exceed 1");
  weight.require_finite("ap_constant");
  for (const auto& v : weight.values())
    if (!(v.real() > 0.0) || v.imag() != 0.0) throw InvalidArgument("ap_constant: weight must be positive");
  const double q = -1.0 / (p - 1.0);
  double sup = 0.0;
  for (const auto& arc : family.arcs) {
    const auto nodes = nodes_in(arc, weight.size());
    if (nodes.empty()) continue;
    // The constant is scale invariant; dividing by one sample keeps it exact
    // for constant weights.
    const double ref = weight[nodes.front()].real();
    double a = 0.0, b = 0.0;
    for (int k : nodes) {
      const double v = weight[k].real() / ref;
      a += v;
      b += std::pow(v, q);
    }
    a /= static_cast<double>(nodes.size());
    b /= static_cast<double>(nodes.size());
    sup = std::max(sup, a * std::pow(b, p - 1.0));
  }
  return sup;
}

DiagnosticReport jn_exp_check(const BoundaryFunction& h, const Arc& arc) {
  h.require_finite("jn_exp_check");
  const auto nodes = nodes_in(arc, h.size());
  const double M = localized(h, arc);
  double scale = 0.0;
  for (int k : nodes) scale = std::max(scale, std::abs(h[k]));
  if (nodes.empty() || M <= 1e-14 * (1.0 + scale))
    throw InvalidArgument("jn_exp_check: M_h(I) = 0, degenerate normalization (h is constant on the arc)");
  const double c = 1.0 / (4.0 * kE * M);
  double lhs = 0.0;
  for (int k : nodes) lhs += std::exp(c * std::abs(h[k]));
  lhs *= kTwoPi / h.size();
  const double rhs = (1.0 + kE) * node_measure(nodes.size(), h.size()) * std::exp(c * std::abs(arc_mean(h, nodes)));
  DiagnosticReport r;
  r.name = "jn_exp_check";
  r.slack = 0.0;
  r.extras["M_h"] = M;
  r.add("exp_integral", lhs, rhs);
  return r;
}

DiagnosticReport exp_integrability_report(const GridFunction& f, const std::vector<double>& ells,
                                          const ExpIntegrabilityOptions& options) {
  const auto& g = f.grid();
  // Without the boundary ring the integral runs over the disk of the last
  // interior ring, on a grid whose rings are the interior rings of f.
  GridFunction src = f;
  if (options.exclude_boundary_ring) {
    auto inner = make_scaled_grid(g.n_theta(), g.n_r() - 1, g.radius(g.boundary_index() - 1));
    std::vector<cplx> v(f.values().begin(), f.values().end() - g.n_theta());
    std::vector<std::uint8_t> m;
    if (f.has_mask()) m.assign(f.mask().begin(), f.mask().end() - g.n_theta());
    src = GridFunction(inner, std::move(v), std::move(m));
  }
  const auto& lambdas = options.lambdas;
  if (lambdas.size() < 4) throw InvalidArgument("exp_integrability_report: need at least four lambda values");
  DiagnosticReport r;
  r.name = "exp_integrability";
  r.tables["lambda"] = lambdas;
  for (double ell : ells) {
    std::vector<double> y;
    for (double lam : lambdas) {
      const auto e = src.map([s = ell * lam](cplx z) { return cplx(std::exp(s * std::abs(z)), 0.0); });
      double integral = 0.0;
      try {
        integral = area_lp_norm(e, 1.0);
      } catch (const MaskedValueError&) {
        throw MaskedValueError("exp_integrability_report: masked or overflowing node inside the integration disk "
                               "at ell = " + std::to_string(ell) + ", lambda = " + std::to_string(lam) +
                               "; reduce the lambda range or exclude the boundary ring");
      }
      if (!std::isfinite(integral))
        throw MaskedValueError("exp_integrability_report: integral overflowed at ell = " + std::to_string(ell) +
                               ", lambda = " + std::to_string(lam) + "; reduce the lambda range");
      y.push_back(std::log(integral));
    }
    std::vector<std::vector<double>> quad, cubic;
    for (double lam : lambdas) {
      quad.push_back({1.0, lam * lam});
      cubic.push_back({1.0, lam * lam, lam * lam * lam});
    }
    const double r2q = r_squared(quad, y);
    const double r2c = r_squared(cubic, y);
    r.tables["log_integral_ell_" + std::to_string(ell)] = y;
    r.add("ell=" + std::to_string(ell), 0.95 * r2c, r2q);
  }
  return r;
}

DiagnosticReport equicontinuity_modulus(const GridFunction& beta, std::vector<double> side_lengths) {
  const auto& g = beta.grid();
  const auto d = beurling(beta);
  std::sort(side_lengths.begin(), side_lengths.end(), std::greater<>());
  DiagnosticReport r;
  r.name = "equicontinuity_modulus";
  std::vector<double> beta_mass;
  double previous = 0.0;
  for (std::size_t idx = 0; idx < side_lengths.size(); ++idx) {
    const double eps = side_lengths[idx];
    if (!(eps > 0.0)) throw InvalidArgument("equicontinuity_modulus: side lengths must be positive");
    const double cell = eps / 2.0;
    const int m = static_cast<int>(std::ceil(2.0 / cell - 1e-12));
    std::vector<double> sd(static_cast<std::size_t>(m) * m, 0.0), sb(sd.size(), 0.0);
    for (int j = 0; j < g.n_r(); ++j) {
      const double w = g.radial_weight(j) * g.angular_weight();
      for (int k = 0; k < g.n_theta(); ++k) {
        const cplx z = g.node(j, k);
        const int ix = std::clamp(static_cast<int>(std::floor((z.real() + 1.0) / cell)), 0, m - 1);
        const int iy = std::clamp(static_cast<int>(std::floor((z.imag() + 1.0) / cell)), 0, m - 1);
        sd[static_cast<std::size_t>(iy) * m + ix] += w * std::norm(d(j, k));
        sb[static_cast<std::size_t>(iy) * m + ix] += w * std::norm(beta(j, k));
      }
    }
    double modulus = 0.0, mass = 0.0;
    const int last = std::max(m - 1, 1);
    for (int iy = 0; iy < last; ++iy)
      for (int ix = 0; ix < last; ++ix) {
        double a = 0.0, b = 0.0;
        for (int dy = 0; dy < 2 && iy + dy < m; ++dy)
          for (int dx = 0; dx < 2 && ix + dx < m; ++dx) {
            a += sd[static_cast<std::size_t>(iy + dy) * m + ix + dx];
            b += sb[static_cast<std::size_t>(iy + dy) * m + ix + dx];
          }
        modulus = std::max(modulus, std::sqrt(std::max(a, 0.0)) + std::sqrt(std::max(b, 0.0)));
        mass = std::max(mass, std::sqrt(std::max(b, 0.0)));
      }
    beta_mass.push_back(mass);
    r.add("eps=" + std::to_string(eps), modulus, idx == 0 ? modulus : previous);
    previous = modulus;
  }
  r.tables["side_length"] = side_lengths;
  r.tables["beta_mass"] = beta_mass;
  return r;
}

DiagnosticReport c2_growth_curve(const GridFunction& h, const std::vector<double>& radii_in) {
  auto radii = radii_in;
  std::sort(radii.begin(), radii.end());
  const double hn = area_lp_norm(h, 2.0);
  DiagnosticReport r;
  r.name = "c2_growth_curve";
  r.slack = 0.05;
  std::vector<double> norms;
  double first = 0.0, measured_c = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double R = radii[i];
    if (!(R >= 1.0)) throw InvalidArgument("c2_growth_curve: radii must be >= 1");
    const double n = cauchy_renormalized_l2_norm(h, R);
    norms.push_back(n);
    const double ratio = hn > 0.0 ? n / (R * (1.0 + std::sqrt(std::log(R))) * hn) : 0.0;
    if (i == 0) first = ratio;
    measured_c = std::max(measured_c, ratio);
    r.add("R=" + std::to_string(R), ratio, first);
  }
  r.tables["R"] = radii;
  r.tables["c2_l2_norm"] = norms;
  r.extras["measured_constant"] = measured_c;
  return r;
}

namespace {

void require_zero_trace(const GridFunction& f) {
  double trace_sup = 0.0;
  for (const auto& v : boundary_trace(f).values()) trace_sup = std::max(trace_sup, std::abs(v));
  if (trace_sup > 1e-8)
    throw InvalidArgument("multiplier_ratio: f must vanish on T (sup |tr f| = " + std::to_string(trace_sup) + ")");
}

double maximal_norm(const GridFunction& g, double p, double gamma) {
  const double rhs = boundary_lp_norm(nontangential_max(g, gamma), p);
  if (!(rhs > 0.0)) throw InvalidArgument("multiplier_ratio: ||M_gamma g||_p vanishes");
  return rhs;
}

// sup over interior rings of (int_{T_rho} e^{pf} |g|^p)^{1/p}
double weighted_ring_sup(const GridFunction& f, const GridFunction& g, double p) {
  const auto& grid = f.grid();
  double lhs = 0.0;
  for (int j = 0; j < grid.boundary_index(); ++j) {
    double s = 0.0;
    for (int k = 0; k < grid.n_theta(); ++k) {
      if (f.masked(j, k) || g.masked(j, k)) throw MaskedValueError("multiplier_ratio: masked node");
      s += std::exp(p * f(j, k).real()) * std::pow(std::abs(g(j, k)), p);
    }
    lhs = std::max(lhs, std::pow(s * grid.radius(j) * grid.angular_weight(), 1.0 / p));
  }
  return lhs;
}

}  // namespace

double multiplier_ratio(const GridFunction& f, const GridFunction& g, double p, double gamma) {
  if (!(p >= 1.0)) throw InvalidArgument("multiplier_ratio: exponent must be >= 1");
  require_zero_trace(f);
  return weighted_ring_sup(f, g, p) / maximal_norm(g, p, gamma);
}

DiagnosticReport multiplier_family(const std::vector<GridFunction>& fs, const std::vector<GridFunction>& gs,
                                   double p, double gamma) {
  if (!(p >= 1.0)) throw InvalidArgument("multiplier_ratio: exponent must be >= 1");
  if (fs.empty() || gs.empty()) throw InvalidArgument("multiplier_family: empty family");
  for (const auto& f : fs) require_zero_trace(f);
  std::vector<double> rhs;
  for (const auto& g : gs) rhs.push_back(maximal_norm(g, p, gamma));
  std::vector<double> ratios;
  for (const auto& f : fs)
    for (std::size_t i = 0; i < gs.size(); ++i) ratios.push_back(weighted_ring_sup(f, gs[i], p) / rhs[i]);
  auto sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  DiagnosticReport r;
  r.name = "multiplier_family";
  r.tables["ratios"] = ratios;
  r.extras["median"] = median;
  r.add("max_ratio", sorted.back(), 10.0 * median);
  return r;
}

DiagnosticReport trace_convergence(const GridFunction& w, double p) {
  const auto& g = w.grid();
  const auto wt = boundary_trace(w);
  const int first = 3 * g.n_r() / 4;
  const int last = g.n_r() - 2;
  if (first > last) throw InvalidArgument("trace_convergence: grid has too few rings");
  DiagnosticReport r;
  r.name = "trace_convergence";
  std::vector<double> radii, errors;
  for (int j = first; j <= last; ++j) {
    double s = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) {
      if (w.masked(j, k)) throw MaskedValueError("trace_convergence: masked node near the boundary");
      s += std::pow(std::abs(w(j, k) - wt[k]), p);
    }
    radii.push_back(g.radius(j));
    errors.push_back(std::pow(s * kTwoPi / g.n_theta(), 1.0 / p));
  }
  r.tables["radius"] = radii;
  r.tables["trace_error"] = errors;
  r.add("last_vs_first", errors.back(), 0.5 * errors.front());
  return r;
}

double boundary_sobolev_seminorm(const BoundaryFunction& g) {
  g.require_finite("boundary_sobolev_seminorm");
  const int n = g.size();
  const double dt = kTwoPi / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int d = std::abs(i - j);
      const double lam = std::min(d, n - d) * dt;
      s += std::norm(g[i] - g[j]) / (lam * lam);
    }
  return std::sqrt(s * dt * dt);
}

double weighted_conjugate_ratio(const BoundaryFunction& psi, const BoundaryFunction& weight) {
  if (psi.size() != weight.size()) throw InvalidArgument("weighted_conjugate_ratio: length mismatch");
  const auto conj_psi = conjugate_function(psi);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < psi.size(); ++k) {
    num += std::norm(conj_psi[k]) * weight[k].real();
    den += std::norm(psi[k]) * weight[k].real();
  }
  if (!(den > 0.0)) throw InvalidArgument("weighted_conjugate_ratio: weighted norm of psi vanishes");
  return num / den;
}

}  // namespace phdisk
