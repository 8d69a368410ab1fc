#include "phdisk/solvers.hpp"

#include <cmath>
#include <numbers>

#include "phdisk/transforms.hpp"

namespace phdisk {

namespace {

constexpr double kPi = std::numbers::pi;

// Damped Picard bookkeeping: x <- x + tau (G(x) - x), tau halves whenever
// the increment ||G(x) - x|| grows, down to kMinDamping.
class DampedIteration {
 public:
  DampedIteration(const SolverConfig& cfg, std::string name)
      : cfg_(cfg), name_(std::move(name)), tau_(cfg.damping) {}

  // Returns true once the increment is below tolerance.
  bool record(double increment) {
    history_.push_back(increment);
    if (!std::isfinite(increment))
      throw ConvergenceError(name_ + ": increment became non-finite", history_);
    if (increment < cfg_.tol) return true;
    if (history_.size() > 1 && increment > history_[history_.size() - 2])
      tau_ = std::max(tau_ / 2.0, kMinDamping);
    if (static_cast<int>(history_.size()) >= cfg_.max_iter)
      throw ConvergenceError(name_ + ": no convergence in " + std::to_string(cfg_.max_iter) +
                                 " iterations (damping " + std::to_string(tau_) + ", last increment " +
                                 std::to_string(increment) + ")",
                             history_);
    return false;
  }

  double tau() const { return tau_; }
  const std::vector<double>& history() const { return history_; }
  int iterations() const { return static_cast<int>(history_.size()); }

 private:
  const SolverConfig& cfg_;
  std::string name_;
  double tau_;
  std::vector<double> history_;
};

GridFunction constant(const GridPtr& g, cplx c) { return GridFunction::sample(g, [c](cplx) { return c; }); }

GridFunction add(const GridFunction& f, cplx c) { return f.map([c](cplx z) { return z + c; }); }

BoundaryFunction re(const BoundaryFunction& b) { return b.map([](cplx z) { return cplx(z.real(), 0.0); }); }
BoundaryFunction im(const BoundaryFunction& b) { return b.map([](cplx z) { return cplx(z.imag(), 0.0); }); }

GridFunction rotate(const GridFunction& beta, const GridFunction& phi) {
  // beta * e^{-2 i phi} for real phi
  return beta * phi.map([](cplx z) { return std::exp(cplx(0.0, -2.0 * z.real())); });
}

void require_same_shape(const GridFunction& a, const GridFunction& b, const char* what) {
  if (a.grid().n_r() != b.grid().n_r() || a.grid().n_theta() != b.grid().n_theta())
    throw InvalidArgument(std::string(what) + ": inputs live on different grids");
}

void require_real_boundary(const BoundaryFunction& psi, const DiskGrid& g, const char* what) {
  if (psi.size() != g.n_theta())
    throw InvalidArgument(std::string(what) + ": boundary data length does not match n_theta");
  psi.require_finite(what);
  if (psi.max_abs_imag() > 0.0) throw InvalidArgument(std::string(what) + ": psi must be real-valued");
}

void require_nonzero(const GridFunction& F, const char* what) {
  for (std::size_t i = 0; i < F.values().size(); ++i)
    if (!F.masked_flat(i) && std::abs(F.values()[i]) > 0.0) return;
  throw InvalidArgument(std::string(what) + ": F is identically zero");
}

// Zero-trace fixed point phi = P(4 Im d(beta e^{-2i(base + phi)})), warm
// started from phi.
GridFunction inner_fixed_point(const GridFunction& beta, const GridFunction& base, GridFunction phi,
                               const SolverConfig& cfg, const char* name, int* iterations = nullptr) {
  DampedIteration it(cfg, name);
  while (true) {
    const auto g = rotate(beta, base + phi);
    const auto next = green_potential(4.0 * wirtinger_derivatives(g).first.imag());
    const auto step = next - phi;
    if (it.record(sobolev_norm(step, 2.0))) {
      if (iterations) *iterations += it.iterations();
      return next;
    }
    phi += it.tau() * step;
  }
}

double denominator_or_one(double d) { return d > 0.0 ? d : 1.0; }

void fill_history(SolveReport& r, const DampedIteration& it) {
  r.iterations = it.iterations();
  r.increment_history = it.history();
  r.final_damping = it.tau();
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("solver: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("solver: max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("solver: damping must lie in (0, 1]");
  if (!(p > 1.0)) throw InvalidArgument("solver: Hardy exponent p must exceed 1");
  if (!(gamma > 0.0 && gamma < kPi / 2)) throw InvalidArgument("solver: gamma must lie in (0, pi/2)");
}

ParametrizeResult parametrize_imag(const GridFunction& alpha, const GridFunction& F, const BoundaryFunction& psi,
                                   double lambda, const SolverConfig& cfg,
                                   const std::optional<GridFunction>& initial_s) {
  cfg.validate();
  require_same_shape(alpha, F, "parametrize_imag");
  require_real_boundary(psi, alpha.grid(), "parametrize_imag");
  require_nonzero(F, "parametrize_imag");
  const auto& grid = alpha.grid_ptr();

  // Holomorphic A with Im tr A = psi and int_T Re A = lambda; s = s' + A.
  const auto A = solve_dbar(constant(grid, 0.0), psi, -lambda, -kPi / 2).A;
  const auto beta = alpha * phase_factor(exp(A) * F, cfg.zero_threshold);

  GridFunction phi(grid);
  if (initial_s) {
    require_same_shape(alpha, *initial_s, "parametrize_imag");
    phi = (*initial_s - A).imag();
    for (int k = 0; k < grid->n_theta(); ++k) phi(grid->boundary_index(), k) = 0.0;
  }

  DampedIteration it(cfg, "parametrize_imag");
  while (true) {
    const auto next = green_potential(4.0 * wirtinger_derivatives(rotate(beta, phi)).first.imag());
    const auto step = next - phi;
    if (it.record(sobolev_norm(step, 2.0))) {
      phi = next;
      break;
    }
    phi += it.tau() * step;
  }

  const auto Cg = cauchy(rotate(beta, phi));
  const auto tr_im = im(boundary_trace(Cg));
  auto phi1 = Cg.real() + poisson_extend(conjugate_function(tr_im), grid);
  phi1 = add(phi1, -boundary_mean(boundary_trace(phi1)).real());
  const auto s = phi1 + cplx(0.0, 1.0) * phi + A;

  ParametrizeResult out{s, {}};
  fill_history(out.report, it);
  const auto tr = boundary_trace(s);
  out.report.residual_beltrami = residual_beltrami(reconstruct(s, F), alpha);
  out.report.boundary_mismatch = boundary_lp_norm(im(tr) - psi, 2.0);
  out.report.normalization_defects = {std::abs(boundary_integral(tr).real() - lambda)};
  out.report.measured_constant =
      sobolev_norm(s, 2.0) /
      denominator_or_one(area_lp_norm(alpha, 2.0) + boundary_lp_norm(psi, 2.0) + std::abs(lambda));
  return out;
}

ParametrizeResult parametrize_real(const GridFunction& alpha, const GridFunction& F, const BoundaryFunction& psi,
                                   double lambda, const SolverConfig& cfg,
                                   const std::optional<GridFunction>& initial_s) {
  cfg.validate();
  require_same_shape(alpha, F, "parametrize_real");
  require_real_boundary(psi, alpha.grid(), "parametrize_real");
  require_nonzero(F, "parametrize_real");
  const auto& grid = alpha.grid_ptr();

  // Holomorphic A with Re tr A = psi and int_T Im A = lambda; s = s' + A.
  const auto A = solve_dbar(constant(grid, 0.0), psi, lambda, 0.0).A;
  const auto beta = alpha * phase_factor(exp(A) * F, cfg.zero_threshold);

  // Im s' = E(u) + phi with u the zero-mean boundary value and phi zero on T.
  BoundaryFunction u(std::vector<cplx>(grid->n_theta(), 0.0));
  GridFunction phi(grid);
  if (initial_s) {
    require_same_shape(alpha, *initial_s, "parametrize_real");
    const auto im_s = (*initial_s - A).imag();
    const auto tr = boundary_trace(im_s);
    u = tr.map([m = boundary_mean(tr)](cplx z) { return z - m; });
    phi = im_s - poisson_extend(u, grid);
  }

  DampedIteration it(cfg, "parametrize_real");
  int inner_iterations = 0;
  while (true) {
    const auto Eu = poisson_extend(u, grid);
    phi = inner_fixed_point(beta, Eu, phi, cfg, "parametrize_real (inner)", &inner_iterations);
    const auto R = cauchy(rotate(beta, Eu + phi));
    const auto tr = boundary_trace(R);
    const auto tr_im = im(tr);
    const auto Bu = tr_im.map([m = boundary_mean(tr_im)](cplx z) { return z - m; }) -
                    conjugate_function(re(tr));
    const auto step = Bu - u;
    if (it.record(sobolev_norm(poisson_extend(step, grid), 2.0))) {
      u = Bu;
      break;
    }
    u = u + it.tau() * step;
  }

  const auto Eu = poisson_extend(u, grid);
  phi = inner_fixed_point(beta, Eu, phi, cfg, "parametrize_real (inner)", &inner_iterations);
  const auto phi2 = Eu + phi;
  const auto Cg = cauchy(rotate(beta, phi2));
  const auto v = u - im(boundary_trace(Cg));
  auto phi1 = Cg.real() - poisson_extend(conjugate_function(v), grid);
  phi1 = add(phi1, -boundary_mean(boundary_trace(phi1)).real());
  const auto s = phi1 + cplx(0.0, 1.0) * phi2 + A;

  ParametrizeResult out{s, {}};
  fill_history(out.report, it);
  out.report.extras["inner_iterations"] = inner_iterations;
  const auto tr = boundary_trace(s);
  out.report.residual_beltrami = residual_beltrami(reconstruct(s, F), alpha);
  out.report.boundary_mismatch = boundary_lp_norm(re(tr) - psi, 2.0);
  out.report.normalization_defects = {std::abs(boundary_integral(tr).imag() - lambda)};
  out.report.measured_constant =
      sobolev_norm(s, 2.0) /
      denominator_or_one(area_lp_norm(alpha, 2.0) + boundary_lp_norm(psi, 2.0) + std::abs(lambda));
  return out;
}

namespace {

struct RieszBoundary {
  BoundaryFunction F_T;
  BoundaryFunction eh;  // e^h, h = Re tr s
};

RieszBoundary riesz_boundary(const GridFunction& s, const BoundaryFunction& psi, double c) {
  const auto h = re(boundary_trace(s));
  const auto eh = h.map([](cplx z) { return cplx(std::exp(z.real()), 0.0); });
  const auto x = h.map([](cplx z) { return cplx(std::exp(-z.real()), 0.0); }) * psi;
  const auto xt = conjugate_function(x);
  const double mass = boundary_integral(eh).real();
  if (!(mass > 0.0)) throw Error("solve_riesz: int_T e^h is not positive");
  const double c0 = (c - boundary_integral(eh * xt).real()) / mass;
  const auto F_T = (x + cplx(0.0, 1.0) * xt).map([c0](cplx z) { return z + cplx(0.0, c0); });
  return {F_T, eh};
}

}  // namespace

RieszResult solve_riesz(const GridFunction& alpha, const BoundaryFunction& psi, double c, const SolverConfig& cfg,
                        const std::optional<GridFunction>& initial_s) {
  cfg.validate();
  require_real_boundary(psi, alpha.grid(), "solve_riesz");
  alpha.require_finite("solve_riesz: alpha");
  const auto& grid = alpha.grid_ptr();

  const double psi_norm = boundary_lp_norm(psi, cfg.p);
  if (psi_norm == 0.0 && c == 0.0) {
    GridFunction zero(grid);
    RieszResult out{zero, BoundaryFunction(std::vector<cplx>(grid->n_theta(), 0.0)), zero, zero, {}};
    out.report.normalization_defects = {0.0, 0.0};
    return out;
  }

  GridFunction s(grid);
  if (initial_s) {
    require_same_shape(alpha, *initial_s, "solve_riesz");
    s = *initial_s;
  }

  DampedIteration it(cfg, "solve_riesz");
  while (true) {
    const auto F = poisson_extend(riesz_boundary(s, psi, c).F_T, grid);
    const auto rotation = s.map([](cplx z) { return std::exp(cplx(0.0, -2.0 * z.imag())); });
    const auto beta = alpha * rotation * phase_factor(F, cfg.zero_threshold);
    const auto next = cauchy(beta) - reflect_transform(beta);
    const auto step = next - s;
    if (it.record(sobolev_norm(step, 2.0))) {
      s = next;
      break;
    }
    s += it.tau() * step;
  }

  const auto bd = riesz_boundary(s, psi, c);
  const auto F = poisson_extend(bd.F_T, grid);
  auto w = reconstruct(s, F);
  const auto w_T = bd.eh * bd.F_T;
  for (int k = 0; k < grid->n_theta(); ++k) w(grid->boundary_index(), k) = w_T[k];

  RieszResult out{w, im(w_T), s, F, {}};
  fill_history(out.report, it);
  out.report.residual_beltrami = residual_beltrami(w, alpha);
  out.report.boundary_mismatch = boundary_lp_norm(re(w_T) - psi, cfg.p);
  double max_im_s = 0.0;
  for (const auto& z : boundary_trace(s).values()) max_im_s = std::max(max_im_s, std::abs(z.imag()));
  out.report.normalization_defects = {std::abs(boundary_integral(w_T).imag() - c), max_im_s};
  out.report.measured_constant = hardy_norm(w, cfg.p) / (psi_norm + std::abs(c));
  return out;
}

ConductivityResult solve_conductivity(const GridFunction& sigma, const BoundaryFunction& psi,
                                      const SolverConfig& cfg) {
  cfg.validate();
  const auto& grid = sigma.grid_ptr();
  require_real_boundary(psi, *grid, "solve_conductivity");
  for (int k = 0; k < grid->n_theta(); ++k)
    if (sigma.masked(grid->boundary_index(), k))
      throw InvalidArgument("solve_conductivity: sigma is masked on the boundary ring");
  for (std::size_t i = 0; i < sigma.values().size(); ++i) {
    if (sigma.masked_flat(i)) continue;
    const cplx z = sigma.values()[i];
    if (!(z.real() > 0.0) || z.imag() != 0.0 || !std::isfinite(z.real()))
      throw InvalidArgument("solve_conductivity: sigma must be positive and real at every node");
  }

  const auto half_log = sigma.map([](cplx z) { return cplx(0.5 * std::log(z.real()), 0.0); });
  auto alpha = wirtinger_derivatives(half_log).second;
  // Isolated singular points of sigma carry no mass: alpha is taken as 0 there.
  if (alpha.has_mask()) {
    std::vector<cplx> vals(alpha.values().begin(), alpha.values().end());
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (alpha.masked_flat(i)) vals[i] = 0.0;
    alpha = GridFunction(grid, std::move(vals));
  }
  const auto root = sigma.map([](cplx z) { return cplx(std::sqrt(z.real()), 0.0); });
  const auto root_T = boundary_trace(root);
  const auto data = re(root_T * psi);

  auto riesz = solve_riesz(alpha, data, 0.0, cfg);
  const auto inv_root = root.map([](cplx z) { return cplx(1.0 / z.real(), 0.0); });
  ConductivityResult out{riesz.w.real() * inv_root, riesz.w.imag() * root, riesz.w, riesz.report};

  const double u_norm = interior_l2_norm(out.u);
  out.report.extras["pde_residual"] = conductivity_residual(sigma, out.u) / denominator_or_one(u_norm);
  const auto weighted = out.u * root;
  out.report.extras["boundary_match"] = boundary_lp_norm(boundary_trace(weighted) - data, cfg.p);
  const int last_interior = grid->boundary_index() - 1;
  std::vector<cplx> ring(weighted.ring(last_interior).begin(), weighted.ring(last_interior).end());
  out.report.extras["limit_match"] = boundary_lp_norm(BoundaryFunction(std::move(ring)) - data, cfg.p);
  return out;
}

double conductivity_residual(const GridFunction& sigma, const GridFunction& u) {
  const auto dbar_u = wirtinger_derivatives(u.real()).second;
  const auto flux = wirtinger_derivatives(sigma * dbar_u).first;
  return interior_l2_norm(4.0 * flux.real());
}

}  // namespace phdisk
