#include "phdisk/spectral.hpp"

#include <fftw3.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <memory>

namespace phdisk {

namespace {

// FFTW plans are created once per length; the planner itself is not
// thread-safe so creation is serialized.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  int n = 0;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const FftPlans& plans_for(int n) {
  static std::map<int, std::unique_ptr<FftPlans>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto plans = std::make_unique<FftPlans>();
  plans->n = n;
  auto* in = fftw_alloc_complex(n);
  auto* out = fftw_alloc_complex(n);
  plans->forward = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  plans->backward = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  return *cache.emplace(n, std::move(plans)).first->second;
}

struct FftBuffer {
  explicit FftBuffer(int n) : in(fftw_alloc_complex(n)), out(fftw_alloc_complex(n)) {}
  ~FftBuffer() {
    fftw_free(in);
    fftw_free(out);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  fftw_complex* in;
  fftw_complex* out;
};

void run_fft(fftw_plan plan, const cplx* src, cplx* dst, int n, double scale, FftBuffer& buf) {
  std::memcpy(buf.in, src, sizeof(cplx) * n);
  fftw_execute_dft(plan, buf.in, buf.out);
  const auto* res = reinterpret_cast<const cplx*>(buf.out);
  for (int k = 0; k < n; ++k) dst[k] = res[k] * scale;
}

const gsl_integration_glfixed_table* gauss_table(int n) {
  static std::map<int, gsl_integration_glfixed_table*> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
  cache.emplace(n, t);
  return t;
}

// Lagrange basis values at x for nodes at integer positions x0, x0+1, ...
std::array<double, RadialQuadrature::kStencil> lagrange(double x, int x0) {
  constexpr int S = RadialQuadrature::kStencil;
  std::array<double, S> out{};
  for (int s = 0; s < S; ++s) {
    double v = 1.0;
    for (int t = 0; t < S; ++t) {
      if (t == s) continue;
      v *= (x - (x0 + t)) / static_cast<double>(s - t);
    }
    out[s] = v;
  }
  return out;
}

}  // namespace

std::vector<cplx> forward_dft(std::span<const cplx> x) {
  const int n = static_cast<int>(x.size());
  std::vector<cplx> c(n);
  FftBuffer buf(n);
  run_fft(plans_for(n).forward, x.data(), c.data(), n, 1.0 / n, buf);
  return c;
}

std::vector<cplx> inverse_dft(std::span<const cplx> c) {
  const int n = static_cast<int>(c.size());
  std::vector<cplx> x(n);
  FftBuffer buf(n);
  run_fft(plans_for(n).backward, c.data(), x.data(), n, 1.0, buf);
  return x;
}

ModalField::ModalField(GridPtr g) : grid(std::move(g)), coeffs(grid->size()) {}

cplx& ModalField::at(int ring, int mode) {
  const int n = grid->n_theta();
  return coeffs[static_cast<std::size_t>(ring) * n + slot_of_mode(mode, n)];
}

cplx ModalField::at(int ring, int mode) const {
  const int n = grid->n_theta();
  return coeffs[static_cast<std::size_t>(ring) * n + slot_of_mode(mode, n)];
}

ModalField to_modes(const GridFunction& f) {
  f.require_finite("modal transform");
  ModalField m(f.grid_ptr());
  const int n = f.grid().n_theta();
  const auto& plans = plans_for(n);
  FftBuffer buf(n);
  for (int j = 0; j < f.grid().n_r(); ++j) {
    run_fft(plans.forward, f.ring(j).data(), m.coeffs.data() + static_cast<std::size_t>(j) * n,
            n, 1.0 / n, buf);
  }
  return m;
}

GridFunction from_modes(const ModalField& m) {
  GridFunction f(m.grid);
  const int n = m.grid->n_theta();
  const auto& plans = plans_for(n);
  FftBuffer buf(n);
  auto vals = f.values();
  for (int j = 0; j < m.grid->n_r(); ++j) {
    const std::size_t off = static_cast<std::size_t>(j) * n;
    run_fft(plans.backward, m.coeffs.data() + off, vals.data() + off, n, 1.0, buf);
  }
  return f;
}

ModeProfile mode_profile(const GridFunction& f, int mode) {
  const auto m = to_modes(f);
  ModeProfile out;
  out.mode_index = mode;
  out.radial_values.resize(f.grid().n_r());
  for (int j = 0; j < f.grid().n_r(); ++j) out.radial_values[j] = m.at(j, mode);
  return out;
}

RadialQuadrature::RadialQuadrature(int n_r, double outer_radius)
    : n_r_(n_r), outer_radius_(outer_radius), h_(outer_radius / n_r) {
  if (n_r < kStencil) throw InvalidArgument("radial quadrature needs at least 6 rings");
  integration_weights_ = partial_weights(n_r - 1);
}

int RadialQuadrature::stencil_start(int cell) const {
  return std::clamp(cell - 3, 0, n_r_ - kStencil);
}

RadialQuadrature::CellTable RadialQuadrature::build_inner(int p) const {
  CellTable t;
  t.weights.assign(static_cast<std::size_t>(n_r_) * kStencil, 0.0);
  t.carry.resize(n_r_);
  const int n_gl = (p + kStencil) / 2 + 4;
  const auto* gl = gauss_table(n_gl);
  for (int c = 0; c < n_r_; ++c) {
    t.carry[c] = c == 0 ? (p == 0 ? 1.0 : 0.0) : std::pow(static_cast<double>(c) / (c + 1), p);
    // Cell [c h, (c+1) h]; node i sits at local x = i + 1 - c.
    const int x0 = stencil_start(c) + 1 - c;
    for (int q = 0; q < n_gl; ++q) {
      double x = 0.0, w = 0.0;
      gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(q), &x, &w, gl);
      const double kernel = p == 0 ? 1.0 : std::pow((c + x) / (c + 1), p);
      const auto basis = lagrange(x, x0);
      for (int s = 0; s < kStencil; ++s) t.weights[c * kStencil + s] += h_ * w * kernel * basis[s];
    }
  }
  return t;
}

RadialQuadrature::CellTable RadialQuadrature::build_outer(int p) const {
  CellTable t;
  t.weights.assign(static_cast<std::size_t>(n_r_) * kStencil, 0.0);
  t.carry.assign(n_r_, 0.0);
  // The kernel ((j+1)/(j+1+x))^p is not polynomial; the rule is sized so the
  // steepest cell (j = 0) is still resolved to round-off.
  const int n_gl = p + kStencil + 8;
  const auto* gl = gauss_table(n_gl);
  for (int j = 0; j + 1 < n_r_; ++j) {
    const int cell = j + 1;
    t.carry[j] = std::pow(static_cast<double>(j + 1) / (j + 2), p);
    const int x0 = stencil_start(cell) + 1 - cell;
    for (int q = 0; q < n_gl; ++q) {
      double x = 0.0, w = 0.0;
      gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(q), &x, &w, gl);
      const double kernel = p == 0 ? 1.0 : std::pow((j + 1) / (j + 1 + x), p);
      const auto basis = lagrange(x, x0);
      for (int s = 0; s < kStencil; ++s) t.weights[j * kStencil + s] += h_ * w * kernel * basis[s];
    }
  }
  return t;
}

const RadialQuadrature::CellTable& RadialQuadrature::inner_table(int p) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = inner_cache_.find(p);
  if (it == inner_cache_.end()) it = inner_cache_.emplace(p, build_inner(p)).first;
  return it->second;
}

const RadialQuadrature::CellTable& RadialQuadrature::outer_table(int p) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = outer_cache_.find(p);
  if (it == outer_cache_.end()) it = outer_cache_.emplace(p, build_outer(p)).first;
  return it->second;
}

std::vector<cplx> RadialQuadrature::inner(std::span<const cplx> g, int p) const {
  if (p < 0) throw InvalidArgument("radial kernel exponent must be nonnegative");
  const auto& t = inner_table(p);
  std::vector<cplx> out(n_r_);
  cplx acc = 0.0;
  for (int c = 0; c < n_r_; ++c) {
    const int st = stencil_start(c);
    cplx cell = 0.0;
    for (int s = 0; s < kStencil; ++s) cell += t.weights[c * kStencil + s] * g[st + s];
    acc = acc * t.carry[c] + cell;
    out[c] = acc;
  }
  return out;
}

std::vector<cplx> RadialQuadrature::outer(std::span<const cplx> g, int p) const {
  if (p < 0) throw InvalidArgument("radial kernel exponent must be nonnegative");
  const auto& t = outer_table(p);
  std::vector<cplx> out(n_r_);
  cplx acc = 0.0;
  out[n_r_ - 1] = 0.0;
  for (int j = n_r_ - 2; j >= 0; --j) {
    const int st = stencil_start(j + 1);
    cplx cell = 0.0;
    for (int s = 0; s < kStencil; ++s) cell += t.weights[j * kStencil + s] * g[st + s];
    acc = acc * t.carry[j] + cell;
    out[j] = acc;
  }
  return out;
}

cplx RadialQuadrature::integrate(std::span<const cplx> g) const {
  cplx acc = 0.0;
  for (int i = 0; i < n_r_; ++i) acc += integration_weights_[i] * g[i];
  return acc;
}

std::vector<double> RadialQuadrature::partial_weights(int ring) const {
  const auto& t = inner_table(0);
  std::vector<double> w(n_r_, 0.0);
  for (int c = 0; c <= ring; ++c) {
    const int st = stencil_start(c);
    for (int s = 0; s < kStencil; ++s) w[st + s] += t.weights[c * kStencil + s];
  }
  return w;
}

}  // namespace phdisk
