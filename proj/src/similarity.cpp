#include "phdisk/similarity.hpp"

#include <cmath>
#include <limits>

#include "phdisk/transforms.hpp"

namespace phdisk {

namespace {

double max_modulus(const GridFunction& f) {
  double m = 0.0;
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (f.masked_flat(i) || !std::isfinite(std::abs(v[i]))) continue;
    m = std::max(m, std::abs(v[i]));
  }
  return m;
}

double resolve_threshold(const GridFunction& f, double zero_threshold) {
  return zero_threshold < 0.0 ? kDefaultZeroThreshold * max_modulus(f) : zero_threshold;
}

}  // namespace

const char* to_string(Normalization n) {
  return n == Normalization::real_on_T ? "real_on_T" : "imaginary_on_T";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "real_on_T" || s == "real") return Normalization::real_on_T;
  if (s == "imaginary_on_T" || s == "imaginary" || s == "imag") return Normalization::imaginary_on_T;
  throw InvalidArgument("unknown normalization '" + s + "' (expected real_on_T or imaginary_on_T)");
}

GridFunction phase_factor(const GridFunction& w, double zero_threshold) {
  const double thr = resolve_threshold(w, zero_threshold);
  GridFunction out(w.grid_ptr());
  const auto v = w.values();
  auto o = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (w.masked_flat(i)) continue;
    const double a = std::abs(v[i]);
    if (!std::isfinite(a) || a <= thr) continue;
    o[i] = std::conj(v[i]) / v[i];
  }
  return out;
}

Factorization factorize(const GridFunction& w, const GridFunction& alpha, Normalization normalization,
                        double zero_threshold) {
  if (w.grid().n_r() != alpha.grid().n_r() || w.grid().n_theta() != alpha.grid().n_theta())
    throw InvalidArgument("factorize: w and alpha live on different grids");
  Factorization out{GridFunction(w.grid_ptr()), GridFunction(w.grid_ptr()), normalization, 0.0, 0.0, false};
  if (max_modulus(w) == 0.0) {
    out.degenerate = true;
    auto vals = out.s.values();
    for (int j = 0; j < w.grid().n_r(); ++j)
      for (int k = 0; k < w.grid().n_theta(); ++k) {
        vals[static_cast<std::size_t>(j) * w.grid().n_theta() + k] = std::numeric_limits<double>::quiet_NaN();
        out.s.set_masked(j, k);
      }
    return out;
  }
  GridFunction alpha_on_w(w.grid_ptr(), std::vector<cplx>(alpha.values().begin(), alpha.values().end()),
                          alpha.mask());
  const auto beta = alpha_on_w * phase_factor(w, zero_threshold);
  const auto C = cauchy(beta);
  const auto R = reflect_transform(beta);
  out.s = normalization == Normalization::real_on_T ? C - R : C + R;
  out.F = exp(-1.0 * out.s) * w;
  out.residual_holo = interior_l2_norm(wirtinger_derivatives(out.F).second);
  out.residual_beltrami = residual_beltrami(reconstruct(out.s, out.F), alpha_on_w);
  return out;
}

GridFunction reconstruct(const GridFunction& s, const GridFunction& F) { return exp(s) * F; }

double residual_beltrami(const GridFunction& w, const GridFunction& alpha) {
  const auto dbar = wirtinger_derivatives(w).second;
  return interior_l2_norm(dbar - alpha * w.conj());
}

GridFunction alpha_from_pair(const GridFunction& s, const GridFunction& F, double zero_threshold) {
  if (max_modulus(F) == 0.0) throw InvalidArgument("alpha_from_pair: F is identically zero");
  const auto dbar_s = wirtinger_derivatives(s).second;
  const auto rotation = s.map([](cplx z) { return std::exp(cplx(0.0, 2.0 * z.imag())); });
  // F / conj(F) is the conjugate of the phase factor of F.
  return dbar_s * rotation * phase_factor(F, zero_threshold).conj();
}

}  // namespace phdisk
