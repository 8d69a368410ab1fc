#include <doctest.h>

#include "oracles.hpp"
#include "phdisk/transforms.hpp"
#include "support.hpp"

using namespace phdisk;
using namespace phdisk::testing;

namespace {

cplx zbar(cplx z) { return std::conj(z); }
cplx ident(cplx z) { return z; }

}  // namespace

TEST_CASE("cauchy closed forms") {
  auto g = make_grid(64, 64);
  CHECK(rel_max_error(cauchy(constant(g, 1.0)), sample(g, zbar)) < 1e-12);
  CHECK(rel_max_error(cauchy(sample(g, ident)), sample(g, [](cplx z) { return std::norm(z) - 1.0; })) < 1e-12);
  CHECK(max_abs(cauchy(constant(g, 0.0))) == 0.0);
}

TEST_CASE("dbar inverts the cauchy transform, d C equals beurling") {
  auto g = make_grid(64, 128);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    auto h = random_band_limited(g, rng, 6);
    auto c = cauchy(h);
    auto [d, db] = wirtinger_derivatives(c);
    CHECK(area_lp_norm(db - h, 2.0) / area_lp_norm(h, 2.0) < 1e-6);
    CHECK(area_lp_norm(d - beurling(h), 2.0) / area_lp_norm(h, 2.0) < 1e-6);
  }
}

TEST_CASE("beurling closed forms") {
  auto g = make_grid(64, 64);
  CHECK(max_abs(beurling(constant(g, 1.0))) < 1e-12);
  CHECK(rel_max_error(beurling(sample(g, ident)), sample(g, zbar)) < 1e-12);
  CHECK(max_abs(beurling(constant(g, 0.0))) == 0.0);
}

TEST_CASE("renormalized cauchy transform on larger disks") {
  auto g = make_grid(64, 32);
  const double R = 2.0;
  auto eval = make_scaled_grid(64, 64, R);
  auto c = cauchy_renormalized(constant(g, 1.0), R, eval);
  auto expect = GridFunction::sample(eval, [](cplx z) { return std::abs(z) <= 1.0 ? std::conj(z) : 1.0 / z; });
  CHECK(max_abs_diff(c, expect) < 1e-12);
  CHECK(max_abs(cauchy_renormalized(constant(g, 0.0), R, eval)) == 0.0);
  CHECK_THROWS_AS(cauchy_renormalized(constant(g, 1.0), 0.5, eval), InvalidArgument);
  // ||C_2(1)||^2 = pi/2 + 2 pi log R
  CHECK(std::pow(cauchy_renormalized_l2_norm(constant(g, 1.0), 10.0), 2) ==
        doctest::Approx(kPi / 2 + 2 * kPi * std::log(10.0)).epsilon(1e-10));
}

TEST_CASE("mean of the renormalized transform of t") {
  auto g = make_grid(64, 32);
  const double inner = oracle::integrate([](double r) { return 2 * kPi * r * r * r; }, 0.0, 1.0);
  for (double R : {1.0, 2.0, 4.0}) {
    auto eval = make_scaled_grid(64, static_cast<int>(32 * R), R);
    auto c = cauchy_renormalized(sample(g, ident), R, eval);
    const cplx mean = piecewise_area_integral(c, g) / (kPi * R * R);
    const double rhs = -inner / (kPi * R * R);
    CHECK(std::abs(mean - rhs) < 1e-10);
    CHECK(std::abs(rhs + 1.0 / (2 * R * R)) < 1e-12);
  }
}

TEST_CASE("reflection transform") {
  auto g = make_grid(64, 64);
  CHECK(max_abs_diff(reflect_transform(constant(g, 1.0)), sample(g, [](cplx z) { return -z; })) < 1e-12);
  CHECK(max_abs(reflect_transform(constant(g, 0.0))) == 0.0);
  auto sum = cauchy(constant(g, 1.0)) + reflect_transform(constant(g, 1.0));
  CHECK(max_abs_diff(sum, sample(g, [](cplx z) { return std::conj(z) - z; })) < 1e-12);
  auto tr = boundary_trace(sum);
  CHECK(tr.fourier().size() == 64);
  for (int k = 0; k < 64; ++k) CHECK(std::abs(tr[k].real()) < 1e-12);
  // holomorphic, vanishing at the origin
  std::mt19937_64 rng(3);
  auto r = reflect_transform(random_band_limited(g, rng, 5));
  CHECK(interior_l2_norm(wirtinger_derivatives(r).second) / interior_l2_norm(r) < 1e-7);
}

TEST_CASE("green potential") {
  auto g = make_grid(64, 64);
  CHECK(max_abs_diff(green_potential(constant(g, 4.0)), sample(g, [](cplx z) { return std::norm(z) - 1.0; })) <
        1e-12);
  CHECK(max_abs(green_potential(constant(g, 0.0))) == 0.0);

  auto bump = [](double r) { return r < 0.5 ? std::pow(1.0 - 4.0 * r * r, 4) : 0.0; };
  auto big = make_grid(16, 256);
  auto p = green_potential(sample(big, [&](cplx z) { return cplx(bump(std::abs(z))); }));
  double err = 0.0;
  for (int j = 7; j < 256; j += 8) err = std::max(err, std::abs(p(j, 3) - oracle::radial_green(bump, big->radius(j))));
  CHECK(err < 1e-6);

  // non-radial data: the Laplacian 4 d dbar P(psi) returns psi
  std::mt19937_64 rng(11);
  auto psi = random_band_limited(big, rng, 3);
  auto [d, db] = wirtinger_derivatives(green_potential(psi));
  auto lap = 4.0 * wirtinger_derivatives(db).first;
  CHECK(interior_l2_norm(lap - psi) / interior_l2_norm(psi) < 1e-5);
  (void)d;
}

TEST_CASE("poisson extension and harmonic conjugate") {
  auto g = make_grid(32, 16);
  for (int n : {0, 1, 4}) {
    auto u = sample_boundary(32, [n](double t) { return cplx(std::cos(n * t)); });
    auto e = poisson_extend(u, g);
    CHECK(max_abs_diff(e, sample(g, [n](cplx z) { return cplx(std::pow(z, n).real()); })) < 1e-14);
    auto v = harmonic_conjugate(e);
    CHECK(max_abs_diff(v, sample(g, [n](cplx z) { return cplx(n == 0 ? 0.0 : std::pow(z, n).imag()); })) < 1e-14);
  }
  auto mix = poisson_extend(sample_boundary(32, [](double t) { return cplx(std::cos(t) + 3 * std::sin(2 * t)); }), g);
  CHECK(max_abs_diff(mix, sample(g, [](cplx z) { return cplx(z.real() + 3 * (z * z).imag()); })) < 1e-14);
  auto u = sample(g, [](cplx z) { return cplx(z.imag()); });
  CHECK(max_abs_diff(harmonic_conjugate(u), sample(g, [](cplx z) { return cplx(-z.real()); })) < 1e-14);
  CHECK(harmonicity_defect(u) < 1e-14);
  CHECK(harmonicity_defect(sample(g, [](cplx z) { return cplx(std::norm(z)); })) > 0.1);
}

TEST_CASE("conjugate function") {
  const int n = 64;
  for (int m = 1; m <= n / 4; ++m) {
    auto c = conjugate_function(sample_boundary(n, [m](double t) { return cplx(std::cos(m * t)); }));
    CHECK(max_abs_diff(c, sample_boundary(n, [m](double t) { return cplx(std::sin(m * t)); })) < 1e-13);
  }
  CHECK(max_abs_diff(conjugate_function(sample_boundary(n, [](double) { return cplx(1.0); })),
                     sample_boundary(n, [](double) { return cplx(0.0); })) < 1e-15);

  std::mt19937_64 rng(5);
  auto psi = random_boundary(n, rng, 12, true);
  auto twice = conjugate_function(conjugate_function(psi));
  CHECK(max_abs_diff(twice, (-1.0) * psi) < 1e-14);

  // Indicator of an arc whose endpoints sit halfway between nodes.
  const int big = 1 << 14;
  const double a = 2 * kPi * (100.5 / big), b = 2 * kPi * (6000.5 / big);
  auto chi = sample_boundary(big, [&](double t) { return cplx(t > a && t < b ? 1.0 : 0.0); });
  auto c = conjugate_function(chi);
  double err = 0.0;
  for (int k = 0; k < big; k += 17) {
    const double t = 2 * kPi * k / big;
    if (std::abs(std::remainder(t - a, 2 * kPi)) < 0.2 || std::abs(std::remainder(t - b, 2 * kPi)) < 0.2) continue;
    err = std::max(err, std::abs(c[k].real() - oracle::arc_indicator_conjugate(a, b, t)));
  }
  CHECK(err < 1e-3);
}

TEST_CASE("holomorphic extension") {
  auto g = make_grid(32, 16);
  auto f = holomorphic_extension(sample_boundary(32, [](double t) { return cplx(2.0 + std::cos(t)); }), 0.5, g);
  CHECK(max_abs_diff(f, sample(g, [](cplx z) { return 2.0 + z + cplx(0, 0.5); })) < 1e-14);
}

TEST_CASE("solve_dbar") {
  auto g = make_grid(64, 64);
  auto cos_t = sample_boundary(64, [](double t) { return cplx(std::cos(t)); });
  auto zero_b = sample_boundary(64, [](double) { return cplx(0.0); });

  auto s1 = solve_dbar(constant(g, 0.0), cos_t, 0.0, 0.0);
  CHECK(max_abs_diff(s1.A, sample(g, ident)) < 1e-13);
  auto s2 = solve_dbar(constant(g, 1.0), zero_b, 0.0, 0.0);
  CHECK(max_abs_diff(s2.A, sample(g, [](cplx z) { return std::conj(z) - z; })) < 1e-12);
  CHECK(s2.dbar_residual < 1e-8);
  auto s3 = solve_dbar(constant(g, 0.0), zero_b, 2 * kPi, 0.0);
  CHECK(max_abs_diff(s3.A, constant(g, cplx(0, 1))) < 1e-14);

  std::mt19937_64 rng(9);
  auto a = random_band_limited(g, rng, 4);
  auto psi = random_boundary(64, rng, 5);
  for (double theta0 : {0.0, -kPi / 2, 1.0}) {
    auto s = solve_dbar(a, psi, 0.7, theta0);
    CHECK(s.trace_residual < 1e-12);
    CHECK(s.mean_residual < 1e-12);
    CHECK(s.dbar_residual / interior_l2_norm(a) < 1e-6);
  }
  CHECK_THROWS_AS(solve_dbar(a, sample_boundary(64, [](double) { return cplx(0, 1); }), 0.0, 0.0), InvalidArgument);
}
