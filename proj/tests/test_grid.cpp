#include <doctest.h>

#include "phdisk/grid.hpp"
#include "phdisk/spectral.hpp"
#include "support.hpp"

using namespace phdisk;
using namespace phdisk::testing;

namespace {

cplx zbar(cplx z) { return std::conj(z); }

}  // namespace

TEST_CASE("make_grid layout") {
  auto g = make_grid(8, 4);
  CHECK(g->size() == 32);
  CHECK(g->radius(0) == 0.25);
  CHECK(g->radius(1) == 0.5);
  CHECK(g->radius(2) == 0.75);
  CHECK(g->radius(3) == 1.0);
  CHECK(g->theta(2) == doctest::Approx(kPi / 2));
  CHECK(g->radius_index(0.75) == 2);
  CHECK_THROWS_AS(g->radius_index(0.6), InvalidArgument);
  CHECK_THROWS_AS(make_grid(6, 4), InvalidArgument);
  CHECK_THROWS_AS(make_grid(8, 0), InvalidArgument);
  auto big = make_grid(256, 256);
  CHECK(big->size() == 65536);
}

TEST_CASE("area_integral closed forms") {
  auto g = make_grid(64, 64);
  CHECK(std::abs(area_integral(constant(g, 1.0)) - kPi) < 1e-12);
  CHECK(std::abs(area_integral(sample(g, [](cplx z) { return z; }))) < 1e-13);
  CHECK(std::abs(area_integral(sample(g, [](cplx z) { return std::norm(z); })) - kPi / 2) < 1e-12);
}

TEST_CASE("circle and hardy norms") {
  auto g = make_grid(64, 32);
  CHECK(circle_norm(constant(g, 1.0), 1.0, 2.0) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-13));
  CHECK(circle_norm(constant(g, 1.0), 0.5, 1.0) == doctest::Approx(kPi).epsilon(1e-13));
  for (int n : {0, 1, 3}) {
    auto f = sample(g, [n](cplx z) { return std::pow(z, n); });
    const double rho = 0.75;
    for (double p : {1.0, 2.0, 3.5})
      CHECK(circle_norm(f, rho, p) ==
            doctest::Approx(std::pow(2 * kPi * rho, 1 / p) * std::pow(rho, n)).epsilon(1e-12));
    const double rmax = g->radius(g->n_r() - 2);
    CHECK(hardy_norm(f, 2.0) == doctest::Approx(std::sqrt(2 * kPi * rmax) * std::pow(rmax, n)).epsilon(1e-12));
  }
  CHECK(hardy_norm(constant(g, 0.0), 2.0) == 0.0);
  CHECK_THROWS_AS(circle_norm(constant(g, 1.0), 0.3, 2.0), InvalidArgument);
}

TEST_CASE("hardy_norm of the singular example stays bounded under refinement") {
  auto w = [](cplx z) { return 1.0 / (std::log(3.0 / std::abs(z - 1.0)) * std::sqrt(z - 1.0)); };
  const double a = hardy_norm(sample(make_grid(256, 128), w), 2.0);
  const double b = hardy_norm(sample(make_grid(256, 256), w), 2.0);
  CHECK(std::isfinite(a));
  CHECK(std::abs(b / a - 1.0) <= 0.05);
}

TEST_CASE("wirtinger derivatives of polynomials") {
  auto g = make_grid(32, 32);
  auto check = [&](auto f, auto df, auto dbf) {
    auto [d, db] = wirtinger_derivatives(sample(g, f));
    CHECK(max_abs_diff(d, sample(g, df)) < 1e-9);
    CHECK(max_abs_diff(db, sample(g, dbf)) < 1e-9);
  };
  check([](cplx z) { return z; }, [](cplx) { return cplx(1); }, [](cplx) { return cplx(0); });
  check(zbar, [](cplx) { return cplx(0); }, [](cplx) { return cplx(1); });
  check([](cplx z) { return std::norm(z); }, zbar, [](cplx z) { return z; });
}

TEST_CASE("sobolev_norm closed forms") {
  auto g = make_grid(64, 64);
  CHECK(sobolev_norm(constant(g, 1.0), 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
  const double expect = std::sqrt(kPi / 2) + std::sqrt(kPi);
  CHECK(sobolev_norm(sample(g, [](cplx z) { return z; }), 2.0) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(sobolev_norm(sample(g, zbar), 2.0) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("boundary_trace") {
  auto g = make_grid(16, 8);
  auto tz = boundary_trace(sample(g, [](cplx z) { return z; }));
  for (int k = 0; k < 16; ++k) CHECK(std::abs(tz[k] - std::polar(1.0, g->theta(k))) < 1e-15);
  auto tn = boundary_trace(sample(g, [](cplx z) { return std::norm(z); }));
  for (int k = 0; k < 16; ++k) CHECK(std::abs(tn[k] - 1.0) < 1e-15);

  auto ll = sample(g, [](cplx z) { return cplx(std::log(std::log(3.0 / std::abs(z - 1.0)))); });
  CHECK(ll.masked(g->boundary_index(), 0));
  CHECK_THROWS_AS(boundary_trace(ll), MaskedValueError);
  auto tl = boundary_trace(ll, MaskPolicy::propagate);
  CHECK(tl.masked(0));
  for (int k = 1; k < 16; ++k)
    CHECK(std::abs(tl[k].real() - std::log(std::log(3.0 / std::abs(std::polar(1.0, g->theta(k)) - 1.0)))) < 1e-14);
}

TEST_CASE("nontangential maximal function") {
  auto g = make_grid(64, 32);
  auto m = nontangential_max(constant(g, cplx(3, 4)), kPi / 4);
  for (int k = 0; k < 64; ++k) CHECK(m[k].real() == doctest::Approx(5.0));
  const double rmax = g->radius(g->n_r() - 2);
  auto mz = nontangential_max(sample(g, [](cplx z) { return z; }), kPi / 4);
  for (int k = 0; k < 64; ++k) CHECK(mz[k].real() == doctest::Approx(rmax).epsilon(1e-14));

  // Dense sampling over the same cones.
  auto u = [](cplx z) { return cplx(z.real()); };
  auto mu = nontangential_max(sample(g, u), kPi / 4);
  auto fine = make_grid(256, 128);
  for (int k = 0; k < 64; k += 5) {
    const Cone cone{std::polar(1.0, g->theta(k)), kPi / 4};
    double dense = 0.0;
    for (int j = 0; j < fine->n_r() - 1; ++j)
      for (int q = 0; q < fine->n_theta(); ++q)
        if (cone.contains(fine->node(j, q))) dense = std::max(dense, std::abs(u(fine->node(j, q))));
    CHECK(mu[k].real() >= std::abs(std::cos(g->theta(k))) * rmax - 1e-14);
    CHECK(mu[k].real() <= dense + 0.02);
    CHECK(dense - mu[k].real() <= 0.05);
  }
}

TEST_CASE("boundary norms and means") {
  auto b = sample_boundary(32, [](double t) { return cplx(2.0 + std::cos(t)); });
  CHECK(boundary_integral(b).real() == doctest::Approx(4 * kPi));
  CHECK(boundary_mean(b).real() == doctest::Approx(2.0));
  CHECK(boundary_lp_norm(b, 2.0) == doctest::Approx(std::sqrt(2 * kPi * 4.5)));
}

TEST_CASE("masked values propagate and are rejected by finiteness checks") {
  auto g = make_grid(8, 64);
  auto f = sample(g, [](cplx z) { return 1.0 / (z - 1.0); });
  CHECK(f.masked_count() == 1);
  CHECK_THROWS_AS(f.require_finite("f"), MaskedValueError);
  auto h = f + constant(g, 1.0);
  CHECK(h.masked(63, 0));
  CHECK_NOTHROW(area_lp_norm(f, 2.0, 0.75));
  CHECK_THROWS_AS(area_lp_norm(f, 2.0), MaskedValueError);
}

TEST_CASE("spectral conventions") {
  CHECK(mode_of_slot(3, 8) == 3);
  CHECK(mode_of_slot(5, 8) == -3);
  CHECK(slot_of_mode(-1, 8) == 7);
  CHECK(in_band(3, 8));
  CHECK_FALSE(in_band(4, 8));
  CHECK_FALSE(in_band(-4, 8));

  std::vector<cplx> x(16);
  for (int k = 0; k < 16; ++k) x[k] = std::polar(1.0, 3 * 2 * kPi * k / 16) + 0.5;
  auto c = forward_dft(x);
  CHECK(std::abs(c[3] - 1.0) < 1e-15);
  CHECK(std::abs(c[0] - 0.5) < 1e-15);
  auto y = inverse_dft(c);
  for (int k = 0; k < 16; ++k) CHECK(std::abs(y[k] - x[k]) < 1e-15);

  auto g = make_grid(16, 8);
  auto f = sample(g, [](cplx z) { return std::conj(z) * std::conj(z) * std::norm(z); });
  auto m = to_modes(f);
  CHECK(std::abs(m.at(3, -2) - std::pow(g->radius(3), 4)) < 1e-14);
  CHECK(max_abs_diff(from_modes(m), f) < 1e-14);
  auto prof = mode_profile(f, -2);
  CHECK(std::abs(prof.radial_values[7] - 1.0) < 1e-14);
}

TEST_CASE("radial quadrature moments") {
  auto g = make_grid(8, 40);
  const auto& q = g->quadrature();
  std::vector<cplx> s(40);
  for (int j = 0; j < 40; ++j) s[j] = g->radius(j) * g->radius(j);
  for (int p : {0, 1, 2, 5, 9}) {
    auto in = q.inner(s, p);
    auto out = q.outer(s, p);
    for (int j = 0; j < 40; ++j) {
      const double r = g->radius(j);
      CHECK(std::abs(in[j] - std::pow(r, 3) / (p + 3)) < 1e-13);
      const double o = p == 3 ? r * r * r * std::log(1 / r) : std::pow(r, p) * (1 - std::pow(r, 3 - p)) / (3 - p);
      CHECK(std::abs(out[j] - o) < 1e-13);
    }
  }
  CHECK(std::abs(q.integrate(s) - 1.0 / 3) < 1e-14);
  CHECK_THROWS_AS(make_grid(8, 4)->quadrature(), InvalidArgument);
}
