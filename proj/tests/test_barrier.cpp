#include <catch_amalgamated.hpp>
#include <cmath>

#include "nonlocal/barrier.hpp"

using namespace nonlocal;

TEST_CASE("barrier construction and verification") {
  FracParams p(1, 0.5);
  const Point x0 = Point::of(0.0);
  const double r = 0.25, R = 1.0;
  auto phi = build_barrier(x0, r, R, p, QuadratureScheme{}, 64);

  SECTION("clamped data is exact") {
    for (std::size_t f = 0; f < phi.lat.size(); ++f) {
      const double d = dist(phi.lat.point(f), x0);
      if (d < r) CHECK(phi.v[f] == 1.0);
      if (d > R) CHECK(phi.v[f] == 0.0);
    }
    CHECK(phi.eval(Point::of(0.1)) == 1.0);
    CHECK(phi.eval(Point::of(1.4)) == 0.0);
  }

  SECTION("discrete maximum principle and monotone decay") {
    double prev = 2.0;
    for (std::size_t f = 0; f < phi.lat.size(); ++f) {
      CHECK(phi.v[f] >= -1e-12);
      CHECK(phi.v[f] <= 1.0 + 1e-12);
    }
    // radial monotonicity along the positive axis
    for (double x = 0.0; x <= R + 0.1; x += phi.lat.h) {
      const double v = phi.eval(Point::of(x));
      CHECK(v <= prev + 1e-10);
      prev = v;
    }
  }

  SECTION("report on the dirichlet preset") {
    auto rep = verify_barrier(phi, x0, r, R, InteractionSet::dirichlet(ball(x0, R)), p);
    CHECK(rep.data_ok);
    CHECK(rep.fitted_c > 0.0);
    CHECK(rep.boundary_slope == Catch::Approx(p.s).margin(0.1));
    CHECK(rep.max_operator_value <= 3.0 * rep.max_operator_error + 1e-10);
  }

  SECTION("restricted and semirestricted operators are nonpositive on the annulus") {
    for (auto z : {InteractionSet::restricted(ball(x0, 2.0)), InteractionSet::semirestricted(ball(x0, 2.0))}) {
      auto rep = verify_barrier(phi, x0, r, R, z, p);
      CHECK(rep.max_operator_value <= 3.0 * rep.max_operator_error + 1e-10);
    }
  }
}

TEST_CASE("degenerate barrier is rejected by the verifier") {
  FracParams p(1, 0.5);
  const Point x0 = Point::of(0.0);
  const double r = 0.25, R = 1.0;
  auto lat = build_grid(ball(x0, R), (R - r) / 32.0, 2.0 * (R - r) / 32.0);
  auto chi = sample(lat, [&](const Point& x) { return dist(x, x0) < r ? 1.0 : 0.0; });
  auto rep = verify_barrier(chi, x0, r, R, InteractionSet::dirichlet(ball(x0, R)), p);
  CHECK(rep.fitted_c == 0.0);
  CHECK_FALSE(rep.data_ok);
}

TEST_CASE("discrete harmonic extension") {
  FracParams p(1, 0.5);
  auto omega = ball(Point::of(0.0), 1.0);
  auto tb = box(Point::of(-3.0), Point::of(3.0));
  auto data = [](const Point& x) { return x[0] > 0.0 ? 1.0 : 0.25; };
  auto u = harmonic_extension(omega, data, p, 1.0 / 16, tb);

  SECTION("clamped values and the maximum principle") {
    for (std::size_t f = 0; f < u.lat.size(); ++f) {
      const Point x = u.lat.point(f);
      if (!contains(omega, x)) {
        CHECK(u.v[f] == data(x));
      } else {
        // interior values stay inside [0, max data]: the compact far field
        // contributes value 0 beyond the box
        CHECK(u.v[f] >= 0.0);
        CHECK(u.v[f] <= 1.0 + 1e-12);
      }
    }
  }
  SECTION("collocation residual vanishes at interior nodes") {
    const QuadratureScheme qb = detail::barrier_scheme(QuadratureScheme{});
    const auto zd = InteractionSet::dirichlet(full_space(1));
    for (double x : {-0.5, 0.0, 0.4375, 0.8125}) {
      const double r = detail::pointwise_raw(u, Point::of(x), zd, p, qb, u.lat);
      CHECK(r == Catch::Approx(0.0).margin(1e-7));
    }
  }
  SECTION("degenerate domains are rejected") {
    CHECK_THROWS_AS(harmonic_extension(box(Point::of(-4.0), Point::of(4.0)), data, p, 1.0 / 16, tb),
                    std::invalid_argument);
  }
}

TEST_CASE("interaction set monotonicity defect") {
  FracParams p(1, 0.6);
  const Point x0 = Point::of(0.0);
  auto omega = ball(x0, 2.0);
  auto phi = build_barrier(x0, 0.25, 1.0, p);
  auto zr = InteractionSet::restricted(omega);
  auto zs = InteractionSet::semirestricted(omega);
  auto zd = InteractionSet::dirichlet(omega);
  auto bump = sample(phi.lat, [&](const Point& x) { return mollifier(x, Point::of(0.55), 0.3); });

  CHECK(z_monotonicity_defect(phi, zd, zd, bump, p) == Catch::Approx(0.0).margin(1e-14));
  CHECK(z_monotonicity_defect(phi, zr, zs, bump, p) >= -1e-10);
  CHECK(z_monotonicity_defect(phi, zs, zd, bump, p) >= -1e-10);
  CHECK(z_monotonicity_defect(phi, zr, zd, bump, p) >= -1e-10);
  // containment violation is detected
  CHECK_THROWS_AS(z_monotonicity_defect(phi, zd, zr, bump, p), std::invalid_argument);
  // zero test function gives zero defect
  GridFunction zero(phi.lat);
  CHECK(z_monotonicity_defect(zero, zr, zd, bump, p) == 0.0);
}
