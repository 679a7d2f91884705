#include <catch_amalgamated.hpp>
#include <cmath>

#include "nonlocal/barrier.hpp"
#include "nonlocal/max_principle.hpp"

using namespace nonlocal;

TEST_CASE("test bump family") {
  auto omega = ball(Point::of(0.0), 1.0);
  auto tb = box(Point::of(-2.0), Point::of(2.0));
  auto lat = build_grid(full_space(1), 1.0 / 16, 0.0, &tb);
  auto bumps = test_bumps(lat, omega);
  REQUIRE(!bumps.empty());
  for (const auto& b : bumps) {
    double mx = 0.0;
    for (double v : b.v) {
      CHECK(v >= 0.0);
      mx = std::max(mx, v);
    }
    CHECK(mx > 0.0);
    CHECK_NOTHROW(check_support(b, omega));
  }
  // strided sweep is a subsample
  CHECK(test_bumps(lat, omega, 4).size() < bumps.size());
  CHECK_THROWS_AS(test_bumps(lat, omega, 0), std::invalid_argument);
}

TEST_CASE("constant functions have zero residual against every bump") {
  FracParams p(1, 0.5);
  auto omega = ball(Point::of(0.0), 1.0);
  auto z = InteractionSet::dirichlet(omega);
  auto tb = box(Point::of(-3.0), Point::of(3.0));
  auto lat = build_grid(full_space(1), 1.0 / 16, 0.0, &tb);
  auto u = sample(lat, [](const Point&) { return 2.3; }, FarField::constant(2.3));
  auto bumps = test_bumps(lat, omega);
  double tol = 0.0;
  CHECK(verify_supersolution(u, omega, z, p, bumps, &tol) == Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(verify_supersolution(u, omega, z, p, {}), std::invalid_argument);
}

TEST_CASE("sign-flipped barrier passes the residual sweep on the annulus") {
  FracParams p(1, 0.5);
  const Point x0 = Point::of(0.0);
  const double r = 0.25, R = 1.0;
  auto phi = build_barrier(x0, r, R, p, QuadratureScheme{}, 48);
  GridFunction u = phi;
  for (auto& v : u.v) v = -v;
  // keep bump supports away from the clamp rings, where the data is pinned
  // and the collocation residual is not zero
  const double h = phi.lat.h;
  auto annulus = difference_of(ball(x0, R - 2.0 * h), ball(x0, r + 2.0 * h));
  auto bumps = test_bumps(u.lat, annulus);
  REQUIRE(!bumps.empty());
  double tol = 0.0;
  const double res = verify_supersolution(u, annulus, InteractionSet::dirichlet(annulus), p, bumps, &tol);
  CHECK(res >= -tol);
}

TEST_CASE("lsc scan") {
  auto omega = ball(Point::of(0.0), 1.0);
  auto tb = box(Point::of(-2.0), Point::of(2.0));
  auto lat = build_grid(full_space(1), 1.0 / 32, 0.0, &tb);

  SECTION("smooth samples have no violations") {
    auto u = sample(lat, [](const Point& x) { return std::cos(3.0 * x[0]); });
    CHECK(lsc_scan(u, omega) == 0);
  }
  SECTION("an upward spike is detected") {
    auto u = sample(lat, [](const Point& x) { return x[0] * x[0]; });
    u.v[*lat.index_of(Point::of(0.25))] += 0.5;
    CHECK(lsc_scan(u, omega) >= 1);
  }
  SECTION("a jump violates only from the upper side") {
    auto u = sample(lat, [](const Point& x) { return x[0] > 0.0 ? 1.0 : 0.0; });
    CHECK(lsc_scan(u, omega) == 1);
  }
}

TEST_CASE("full report on a nonnegative harmonic-type profile") {
  FracParams p(1, 0.5);
  const Point x0 = Point::of(0.0);
  const double r = 0.25, R = 1.0;
  auto phi = build_barrier(x0, r, R, p, QuadratureScheme{}, 48);
  const double h = phi.lat.h;
  auto annulus = difference_of(ball(x0, R - 2.0 * h), ball(x0, r + 2.0 * h));
  auto rep = smp_report(phi, annulus, InteractionSet::dirichlet(annulus),
                        ball(Point::of(0.5 * (r + R)), 0.1), p);
  CHECK(rep.supersolution_min_residual >= -rep.residual_tolerance);
  CHECK(rep.global_inf == 0.0);
  REQUIRE(rep.inf_location.has_value());  // attained at lattice nodes outside B_R
  CHECK(rep.interior_strict_margin > 0.0);
  CHECK(rep.verdict == Verdict::Consistent);
  CHECK(to_string(rep.verdict) == "consistent");
}

TEST_CASE("hypothesis failures are flagged, not promoted to violations") {
  FracParams p(1, 0.5);
  auto omega = ball(Point::of(0.0), 1.0);
  auto z = InteractionSet::dirichlet(omega);
  auto tb = box(Point::of(-3.0), Point::of(3.0));
  auto lat = build_grid(full_space(1), 1.0 / 16, 0.0, &tb);
  auto K = ball(Point::of(0.0), 0.4);

  SECTION("constant input") {
    auto u = sample(lat, [](const Point&) { return 1.0; }, FarField::constant(1.0));
    CHECK(smp_report(u, omega, z, K, p).verdict == Verdict::HypothesisFailed);
  }
  SECTION("strict subsolution input") {
    auto u = sample(lat, [](const Point& x) { return -mollifier(x, Point::of(0.0), 0.6); });
    auto rep = smp_report(u, omega, z, K, p);
    CHECK(rep.supersolution_min_residual < -rep.residual_tolerance);
    CHECK(rep.verdict == Verdict::HypothesisFailed);
  }
  SECTION("K touching the boundary is rejected") {
    auto u = sample(lat, [](const Point& x) { return std::exp(-x[0] * x[0]); });
    CHECK_THROWS_AS(smp_report(u, omega, z, ball(Point::of(0.9), 0.3), p), std::invalid_argument);
    CHECK_THROWS_AS(smp_report(u, omega, z, full_space(1), p), std::invalid_argument);
  }
}

TEST_CASE("interior-minimum counterexample for the whole-space infimum") {
  FracParams p(1, 0.5);
  auto omega = ball(Point::of(0.0), 1.0);
  auto res = build_counterexample(omega, p);

  CHECK(res.epsilon >= 1e-3);
  CHECK(res.epsilon <= 1.0);

  // f = u - eps psi: 1 - eps at the bump center, inf over R^n is 0 outside
  CHECK(res.interior_min == Catch::Approx(1.0 - res.epsilon).margin(1e-12));
  CHECK(norm(res.interior_argmin) < 0.5);
  CHECK(res.report.global_inf == 0.0);
  REQUIRE(res.report.inf_location.has_value());
  CHECK(!contains(omega, *res.report.inf_location));

  // whole-space strict minimum principle holds while an interior local
  // minimum over omega exists
  CHECK(res.report.interior_strict_margin > 0.0);
  CHECK(res.report.supersolution_min_residual >= -res.report.residual_tolerance);
  CHECK(res.report.verdict == Verdict::Consistent);

  // pointwise residuals stay nonnegative at interior probes
  for (double x : {0.0, 0.3, -0.6, 0.8})
    CHECK(dirichlet_pointwise(res.f, Point::of(x), p).value >= -1e-10);
}
