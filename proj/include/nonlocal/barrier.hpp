#ifndef NONLOCAL_BARRIER_HPP
#define NONLOCAL_BARRIER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nonlocal/forms.hpp"
#include "nonlocal/operators.hpp"

namespace nonlocal {

namespace detail {

/// Quadrature used for barrier assembly and verification: plain exclusion of
/// the singular cells, so every off-diagonal collocation weight is
/// nonnegative and the matrix is an M-matrix (discrete maximum principle).
/// Assembly and residual checks must share this scheme.
inline QuadratureScheme barrier_scheme(const QuadratureScheme& q) {
  QuadratureScheme b = q;
  b.correction_mode = QuadratureScheme::Mode::None;
  return b;
}

}  // namespace detail

/// Verification record of the barrier data conditions.
struct BarrierReport {
  GridFunction phi;
  double r = 0.0, R = 0.0;
  double fitted_c = 0.0;          // largest c with phi >= c (R-|x-x0|)^s on B_R
  double boundary_slope = 0.0;    // log-log exponent of phi near |x-x0| = R
  double max_operator_value = 0.0;
  double max_operator_error = 0.0;
  bool data_ok = false;
};

/// Barrier of the annulus comparison argument: 1 on B_r(x0), 0 outside
/// B_R(x0), discrete s-harmonic (collocated (-Delta)^s = 0) on the annulus.
/// One clamp ring of nodes is absorbed on each side so the clamped values
/// interpolate exactly.
inline GridFunction build_barrier(const Point& x0, double r, double R, const FracParams& p,
                                  const QuadratureScheme& q = QuadratureScheme{}, int cells_across = 32) {
  if (!(0.0 < r && r < R)) throw std::invalid_argument("build_barrier: need 0 < r < R");
  if (cells_across < 16) throw std::invalid_argument("build_barrier: need >= 16 cells across the annulus");
  const double h = (R - r) / static_cast<double>(cells_across);
  const QuadratureScheme qb = detail::barrier_scheme(q);
  auto lat = build_grid(ball(x0, R), h, 2.0 * h);
  const std::size_t n = lat.size();

  // clamp map: 1 within r+h, 0 beyond R-h, unknown between
  std::vector<int> unknown_of(n, -1);
  std::vector<std::size_t> unknowns;
  GridFunction phi(lat, FarField::compact());
  for (std::size_t f = 0; f < n; ++f) {
    const double d = dist(lat.point(f), x0);
    if (d < r + h) {
      phi.v[f] = 1.0;
    } else if (d > R - h) {
      phi.v[f] = 0.0;
    } else {
      unknown_of[f] = static_cast<int>(unknowns.size());
      unknowns.push_back(f);
    }
  }
  const std::size_t m = unknowns.size();
  if (m < 8) throw std::invalid_argument("build_barrier: resolution too coarse for the annulus");

  // collocation rows by probing unit nodal functions through the pointwise
  // evaluator; exact consistency with later residual checks
  const InteractionSet zd = InteractionSet::dirichlet(full_space(p.n));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  GridFunction probe(lat, FarField::compact());
  for (std::size_t j = 0; j < n; ++j) {
    if (unknown_of[j] < 0 && phi.v[j] == 0.0) continue;  // zero column
    probe.v[j] = 1.0;
    for (std::size_t ui = 0; ui < m; ++ui) {
      const double a = detail::pointwise_raw(probe, lat.point(unknowns[ui]), zd, p, qb, lat);
      if (unknown_of[j] >= 0)
        A(static_cast<Eigen::Index>(ui), unknown_of[j]) = a;
      else
        b(static_cast<Eigen::Index>(ui)) -= a * phi.v[j];
    }
    probe.v[j] = 0.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite() || (A * x - b).norm() > 1e-8 * (1.0 + b.norm()))
    throw std::runtime_error("build_barrier: collocation solve failed");
  for (std::size_t ui = 0; ui < m; ++ui) phi.v[unknowns[ui]] = x(static_cast<Eigen::Index>(ui));
  return phi;
}

/// Discrete s-harmonic extension: collocates (-Delta)^s u = 0 at every node
/// inside omega, clamps u to `data` on the remaining nodes (compact far
/// model beyond the truncation box). The same M-matrix scheme as the
/// barrier, so the solution obeys the discrete maximum principle: it stays
/// within the range of the clamped data.
inline GridFunction harmonic_extension(const DomainSpec& omega,
                                       const std::function<double(const Point&)>& data,
                                       const FracParams& p, double h, const DomainSpec& tbox,
                                       const QuadratureScheme& q = QuadratureScheme{}) {
  const QuadratureScheme qb = detail::barrier_scheme(q);
  auto lat = build_grid(full_space(p.n), h, 0.0, &tbox);
  const std::size_t n = lat.size();

  std::vector<int> unknown_of(n, -1);
  std::vector<std::size_t> unknowns;
  GridFunction u(lat, FarField::compact());
  for (std::size_t f = 0; f < n; ++f) {
    const Point x = lat.point(f);
    if (signed_distance(omega, x) > 0.0) {
      unknown_of[f] = static_cast<int>(unknowns.size());
      unknowns.push_back(f);
    } else {
      u.v[f] = data(x);
    }
  }
  const std::size_t m = unknowns.size();
  if (m == 0) throw std::invalid_argument("harmonic_extension: no lattice nodes inside omega");
  if (m == n) throw std::invalid_argument("harmonic_extension: no clamped nodes; shrink omega or grow the box");

  const InteractionSet zd = InteractionSet::dirichlet(full_space(p.n));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  GridFunction probe(lat, FarField::compact());
  for (std::size_t j = 0; j < n; ++j) {
    if (unknown_of[j] < 0 && u.v[j] == 0.0) continue;  // zero column
    probe.v[j] = 1.0;
    for (std::size_t ui = 0; ui < m; ++ui) {
      const double a = detail::pointwise_raw(probe, lat.point(unknowns[ui]), zd, p, qb, lat);
      if (unknown_of[j] >= 0)
        A(static_cast<Eigen::Index>(ui), unknown_of[j]) = a;
      else
        b(static_cast<Eigen::Index>(ui)) -= a * u.v[j];
    }
    probe.v[j] = 0.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite() || (A * x - b).norm() > 1e-8 * (1.0 + b.norm()))
    throw std::runtime_error("harmonic_extension: collocation solve failed");
  for (std::size_t ui = 0; ui < m; ++ui) u.v[unknowns[ui]] = x(static_cast<Eigen::Index>(ui));
  return u;
}

/// Check the barrier data: clamps, the s-power lower bound with its fitted
/// constant, the boundary decay exponent, and the sign of L^s_Z phi over the
/// annulus (evaluated with the assembly scheme).
inline BarrierReport verify_barrier(const GridFunction& phi, const Point& x0, double r, double R,
                                    const InteractionSet& z, const FracParams& p,
                                    const QuadratureScheme& q = QuadratureScheme{}) {
  if (!(0.0 < r && r < R)) throw std::invalid_argument("verify_barrier: need 0 < r < R");
  const Lattice& lat = phi.lat;
  const double h = lat.h;
  const QuadratureScheme qb = detail::barrier_scheme(q);
  BarrierReport rep;
  rep.phi = phi;
  rep.r = r;
  rep.R = R;

  bool clamps_ok = true;
  double fitted = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double d = dist(lat.point(f), x0);
    if (d < r) clamps_ok = clamps_ok && phi.v[f] == 1.0;
    if (d > R) clamps_ok = clamps_ok && phi.v[f] == 0.0;
    // the outermost clamp ring carries the discrete zero boundary data and
    // is excluded from the power-law fit
    if (d <= R - h) {
      const double lb = std::pow(R - d, p.s);
      fitted = std::min(fitted, phi.v[f] / lb);
    }
  }
  rep.fitted_c = std::isfinite(fitted) ? fitted : 0.0;

  // boundary exponent: least-squares slope of log phi against log(R - d)
  // over the outer fifth of the annulus, three clamp rings excluded (the
  // clamp ring and its neighbors carry the discrete boundary layer)
  {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (std::size_t f = 0; f < lat.size(); ++f) {
      const double d = dist(lat.point(f), x0);
      if (d < R - 0.2 * (R - r) || d > R - 3.0 * h || phi.v[f] <= 0.0) continue;
      const double lx = std::log(R - d), ly = std::log(phi.v[f]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    rep.boundary_slope = cnt >= 3 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  }

  rep.max_operator_value = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const double d = dist(lat.point(f), x0);
    if (d < r + 2.0 * h || d > R - 2.0 * h) continue;
    const FormValue v = general_pointwise(phi, lat.point(f), z, p, qb);
    rep.max_operator_value = std::max(rep.max_operator_value, v.value);
    rep.max_operator_error = std::max(rep.max_operator_error, v.error_estimate);
  }

  rep.data_ok = clamps_ok && rep.fitted_c > 0.0 &&
                rep.max_operator_value <= 3.0 * rep.max_operator_error + 1e-10;
  return rep;
}

/// <L^s_{Z'} phi - L^s_Z phi, bump> for nonnegative phi and Z contained in
/// Z'; nonnegative by dropping interaction pairs against a nonnegative
/// function. Containment is spot-checked on a sample of point pairs.
inline double z_monotonicity_defect(const GridFunction& phi, const InteractionSet& z,
                                    const InteractionSet& zprime, const GridFunction& bump,
                                    const FracParams& p) {
  for (double v : phi.v)
    if (v < 0.0) throw std::invalid_argument("z_monotonicity_defect: phi must be nonnegative");
  // containment spot-check: probe pairs drawn from the lattice plus points
  // well outside omega (the lattice alone may not leave omega)
  const Lattice& lat = phi.lat;
  std::vector<Point> probes;
  for (std::size_t f = 0; f < lat.size(); f += std::max<std::size_t>(1, lat.size() / 5)) probes.push_back(lat.point(f));
  for (const DomainSpec* om : {&z.omega, &zprime.omega}) {
    if (!bounded(*om)) continue;
    Point lo, hi;
    bounding_box(*om, lo, hi);
    for (int a = 0; a < lat.dim; ++a) {
      Point out = lo;
      out[a] = lo[a] - 1.0 - (hi[a] - lo[a]);
      probes.push_back(out);
      out[a] = hi[a] + 1.0 + (hi[a] - lo[a]);
      probes.push_back(out);
    }
  }
  for (const Point& a : probes)
    for (const Point& b : probes) {
      if (dist(a, b) == 0.0) continue;
      if (z.in_z(a, b) && !zprime.in_z(a, b))
        throw std::invalid_argument("z_monotonicity_defect: Z not contained in Z'");
    }
  return pairing(phi, bump, zprime, p).value - pairing(phi, bump, z, p).value;
}

}  // namespace nonlocal

#endif
