#ifndef NONLOCAL_MAX_PRINCIPLE_HPP
#define NONLOCAL_MAX_PRINCIPLE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlocal/forms.hpp"
#include "nonlocal/operators.hpp"

namespace nonlocal {

enum class Verdict { Consistent, HypothesisFailed, ViolationFound };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent:
      return "consistent";
    case Verdict::HypothesisFailed:
      return "hypothesis_failed";
    case Verdict::ViolationFound:
      return "violation_found";
  }
  return "";
}

/// Outcome of checking the strong-minimum-property hypotheses and conclusion
/// on a concrete function. A violation is only reported when the
/// supersolution hypothesis holds numerically AND the strict interior margin
/// fails; everything else is either consistent or a failed hypothesis.
struct MPReport {
  double supersolution_min_residual = 0.0;  // min over test bumps of <L u, bump>
  double residual_tolerance = 0.0;          // certification tolerance for the residual sweep
  double global_inf = 0.0;                  // inf of u over the lattice of U1 u U2 plus the far model
  std::optional<Point> inf_location;        // nullopt: the infimum comes from the far-field model
  double interior_strict_margin = 0.0;      // min over compact K of u - global_inf
  int lsc_violations = 0;                   // discrete lower-semicontinuity defects in omega
  Verdict verdict = Verdict::HypothesisFailed;
};

/// Nonnegative mollified tents centered at interior lattice points, three
/// widths per center, each compactly supported in omega (centers too close to
/// the boundary for a given width are skipped). `center_stride` subsamples
/// the centers for cheaper sweeps; stride 1 uses every interior node.
inline std::vector<GridFunction> test_bumps(const Lattice& lat, const DomainSpec& omega,
                                            int center_stride = 1) {
  if (center_stride < 1) throw std::invalid_argument("test_bumps: stride must be >= 1");
  const double h = lat.h;
  const std::vector<double> widths = {4.0 * h, 8.0 * h, 16.0 * h};
  std::vector<GridFunction> bumps;
  const auto idx = detail::strided_indices(lat, center_stride);
  for (auto f : idx) {
    const Point c = lat.point(f);
    const double sd = signed_distance(omega, c);
    for (double w : widths) {
      // support is the open ball of radius w; every nonzero node must stay
      // at least h/2 inside omega
      if (!(sd > w + 0.55 * h)) continue;
      bumps.push_back(sample(lat, [&](const Point& x) { return mollifier(x, c, w); }));
    }
  }
  return bumps;
}

/// Distributional supersolution check: min over the bump family of
/// <L^s_Z u, bump>; a result >= -tolerance certifies the hypothesis at
/// lattice resolution.
inline double verify_supersolution(const GridFunction& u, const DomainSpec& omega, const InteractionSet& z,
                                   const FracParams& p, const std::vector<GridFunction>& bumps,
                                   double* tolerance_out = nullptr) {
  if (bumps.empty()) throw std::invalid_argument("verify_supersolution: empty bump family");
  if (!std::isfinite(weighted_l1_norm(u, p).value))
    throw std::invalid_argument("verify_supersolution: u fails the weighted integrability check");
  double best = std::numeric_limits<double>::infinity();
  double max_err = 0.0;
  for (const auto& b : bumps) {
    for (double v : b.v)
      if (v < 0.0) throw std::invalid_argument("verify_supersolution: bumps must be nonnegative");
    check_support(b, omega);
    const FormValue r = pairing(u, b, z, p, /*verify_support=*/false);
    best = std::min(best, r.value);
    max_err = std::max(max_err, r.error_estimate);
  }
  if (tolerance_out) *tolerance_out = 3.0 * max_err + 1e-10;
  return best;
}

namespace detail {

inline std::vector<std::size_t> stencil_neighbors(const Lattice& lat, std::size_t f) {
  std::vector<std::size_t> nbs;
  const auto m = lat.multi(f);
  const int span = lat.dim >= 3 ? 27 : (lat.dim == 2 ? 9 : 3);
  for (int c = 0; c < span; ++c) {
    std::array<long, 3> mm = m;
    int t = c;
    bool self = true;
    for (int a = 0; a < lat.dim; ++a) {
      const int d = t % 3 - 1;
      t /= 3;
      mm[a] += d;
      self = self && d == 0;
    }
    if (self || !lat.in_range(mm)) continue;
    nbs.push_back(lat.flat(mm));
  }
  return nbs;
}

}  // namespace detail

/// Discrete lower-semicontinuity proxy: node x is flagged when u(x) exceeds
/// the minimum over its 3^n - 1 neighbors by more than the increments seen
/// among the surrounding nodes themselves. Isolated upward spikes and the
/// upper side of jump discontinuities are flagged; any continuously sampled
/// function passes, because its drop to the neighbor minimum is of the same
/// size as the neighbor-to-neighbor increments that set the threshold. On a
/// lattice this is inherently a proxy for the liminf condition, not the
/// condition itself.
inline int lsc_scan(const GridFunction& u, const DomainSpec& omega) {
  const Lattice& lat = u.lat;
  double umin = std::numeric_limits<double>::infinity();
  double umax = -std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    if (!contains(omega, lat.point(f))) continue;
    umin = std::min(umin, u.v[f]);
    umax = std::max(umax, u.v[f]);
  }
  if (!(umax >= umin)) return 0;  // no nodes in omega
  const double tol = 1e-6 * (umax - umin);
  int count = 0;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    if (!contains(omega, lat.point(f))) continue;
    const auto nbs = detail::stencil_neighbors(lat, f);
    if (nbs.empty()) continue;
    double nb_min = std::numeric_limits<double>::infinity();
    double ring = 0.0;  // largest increment among surrounding nodes, center excluded
    for (auto y : nbs) {
      nb_min = std::min(nb_min, u.v[y]);
      for (auto z : detail::stencil_neighbors(lat, y)) {
        if (z == f) continue;
        ring = std::max(ring, std::abs(u.v[y] - u.v[z]));
      }
    }
    if (u.v[f] > nb_min + 3.0 * ring + tol) ++count;
  }
  return count;
}

/// Full report: supersolution residual sweep, global infimum over the
/// lattice of U1 u U2 plus the declared far-field model, strict interior
/// margin over compactK, and the discrete semicontinuity scan.
inline MPReport smp_report(const GridFunction& u, const DomainSpec& omega, const InteractionSet& z,
                           const DomainSpec& compactK, const FracParams& p, int bump_stride = 1) {
  const Lattice& lat = u.lat;
  if (!bounded(compactK)) throw std::invalid_argument("smp_report: compactK must be bounded");

  MPReport rep;

  // global infimum over the hull lattice
  const DomainSpec hull = z.hull();
  double inf_val = std::numeric_limits<double>::infinity();
  double sup_val = -std::numeric_limits<double>::infinity();
  std::optional<Point> inf_at;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!contains(hull, x)) continue;
    sup_val = std::max(sup_val, u.v[f]);
    if (u.v[f] < inf_val) {
      inf_val = u.v[f];
      inf_at = x;
    }
  }
  if (!std::isfinite(inf_val)) throw std::invalid_argument("smp_report: no lattice nodes in U1 u U2");

  // far-field model infimum when the hull extends beyond the lattice box
  if (!bounded(hull)) {
    double far_inf = 0.0;
    double far_sup = 0.0;
    switch (u.far.kind) {
      case FarField::Kind::CompactSupport:
        break;
      case FarField::Kind::Constant:
        far_inf = far_sup = u.far.c;
        break;
      case FarField::Kind::PowerDecay: {
        // monotone in |x|: the extreme value sits at the nearest box edge
        const Point lo = lat.box_lo();
        const Point hi = lat.box_hi();
        double L = std::numeric_limits<double>::infinity();
        for (int a = 0; a < lat.dim; ++a) L = std::min({L, -lo[a], hi[a]});
        const double edge = u.far.c * std::pow(std::max(L, lat.h), -u.far.q);
        far_inf = std::min(0.0, edge);
        far_sup = std::max(0.0, edge);
        break;
      }
    }
    sup_val = std::max(sup_val, far_sup);
    if (far_inf < inf_val) {
      inf_val = far_inf;
      inf_at.reset();  // the infimum lives in the far field
    }
  }
  rep.global_inf = inf_val;
  rep.inf_location = inf_at;

  // strict interior margin over compactK (must be compactly inside omega)
  double kmin = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!contains(compactK, x)) continue;
    if (!(signed_distance(omega, x) > 0.5 * lat.h))
      throw std::invalid_argument("smp_report: compactK not compactly contained in omega");
    kmin = std::min(kmin, u.v[f]);
  }
  if (!std::isfinite(kmin)) throw std::invalid_argument("smp_report: compactK contains no lattice nodes");
  rep.interior_strict_margin = kmin - rep.global_inf;

  rep.lsc_violations = lsc_scan(u, omega);

  // hypothesis: u nonconstant on the hull
  const double scale = std::max(std::abs(sup_val), std::abs(inf_val));
  const bool nonconstant = sup_val - inf_val > 1e-12 * std::max(scale, 1.0);

  const auto bumps = test_bumps(lat, omega, bump_stride);
  rep.supersolution_min_residual =
      verify_supersolution(u, omega, z, p, bumps, &rep.residual_tolerance);
  const bool supersolution_ok = rep.supersolution_min_residual >= -rep.residual_tolerance;

  if (!nonconstant || !supersolution_ok)
    rep.verdict = Verdict::HypothesisFailed;
  else if (rep.interior_strict_margin <= 0.0)
    rep.verdict = Verdict::ViolationFound;
  else
    rep.verdict = Verdict::Consistent;
  return rep;
}

/// Counterexample to the interior-minimum exclusion when the infimum is
/// taken over the whole space: f = u - eps * psi with u == 1 on omega,
/// mollified to zero outside, and psi a bump strictly inside. For small
/// eps > 0 the function stays a pointwise supersolution yet attains a local
/// interior minimum.
struct CounterexampleResult {
  double epsilon = 0.0;
  GridFunction f;
  MPReport report;
  Point interior_argmin;        // argmin of f over the omega lattice
  double interior_min = 0.0;    // f at that point (= 1 - epsilon here)
};

inline CounterexampleResult build_counterexample(const DomainSpec& omega, const FracParams& p,
                                                 const QuadratureScheme& q = QuadratureScheme{},
                                                 double h = 0.0) {
  if (!bounded(omega)) throw std::invalid_argument("build_counterexample: omega must be bounded");
  Point lo, hi;
  bounding_box(omega, lo, hi);
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < omega.dim; ++a) extent = std::min(extent, hi[a] - lo[a]);
  if (h <= 0.0) h = extent / 32.0;
  const double collar = 0.5 * extent;  // width of the mollified skirt outside omega

  Point blo = lo, bhi = hi;
  for (int a = 0; a < omega.dim; ++a) {
    blo[a] -= collar + 2.0 * h;
    bhi[a] += collar + 2.0 * h;
  }
  const DomainSpec tb = box(blo, bhi);
  auto lat = build_grid(full_space(omega.dim), h, 0.0, &tb);

  // u: 1 on closure(omega), smooth monotone decay to 0 across the collar
  auto profile = [collar](double sd) {
    if (sd >= 0.0) return 1.0;
    const double t = -sd / collar;
    if (t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
  };
  auto u = sample(lat, [&](const Point& x) { return profile(signed_distance(omega, x)); });

  // psi: bump at the deepest interior node
  double sd_max = 0.0;
  Point center;
  center.dim = omega.dim;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    const double sd = signed_distance(omega, x);
    if (sd > sd_max) {
      sd_max = sd;
      center = x;
    }
  }
  const double width = 0.5 * sd_max;
  if (!(width >= 4.0 * h))
    throw std::runtime_error("build_counterexample: lattice too coarse for an interior bump");
  auto psi = sample(lat, [&](const Point& x) { return mollifier(x, center, width); });

  // residual is affine in eps: r(x; eps) = Du(x) - eps * Dpsi(x)
  std::vector<double> du, dpsi;
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!(signed_distance(omega, x) > h)) continue;
    du.push_back(dirichlet_pointwise(u, x, p, q).value);
    dpsi.push_back(dirichlet_pointwise(psi, x, p, q).value);
  }
  auto feasible = [&](double eps) {
    for (std::size_t k = 0; k < du.size(); ++k)
      if (du[k] - eps * dpsi[k] < 0.0) return false;
    return true;
  };
  if (!feasible(0.0))
    throw std::runtime_error("build_counterexample: base profile is not a supersolution on this lattice");
  double eps;
  if (feasible(1.0)) {
    eps = 1.0;
  } else {
    double a = 0.0, b = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      (feasible(mid) ? a : b) = mid;
    }
    eps = a;
  }
  if (!(eps > 0.0)) throw std::runtime_error("build_counterexample: no admissible eps found");

  CounterexampleResult out;
  out.epsilon = eps;
  out.f = u;
  for (std::size_t f = 0; f < lat.size(); ++f) out.f.v[f] = u.v[f] - eps * psi.v[f];

  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < lat.size(); ++f) {
    const Point x = lat.point(f);
    if (!contains(omega, x)) continue;
    if (out.f.v[f] < fmin) {
      fmin = out.f.v[f];
      out.interior_argmin = x;
    }
  }
  out.interior_min = fmin;

  const DomainSpec compactK = ball(center, std::max(width, 2.5 * h));
  out.report = smp_report(out.f, omega, InteractionSet::dirichlet(omega), compactK, p);
  return out;
}

}  // namespace nonlocal

#endif
