#ifndef NONLOCAL_FORMS_HPP
#define NONLOCAL_FORMS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nonlocal/frac_params.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

/// Quadrature result with a one-coarsening a posteriori error estimate.
struct FormValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

/// Flat indices of the stride-subsampled lattice (indices divisible by
/// `stride`, so the coarse lattice is a genuine sublattice).
inline std::vector<std::size_t> strided_indices(const Lattice& lat, int stride) {
  std::vector<std::size_t> out;
  const std::size_t n = lat.size();
  if (stride == 1) {
    out.resize(n);
    for (std::size_t f = 0; f < n; ++f) out[f] = f;
    return out;
  }
  for (std::size_t f = 0; f < n; ++f) {
    const auto m = lat.multi(f);
    bool keep = true;
    for (int a = 0; a < lat.dim; ++a)
      if (m[a] % stride != 0) {
        keep = false;
        break;
      }
    if (keep) out.push_back(f);
  }
  return out;
}

/// Per-side kernel masses beyond the lattice box as seen from x.
/// In 1-D the two sides are separate; in n >= 2 everything is lumped into
/// slot 0 (inscribed-ball tail).
struct FarSides {
  std::array<double, 2> mass{0.0, 0.0};
  std::array<bool, 2> allowed{true, true};
  std::array<double, 2> edge_from_origin{0.0, 0.0};  // for power-decay moments
};

inline FarSides far_sides(const Point& x, const Lattice& lat, const FracParams& p,
                          const InteractionSet* z = nullptr) {
  FarSides fs;
  const double hh = 0.5 * lat.h;
  const Point lo = lat.box_lo();
  const Point hi = lat.box_hi();
  if (p.n == 1) {
    const double a = lo[0] - hh, b = hi[0] + hh;
    fs.mass[0] = power_moment(x[0] - a, std::numeric_limits<double>::infinity(), p.kexp());
    fs.mass[1] = power_moment(b - x[0], std::numeric_limits<double>::infinity(), p.kexp());
    fs.edge_from_origin[0] = std::abs(a);
    fs.edge_from_origin[1] = std::abs(b);
    if (z) {
      fs.allowed[0] = z->in_z(x, Point::of(a - 1.0));
      fs.allowed[1] = z->in_z(x, Point::of(b + 1.0));
    }
  } else {
    fs.mass[0] = box_complement_kernel_mass(x, lat, p);
    fs.mass[1] = 0.0;
    double L = std::numeric_limits<double>::infinity();
    for (int a2 = 0; a2 < p.n; ++a2) L = std::min({L, -lo[a2] + hh, hi[a2] + hh});
    fs.edge_from_origin[0] = L;
    if (z) {
      Point probe = hi;
      probe[0] += 1.0 + hh;
      fs.allowed[0] = z->in_z(x, probe);
    }
    fs.allowed[1] = false;
  }
  return fs;
}

/// int over the allowed far sides of (u(x) - u_far(y))^2 |x-y|^{-(n+2s)} dy.
inline double tail_sq_increment(const GridFunction& u, double ux, const Point& x, const FarSides& fs,
                                const FracParams& p) {
  double acc = 0.0;
  for (int s = 0; s < 2; ++s) {
    if (!fs.allowed[s] || fs.mass[s] == 0.0) continue;
    switch (u.far.kind) {
      case FarField::Kind::CompactSupport:
        acc += ux * ux * fs.mass[s];
        break;
      case FarField::Kind::Constant: {
        const double d = ux - u.far.c;
        acc += d * d * fs.mass[s];
        break;
      }
      case FarField::Kind::PowerDecay: {
        const double p1 = power_moment(fs.edge_from_origin[s], std::numeric_limits<double>::infinity(),
                                       u.far.q + p.kexp()) *
                          (p.n == 1 ? 1.0 : unit_sphere_area(p.n));
        const double p2 = power_moment(fs.edge_from_origin[s], std::numeric_limits<double>::infinity(),
                                       2.0 * u.far.q + p.kexp()) *
                          (p.n == 1 ? 1.0 : unit_sphere_area(p.n));
        acc += ux * ux * fs.mass[s] - 2.0 * ux * u.far.c * p1 + u.far.c * u.far.c * p2;
        break;
      }
    }
  }
  return acc;
}

/// int over the allowed far sides of (u(x) - u_far(y)) |x-y|^{-(n+2s)} dy.
inline double tail_lin_increment(const GridFunction& u, double ux, const Point&, const FarSides& fs,
                                 const FracParams& p) {
  double acc = 0.0;
  for (int s = 0; s < 2; ++s) {
    if (!fs.allowed[s] || fs.mass[s] == 0.0) continue;
    switch (u.far.kind) {
      case FarField::Kind::CompactSupport:
        acc += ux * fs.mass[s];
        break;
      case FarField::Kind::Constant:
        acc += (ux - u.far.c) * fs.mass[s];
        break;
      case FarField::Kind::PowerDecay: {
        const double p1 = power_moment(fs.edge_from_origin[s], std::numeric_limits<double>::infinity(),
                                       u.far.q + p.kexp()) *
                          (p.n == 1 ? 1.0 : unit_sphere_area(p.n));
        acc += ux * fs.mass[s] - u.far.c * p1;
        break;
      }
    }
  }
  return acc;
}

inline std::vector<std::uint8_t> z_mask(const Lattice& lat, const DomainSpec& d) { return mask_of(lat, d); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Psi weight
// ---------------------------------------------------------------------------

/// Psi_phi(x,y) = (phi(x)-phi(y))^2 / |x-y|^{n+2s}.
inline double psi(const GridFunction& phi, const Point& x, const Point& y, const FracParams& p) {
  const double d = dist(x, y);
  if (!(d > 0.0)) throw std::invalid_argument("psi: x = y");
  const double dphi = phi.eval(x) - phi.eval(y);
  return dphi * dphi * std::pow(d, -p.kexp());
}

// ---------------------------------------------------------------------------
// Weighted L^1 norm
// ---------------------------------------------------------------------------

/// int |u(x)| / (1 + |x|^{n+2s}) dx, lattice midpoint plus the model tail.
inline FormValue weighted_l1_norm(const GridFunction& u, const FracParams& p) {
  auto eval = [&](int stride) {
    const auto idx = detail::strided_indices(u.lat, stride);
    const double vol = std::pow(stride * u.lat.h, p.n);
    double acc = 0.0;
    for (auto f : idx) {
      const Point x = u.lat.point(f);
      acc += std::abs(u.v[f]) / (1.0 + std::pow(norm(x), p.kexp())) * vol;
    }
    // model tail, with 1 + |x|^{n+2s} ~ |x|^{n+2s} beyond the box
    Point origin;
    origin.dim = p.n;
    const Point lo = u.lat.box_lo();
    const Point hi = u.lat.box_hi();
    double L = std::numeric_limits<double>::infinity();
    for (int a = 0; a < p.n; ++a) L = std::min({L, -lo[a], hi[a]});
    L += 0.5 * u.lat.h;
    switch (u.far.kind) {
      case FarField::Kind::CompactSupport:
        break;
      case FarField::Kind::Constant:
        acc += std::abs(u.far.c) * farfield_powerlaw_integral(origin, L, p.kexp(), p.n);
        break;
      case FarField::Kind::PowerDecay:
        acc += std::abs(u.far.c) * farfield_powerlaw_integral(origin, L, u.far.q + p.kexp(), p.n);
        break;
    }
    return acc;
  };
  const double fine = eval(1);
  const double coarse = eval(2);
  return FormValue{fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Energy
// ---------------------------------------------------------------------------

namespace detail {

struct EnergyMasks {
  std::vector<std::uint8_t> a, b, u1, u2;
  bool use_z = false;
  bool a_unbounded = false, b_unbounded = false;
};

inline bool pair_in_z(const EnergyMasks& m, std::size_t i, std::size_t j) {
  if (!m.use_z) return true;
  return (m.u1[i] && m.u2[j]) || (m.u2[i] && m.u1[j]);
}

inline double energy_at_stride(const GridFunction& u, const EnergyMasks& m, const InteractionSet* z,
                               const FracParams& p, int stride) {
  const auto idx = strided_indices(u.lat, stride);
  const double vol = std::pow(stride * u.lat.h, p.n);
  const double kx = p.kexp();
  double acc = 0.0;
  const std::size_t n = idx.size();
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = idx[a];
    if (!m.a[i] && !m.b[i]) continue;
    const Point xi = u.lat.point(i);
    const double ui = u.v[i];
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t j = idx[b];
      bool fwd = m.a[i] && m.b[j];
      bool bwd = m.a[j] && m.b[i];
      if (!fwd && !bwd) continue;
      if (!pair_in_z(m, i, j)) continue;
      const double d = dist(xi, u.lat.point(j));
      const double du = ui - u.v[j];
      const double w = du * du * std::pow(d, -kx) * vol * vol;
      if (fwd) acc += w;
      if (bwd) acc += w;
    }
    // far tails: y beyond the lattice box
    if (m.b_unbounded && m.a[i]) {
      const FarSides fs = far_sides(xi, u.lat, p, z);
      acc += tail_sq_increment(u, ui, xi, fs, p) * vol;
    }
    if (m.a_unbounded && m.b[i]) {
      const FarSides fs = far_sides(xi, u.lat, p, z);
      acc += tail_sq_increment(u, ui, xi, fs, p) * vol;
    }
  }
  return 0.5 * p.c_ns * acc;
}

}  // namespace detail

/// Gagliardo-type energy (C_{n,s}/2) iint_{(A x B) cap Z} (u(x)-u(y))^2 / |x-y|^{n+2s}.
/// Coincident nodes are skipped (the diagonal cell contribution vanishes in
/// the limit); unbounded factors get the closed-form model tail.
inline FormValue energy(const GridFunction& u, const DomainSpec& regionA, const DomainSpec& regionB,
                        const InteractionSet* z, const FracParams& p) {
  detail::EnergyMasks m;
  m.a = mask_of(u.lat, regionA);
  m.b = mask_of(u.lat, regionB);
  m.a_unbounded = !bounded(regionA);
  m.b_unbounded = !bounded(regionB);
  if (z) {
    m.use_z = true;
    m.u1 = mask_of(u.lat, z->u1);
    m.u2 = mask_of(u.lat, z->u2);
  }
  const double fine = detail::energy_at_stride(u, m, z, p, 1);
  const double coarse = detail::energy_at_stride(u, m, z, p, 2);
  return FormValue{fine, std::abs(fine - coarse)};
}

/// E_s(u; Z): energy over the full interaction set.
inline FormValue energy_total(const GridFunction& u, const InteractionSet& z, const FracParams& p) {
  const DomainSpec hull = z.hull();
  return energy(u, hull, hull, &z, p);
}

// ---------------------------------------------------------------------------
// Pairing <L^s_Z u, phi>
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::size_t> support_of(const GridFunction& phi, const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> s;
  for (auto f : idx)
    if (phi.v[f] != 0.0) s.push_back(f);
  return s;
}

inline double pairing_at_stride(const GridFunction& u, const GridFunction& phi, const InteractionSet& z,
                                const FracParams& p, int stride) {
  const auto idx = strided_indices(u.lat, stride);
  const auto supp = support_of(phi, idx);
  const auto mu1 = mask_of(u.lat, z.u1);
  const auto mu2 = mask_of(u.lat, z.u2);
  std::vector<std::uint8_t> insupp(u.lat.size(), 0);
  for (auto f : supp) insupp[f] = 1;
  const double vol = std::pow(stride * u.lat.h, p.n);
  const double kx = p.kexp();
  double acc = 0.0;
  for (auto i : supp) {
    const Point xi = u.lat.point(i);
    const double ui = u.v[i], pi = phi.v[i];
    for (auto j : idx) {
      if (j == i) continue;
      if (!((mu1[i] && mu2[j]) || (mu2[i] && mu1[j]))) continue;
      const double w = (ui - u.v[j]) * (pi - phi.v[j]) * std::pow(dist(xi, u.lat.point(j)), -kx);
      // pairs inside the support are visited from both endpoints; pairs with
      // one endpoint outside are only visited once and count twice in Z
      acc += insupp[j] ? w : 2.0 * w;
    }
    const FarSides fs = far_sides(xi, u.lat, p, &z);
    acc += 2.0 * pi * tail_lin_increment(u, ui, xi, fs, p) / vol;  // vol re-applied below
  }
  return 0.5 * p.c_ns * acc * vol * vol;
}

}  // namespace detail

/// Verify that phi is compactly supported in omega, strictly inside by h/2.
inline void check_support(const GridFunction& phi, const DomainSpec& omega) {
  for (std::size_t f = 0; f < phi.v.size(); ++f) {
    if (phi.v[f] == 0.0) continue;
    const double sd = signed_distance(omega, phi.lat.point(f));
    if (!(sd > 0.5 * phi.lat.h))
      throw std::invalid_argument("check_support: test function support touches the boundary");
  }
  if (phi.far.kind != FarField::Kind::CompactSupport || bounded(omega) == false) {
    if (phi.far.kind != FarField::Kind::CompactSupport)
      throw std::invalid_argument("check_support: test function must be compactly supported");
  }
}

/// <L^s_Z u, phi> = (C_{n,s}/2) iint_Z (u(x)-u(y))(phi(x)-phi(y)) / |x-y|^{n+2s}.
inline FormValue pairing(const GridFunction& u, const GridFunction& phi, const InteractionSet& z,
                         const FracParams& p, bool verify_support = true) {
  if (verify_support) check_support(phi, z.omega);
  const double fine = detail::pairing_at_stride(u, phi, z, p, 1);
  const double coarse = detail::pairing_at_stride(u, phi, z, p, 2);
  return FormValue{fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Killing measures
// ---------------------------------------------------------------------------

/// Relative killing measure M^Z_G(x) = C_{n,s} int_{(U1 u U2) \ G} |x-y|^{-(n+2s)} dy.
/// Evaluated by product integration (exact 1-D cell moments), so it is an
/// independent route from the midpoint pair sums of `energy`.
inline double killing_measure(const Point& x, const DomainSpec& g, const InteractionSet& z,
                              const FracParams& p, const Lattice& lat,
                              const QuadratureScheme& q = QuadratureScheme{}) {
  if (!contains(g, x)) throw std::invalid_argument("killing_measure: x must lie in G");
  const DomainSpec region = difference_of(z.hull(), g);
  Integrand one{[](const Point&) { return 1.0; }, FarField::constant(1.0)};
  return p.c_ns * singular_integral(one, x, region, p, q, lat);
}

/// Residual of the energy-splitting identity
///   E_s(u;Z) - E_s(u;GxG) - int_G M^Z_G |u|^2;  zero up to quadrature error
/// for u supported in G.
struct DecompositionCheck {
  double residual = 0.0;
  double error_budget = 0.0;
  double energy_z = 0.0, energy_gg = 0.0, killing_term = 0.0;
};

inline DecompositionCheck energy_decomposition_check(const GridFunction& u, const DomainSpec& g,
                                                     const InteractionSet& z, const FracParams& p) {
  // support check: u must vanish outside closure(G)
  for (std::size_t f = 0; f < u.v.size(); ++f) {
    if (u.v[f] != 0.0 && signed_distance(g, u.lat.point(f)) < -0.5 * u.lat.h)
      throw std::invalid_argument("energy_decomposition_check: u not supported in G");
  }
  const FormValue ez = energy_total(u, z, p);
  const FormValue egg = energy(u, g, g, &z, p);
  auto killing_term = [&](int stride) {
    const auto idx = detail::strided_indices(u.lat, stride);
    const double vol = std::pow(stride * u.lat.h, p.n);
    QuadratureScheme q;
    double acc = 0.0;
    for (auto f : idx) {
      if (u.v[f] == 0.0) continue;
      const Point x = u.lat.point(f);
      if (!contains(g, x)) continue;
      acc += killing_measure(x, g, z, p, u.lat, q) * u.v[f] * u.v[f] * vol;
    }
    return acc;
  };
  const double kt = killing_term(1);
  const double ktc = killing_term(2);
  DecompositionCheck out;
  out.energy_z = ez.value;
  out.energy_gg = egg.value;
  out.killing_term = kt;
  out.residual = ez.value - egg.value - kt;
  out.error_budget = ez.error_estimate + egg.error_estimate + std::abs(kt - ktc);
  return out;
}

inline double energy_decomposition_residual(const GridFunction& u, const DomainSpec& g,
                                            const InteractionSet& z, const FracParams& p) {
  return energy_decomposition_check(u, g, z, p).residual;
}

// ---------------------------------------------------------------------------
// Relative nonlocal tail
// ---------------------------------------------------------------------------

/// Tail_Z(u^+; x0, r) = r^{2s} int_{(U1 u U2) \ B_r(x0)} u^+(x) / |x-x0|^{n+2s} dx.
inline double relative_tail(const GridFunction& u, const Point& x0, double r, const InteractionSet& z,
                            const FracParams& p, const QuadratureScheme& q = QuadratureScheme{}) {
  if (!(r > 0.0)) throw std::invalid_argument("relative_tail: r must be positive");
  const DomainSpec region = difference_of(z.hull(), ball(x0, r));
  FarField farp;
  switch (u.far.kind) {
    case FarField::Kind::CompactSupport:
      farp = FarField::compact();
      break;
    case FarField::Kind::Constant:
      farp = FarField::constant(std::max(u.far.c, 0.0));
      break;
    case FarField::Kind::PowerDecay:
      farp = u.far.c > 0.0 ? FarField::power_decay(u.far.c, u.far.q) : FarField::compact();
      break;
  }
  Integrand up{[&u](const Point& y) { return std::max(u.eval(y), 0.0); }, farp};
  return std::pow(r, 2.0 * p.s) * singular_integral(up, x0, region, p, q, u.lat);
}

}  // namespace nonlocal

#endif
