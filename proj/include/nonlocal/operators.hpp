#ifndef NONLOCAL_OPERATORS_HPP
#define NONLOCAL_OPERATORS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nonlocal/forms.hpp"
#include "nonlocal/frac_params.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

namespace detail {

/// The set of admissible interaction partners of x under Z:
/// U1 u U2 when x lies in both, otherwise the other set.
inline DomainSpec partner_region(const InteractionSet& z, const Point& x) {
  const bool in1 = contains(z.u1, x);
  const bool in2 = contains(z.u2, x);
  if (in1 && in2) return z.hull();
  if (in1) return z.u2;
  if (in2) return z.u1;
  throw std::invalid_argument("partner_region: x outside U1 u U2");
}

/// Stride-2 sublattice (index halving); flags dropped, only geometry kept.
inline Lattice coarsen(const Lattice& lat) {
  Lattice c;
  c.dim = lat.dim;
  c.h = 2.0 * lat.h;
  c.offset = lat.offset;
  c.truncated = lat.truncated;
  for (int a = 0; a < lat.dim; ++a) {
    c.i_lo[a] = (lat.i_lo[a] + (lat.i_lo[a] > 0 ? 1 : 0)) / 2;
    if (2 * c.i_lo[a] < lat.i_lo[a]) ++c.i_lo[a];
    c.i_hi[a] = lat.i_hi[a] >= 0 ? lat.i_hi[a] / 2 : -((-lat.i_hi[a] + 1) / 2);
  }
  return c;
}

inline double pointwise_raw(const GridFunction& u, const Point& x, const InteractionSet& z,
                            const FracParams& p, const QuadratureScheme& q, const Lattice& lat) {
  const DomainSpec region = partner_region(z, x);
  const double ux = u.eval(x);
  Integrand ig;
  ig.f = [&u, ux](const Point& y) { return ux - u.eval(y); };
  double extra = 0.0;
  switch (u.far.kind) {
    case FarField::Kind::CompactSupport:
      ig.far = FarField::constant(ux);
      break;
    case FarField::Kind::Constant:
      ig.far = FarField::constant(ux - u.far.c);
      break;
    case FarField::Kind::PowerDecay:
      // constant part ux analytically, decaying part through its own model
      ig.far = FarField::constant(ux);
      if (!bounded(region)) extra = -detail::farfield_tail(x, u.far, lat, p);
      break;
  }
  return p.c_ns * (singular_integral(ig, x, region, p, q, lat) + extra);
}

}  // namespace detail

/// Pointwise L^s_Z u(x) = C_{n,s} P.V. int_{(x,y) in Z} (u(x)-u(y)) / |x-y|^{n+2s} dy,
/// with a one-coarsening error estimate.
inline FormValue general_pointwise(const GridFunction& u, const Point& x, const InteractionSet& z,
                                   const FracParams& p, const QuadratureScheme& q = QuadratureScheme{}) {
  const double fine = detail::pointwise_raw(u, x, z, p, q, u.lat);
  const double coarse = detail::pointwise_raw(u, x, z, p, q, detail::coarsen(u.lat));
  return FormValue{fine, std::abs(fine - coarse)};
}

/// (-Delta)^s u(x): full-space interaction set.
inline FormValue dirichlet_pointwise(const GridFunction& u, const Point& x, const FracParams& p,
                                     const QuadratureScheme& q = QuadratureScheme{}) {
  return general_pointwise(u, x, InteractionSet::dirichlet(full_space(p.n)), p, q);
}

/// Regional operator of Omega: interactions confined to Omega x Omega.
inline FormValue regional_pointwise(const GridFunction& u, const Point& x, const DomainSpec& omega,
                                    const FracParams& p, const QuadratureScheme& q = QuadratureScheme{}) {
  return general_pointwise(u, x, InteractionSet::restricted(omega), p, q);
}

/// Semirestricted operator: full-space interactions from Omega, regional
/// interactions (into Omega) from its complement.
inline FormValue semirestricted_pointwise(const GridFunction& u, const Point& x, const DomainSpec& omega,
                                          const FracParams& p, const QuadratureScheme& q = QuadratureScheme{}) {
  return general_pointwise(u, x, InteractionSet::semirestricted(omega), p, q);
}

// ---------------------------------------------------------------------------
// Complement-regional pairing
// ---------------------------------------------------------------------------

/// (C_{n,s}/2) iint_{G x ((U1 u U2) \ G)} (u(x)-u(y)) (phi(x)-phi(y)) / |x-y|^{n+2s},
/// for phi supported in G. The cross-interaction part of the operator split
/// used by the energy estimates.
inline FormValue complement_regional_pairing(const GridFunction& u, const GridFunction& phi,
                                             const DomainSpec& g, const InteractionSet& z,
                                             const FracParams& p) {
  check_support(phi, g);
  const DomainSpec hull = z.hull();
  auto eval = [&](int stride) {
    const auto idx = detail::strided_indices(u.lat, stride);
    const auto mg = mask_of(u.lat, g);
    const auto mh = mask_of(u.lat, hull);
    const double vol = std::pow(stride * u.lat.h, p.n);
    const double kx = p.kexp();
    double acc = 0.0;
    for (auto i : idx) {
      if (phi.v[i] == 0.0 || !mg[i]) continue;
      const Point xi = u.lat.point(i);
      const double ui = u.v[i], pi = phi.v[i];
      for (auto j : idx) {
        if (mg[j] || !mh[j]) continue;
        acc += (ui - u.v[j]) * (pi - phi.v[j]) * std::pow(dist(xi, u.lat.point(j)), -kx) * vol * vol;
      }
      if (!bounded(hull)) {
        const detail::FarSides fs = detail::far_sides(xi, u.lat, p);
        acc += pi * detail::tail_lin_increment(u, ui, xi, fs, p) * vol;
      }
    }
    return 0.5 * p.c_ns * acc;
  };
  const double fine = eval(1);
  const double coarse = eval(2);
  return FormValue{fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// Spectral 1-D powers
// ---------------------------------------------------------------------------

enum class SpectralBC { Dirichlet, Neumann };

/// Eigen-coefficients of values sampled on the canonical spectral grids of
/// (0,1): interior nodes k/(N+1) with sine modes for Dirichlet, cell centers
/// (k+1/2)/N with cosine modes for Neumann. Exact discrete orthogonality.
inline std::vector<double> spectral_coefficients(const std::vector<double>& v, SpectralBC bc) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("spectral_coefficients: empty sample");
  std::vector<double> a(n, 0.0);
  if (bc == SpectralBC::Dirichlet) {
    const double den = static_cast<double>(n + 1);
    for (std::size_t k = 1; k <= n; ++k) {
      double s = 0.0;
      for (std::size_t j = 1; j <= n; ++j) s += v[j - 1] * std::sin(M_PI * k * j / den);
      a[k - 1] = 2.0 * s / den;
    }
  } else {
    const double den = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += v[j] * std::cos(M_PI * k * (j + 0.5) / den);
      a[k] = (k == 0 ? 1.0 : 2.0) * s / den;
    }
  }
  return a;
}

inline std::vector<double> spectral_synthesize(const std::vector<double>& a, SpectralBC bc) {
  const std::size_t n = a.size();
  std::vector<double> v(n, 0.0);
  if (bc == SpectralBC::Dirichlet) {
    const double den = static_cast<double>(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
      double s = 0.0;
      for (std::size_t k = 1; k <= n; ++k) s += a[k - 1] * std::sin(M_PI * k * j / den);
      v[j - 1] = s;
    }
  } else {
    const double den = static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a[k] * std::cos(M_PI * k * (j + 0.5) / den);
      v[j] = s;
    }
  }
  return v;
}

/// Spectral eigenvalues of -d^2/dx^2 on (0,1): (k pi)^2 with k >= 1 for
/// Dirichlet modes, k >= 0 for Neumann (the zero mode maps through 0^s = 0).
inline double spectral_eigenvalue(std::size_t mode_index, SpectralBC bc) {
  const double k = bc == SpectralBC::Dirichlet ? static_cast<double>(mode_index + 1)
                                               : static_cast<double>(mode_index);
  return k * k * M_PI * M_PI;
}

/// s-th spectral power of the 1-D Dirichlet or Neumann Laplacian on (0,1),
/// applied by eigen-expansion on the matching canonical grid.
inline std::vector<double> spectral_power_1d(const std::vector<double>& v, double s_power, SpectralBC bc) {
  if (!(s_power >= 0.0)) throw std::invalid_argument("spectral_power_1d: power must be >= 0");
  auto a = spectral_coefficients(v, bc);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double lam = spectral_eigenvalue(k, bc);
    a[k] *= lam > 0.0 ? std::pow(lam, s_power) : 0.0;
  }
  return spectral_synthesize(a, bc);
}

// ---------------------------------------------------------------------------
// Fourier-multiplier oracle
// ---------------------------------------------------------------------------

namespace detail {

/// In-place iterative radix-2 complex FFT (sign = -1 forward, +1 inverse;
/// the inverse is unnormalized).
inline void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_radix2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto t = a[i + k + len / 2] * w;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

/// Independent reference for (-Delta)^s on rapidly decaying 1-D data:
/// periodize onto a box `pad_factor` times wider than the sample box, apply
/// the multiplier |xi|^{2s} in the discrete Fourier domain, transform back.
/// The periodization error scales like (pad_factor * box width)^{-(1+2s)}
/// times the mass of u; widen the padding for stricter comparisons.
inline GridFunction fourier_symbol_oracle(const GridFunction& u, const FracParams& p, int pad_factor = 32) {
  if (p.n != 1) throw std::invalid_argument("fourier_symbol_oracle: 1-D only");
  if (u.far.kind != FarField::Kind::CompactSupport)
    throw std::invalid_argument("fourier_symbol_oracle: needs compactly supported data");
  const Lattice& lat = u.lat;
  const std::size_t nn = lat.size();
  std::size_t m = 1;
  while (m < nn * static_cast<std::size_t>(pad_factor)) m <<= 1;
  std::vector<std::complex<double>> a(m, 0.0);
  for (std::size_t j = 0; j < nn; ++j) a[j] = u.v[j];
  detail::fft_radix2(a, -1);
  const double period = static_cast<double>(m) * lat.h;
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = k <= m / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
    const double xi = 2.0 * M_PI * kk / period;
    a[k] *= std::pow(std::abs(xi), 2.0 * p.s);
  }
  detail::fft_radix2(a, +1);
  GridFunction out(lat, FarField::compact());
  for (std::size_t j = 0; j < nn; ++j) out.v[j] = a[j].real() / static_cast<double>(m);
  return out;
}

}  // namespace nonlocal

#endif
