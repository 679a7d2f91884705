#ifndef NONLOCAL_GRID_FUNCTION_HPP
#define NONLOCAL_GRID_FUNCTION_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nonlocal/geometry.hpp"

namespace nonlocal {

/// Declared behavior of a sampled function outside its lattice box.
struct FarField {
  enum class Kind { CompactSupport, Constant, PowerDecay };
  Kind kind = Kind::CompactSupport;
  double c = 0.0;  // constant value, or power-decay amplitude
  double q = 0.0;  // decay exponent, |x|^{-q}

  static FarField compact() { return {}; }
  static FarField constant(double c) { return {Kind::Constant, c, 0.0}; }
  static FarField power_decay(double c, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("FarField: power decay needs q > 0");
    return {Kind::PowerDecay, c, q};
  }
};

/// Sampled function on a uniform lattice with a declared far-field model; the
/// numerical stand-in for elements of the weighted-L^1 / H^s_loc space the
/// operators act on.
struct GridFunction {
  Lattice lat;
  std::vector<double> v;
  FarField far;

  GridFunction() = default;
  GridFunction(Lattice l, FarField f = FarField::compact()) : lat(std::move(l)), far(f) {
    v.assign(lat.size(), 0.0);
  }

  double at(std::size_t f) const { return v[f]; }
  double& at(std::size_t f) { return v[f]; }

  /// Far-field model value at a point outside the lattice box.
  double far_value(const Point& x) const {
    switch (far.kind) {
      case FarField::Kind::CompactSupport:
        return 0.0;
      case FarField::Kind::Constant:
        return far.c;
      case FarField::Kind::PowerDecay: {
        const double r = norm(x);
        return r > 0.0 ? far.c * std::pow(r, -far.q) : far.c;
      }
    }
    return 0.0;
  }

  /// Multilinear interpolation inside the box, far-field model outside.
  double eval(const Point& x) const {
    std::array<long, 3> base{0, 0, 0};
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int a = 0; a < lat.dim; ++a) {
      const double u = x[a] / lat.h - lat.offset;
      base[a] = static_cast<long>(std::floor(u));
      t[a] = u - static_cast<double>(base[a]);
      if (base[a] < lat.i_lo[a] || base[a] + 1 > lat.i_hi[a]) {
        // clamp exact-node hits at the box edge
        if (base[a] + 1 == lat.i_lo[a] + 1 && std::abs(t[a] - 1.0) < 1e-12) continue;
        if (base[a] == lat.i_hi[a] && std::abs(t[a]) < 1e-12) {
          base[a] -= 1;
          t[a] = 1.0;
          continue;
        }
        return far_value(x);
      }
    }
    double acc = 0.0;
    const int corners = 1 << lat.dim;
    for (int c = 0; c < corners; ++c) {
      std::array<long, 3> m = base;
      double w = 1.0;
      for (int a = 0; a < lat.dim; ++a) {
        if (c & (1 << a)) {
          m[a] += 1;
          w *= t[a];
        } else {
          w *= 1.0 - t[a];
        }
      }
      acc += w * v[lat.flat(m)];
    }
    return acc;
  }
};

/// Sample an analytic function on the lattice.
inline GridFunction sample(const Lattice& lat, const std::function<double(const Point&)>& f,
                           FarField far = FarField::compact()) {
  GridFunction g(lat, far);
  for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] = f(lat.point(i));
  return g;
}

enum class Sign { Plus, Minus };

/// Pointwise positive/negative part u^+ or u^-, with the far-field model
/// truncated the same way.
inline GridFunction truncate(const GridFunction& u, Sign sign) {
  GridFunction r = u;
  const double sgn = (sign == Sign::Plus) ? 1.0 : -1.0;
  for (auto& x : r.v) x = std::max(sgn * x, 0.0);
  switch (u.far.kind) {
    case FarField::Kind::CompactSupport:
      break;
    case FarField::Kind::Constant:
      r.far = FarField::constant(std::max(sgn * u.far.c, 0.0));
      break;
    case FarField::Kind::PowerDecay:
      if (sgn * u.far.c > 0.0)
        r.far = FarField::power_decay(sgn * u.far.c, u.far.q);
      else
        r.far = FarField::compact();
      break;
  }
  return r;
}

/// Smooth bump exp(1 - 1/(1-t^2)) of radius `width` centered at x0; zero
/// outside, equal to 1 at the center.
inline double mollifier(const Point& x, const Point& x0, double width) {
  const double t = dist(x, x0) / width;
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

}  // namespace nonlocal

#endif
