#ifndef NONLOCAL_GEOMETRY_HPP
#define NONLOCAL_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nonlocal {

/// A point in R^n, n <= 3. Unused coordinates stay zero.
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 1;

  static Point of(double x) { return Point{{x, 0.0, 0.0}, 1}; }
  static Point of(double x, double y) { return Point{{x, y, 0.0}, 2}; }
  static Point of(double x, double y, double z) { return Point{{x, y, z}, 3}; }

  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
};

inline double norm(const Point& p) {
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i) s += p.c[i] * p.c[i];
  return std::sqrt(s);
}

inline double dist(const Point& a, const Point& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dist: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Domain specifications
// ---------------------------------------------------------------------------

struct DomainSpec;

struct BallSpec {
  Point center;
  double radius;
};
struct BoxSpec {
  Point lo, hi;
};
struct FullSpaceSpec {};
struct ComplementSpec {
  std::shared_ptr<DomainSpec> arg;
};
struct UnionSpec {
  std::vector<std::shared_ptr<DomainSpec>> parts;
};
struct DifferenceSpec {
  std::shared_ptr<DomainSpec> a, b;
};

/// Open region of R^n built from balls/boxes by complement, union, difference.
/// Membership and boundary distance go through a signed distance function
/// (positive inside); min/max composition for the set operations.
struct DomainSpec {
  std::variant<BallSpec, BoxSpec, FullSpaceSpec, ComplementSpec, UnionSpec, DifferenceSpec> node;
  int dim = 1;
};

inline DomainSpec ball(const Point& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  return DomainSpec{BallSpec{center, radius}, center.dim};
}

inline DomainSpec box(const Point& lo, const Point& hi) {
  if (lo.dim != hi.dim) throw std::invalid_argument("box: dimension mismatch");
  for (int i = 0; i < lo.dim; ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo < hi required componentwise");
  return DomainSpec{BoxSpec{lo, hi}, lo.dim};
}

inline DomainSpec full_space(int dim) { return DomainSpec{FullSpaceSpec{}, dim}; }

inline DomainSpec complement_of(const DomainSpec& d) {
  return DomainSpec{ComplementSpec{std::make_shared<DomainSpec>(d)}, d.dim};
}

inline DomainSpec union_of(const std::vector<DomainSpec>& parts) {
  if (parts.empty()) throw std::invalid_argument("union_of: empty operand list");
  UnionSpec u;
  for (const auto& p : parts) {
    if (p.dim != parts.front().dim) throw std::invalid_argument("union_of: dimension mismatch");
    u.parts.push_back(std::make_shared<DomainSpec>(p));
  }
  return DomainSpec{std::move(u), parts.front().dim};
}

inline DomainSpec difference_of(const DomainSpec& a, const DomainSpec& b) {
  if (a.dim != b.dim) throw std::invalid_argument("difference_of: dimension mismatch");
  return DomainSpec{DifferenceSpec{std::make_shared<DomainSpec>(a), std::make_shared<DomainSpec>(b)}, a.dim};
}

/// Signed distance, positive inside the open region. Exact for ball and box;
/// max/min composition (a lower bound on the true distance) for compounds.
inline double signed_distance(const DomainSpec& d, const Point& x) {
  if (x.dim != d.dim) throw std::invalid_argument("signed_distance: dimension mismatch");
  struct V {
    const Point& x;
    int dim;
    double operator()(const BallSpec& b) const { return b.radius - dist(b.center, x); }
    double operator()(const BoxSpec& b) const {
      // inside: min face distance; outside: -distance to the box
      double inside = std::numeric_limits<double>::infinity();
      double out2 = 0.0;
      bool out = false;
      for (int i = 0; i < dim; ++i) {
        inside = std::min(inside, std::min(x[i] - b.lo[i], b.hi[i] - x[i]));
        double e = std::max({b.lo[i] - x[i], 0.0, x[i] - b.hi[i]});
        if (e > 0.0) {
          out = true;
          out2 += e * e;
        }
      }
      return out ? -std::sqrt(out2) : inside;
    }
    double operator()(const FullSpaceSpec&) const { return std::numeric_limits<double>::infinity(); }
    double operator()(const ComplementSpec& c) const { return -signed_distance(*c.arg, x); }
    double operator()(const UnionSpec& u) const {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : u.parts) best = std::max(best, signed_distance(*p, x));
      return best;
    }
    double operator()(const DifferenceSpec& df) const {
      return std::min(signed_distance(*df.a, x), -signed_distance(*df.b, x));
    }
  };
  return std::visit(V{x, d.dim}, d.node);
}

inline bool contains(const DomainSpec& d, const Point& x) { return signed_distance(d, x) > 0.0; }

inline double distance_to_boundary(const DomainSpec& d, const Point& x) {
  const double sd = signed_distance(d, x);
  if (!(sd > 0.0)) throw std::invalid_argument("distance_to_boundary: point outside region");
  return sd;
}

inline bool bounded(const DomainSpec& d) {
  struct V {
    bool operator()(const BallSpec&) const { return true; }
    bool operator()(const BoxSpec&) const { return true; }
    bool operator()(const FullSpaceSpec&) const { return false; }
    bool operator()(const ComplementSpec&) const { return false; }
    bool operator()(const UnionSpec& u) const {
      for (const auto& p : u.parts)
        if (!bounded(*p)) return false;
      return true;
    }
    bool operator()(const DifferenceSpec& df) const { return bounded(*df.a); }
  };
  return std::visit(V{}, d.node);
}

/// Axis-aligned bounding box of a bounded spec.
inline void bounding_box(const DomainSpec& d, Point& lo, Point& hi) {
  if (!bounded(d)) throw std::invalid_argument("bounding_box: unbounded domain");
  struct V {
    Point &lo, &hi;
    int dim;
    void operator()(const BallSpec& b) const {
      lo = b.center;
      hi = b.center;
      for (int i = 0; i < dim; ++i) {
        lo[i] -= b.radius;
        hi[i] += b.radius;
      }
    }
    void operator()(const BoxSpec& b) const {
      lo = b.lo;
      hi = b.hi;
    }
    void operator()(const FullSpaceSpec&) const {}
    void operator()(const ComplementSpec&) const {}
    void operator()(const UnionSpec& u) const {
      Point l, h;
      bounding_box(*u.parts.front(), lo, hi);
      for (std::size_t k = 1; k < u.parts.size(); ++k) {
        bounding_box(*u.parts[k], l, h);
        for (int i = 0; i < dim; ++i) {
          lo[i] = std::min(lo[i], l[i]);
          hi[i] = std::max(hi[i], h[i]);
        }
      }
    }
    void operator()(const DifferenceSpec& df) const { bounding_box(*df.a, lo, hi); }
  };
  lo.dim = hi.dim = d.dim;
  std::visit(V{lo, hi, d.dim}, d.node);
}

// ---------------------------------------------------------------------------
// Interaction sets
// ---------------------------------------------------------------------------

/// The pair (U1,U2) inducing Z = (U1 x U2) u (U2 x U1), with Omega x Omega
/// contained in Z. Presets configure the Dirichlet, Restricted and
/// Semirestricted operators.
struct InteractionSet {
  DomainSpec u1, u2, omega;

  bool in_z(const Point& x, const Point& y) const {
    return (contains(u1, x) && contains(u2, y)) || (contains(u2, x) && contains(u1, y));
  }

  /// U1 u U2 as a DomainSpec.
  DomainSpec hull() const { return union_of({u1, u2}); }

  static InteractionSet dirichlet(const DomainSpec& omega) {
    return InteractionSet{full_space(omega.dim), full_space(omega.dim), omega};
  }
  static InteractionSet restricted(const DomainSpec& omega) { return InteractionSet{omega, omega, omega}; }
  static InteractionSet semirestricted(const DomainSpec& omega) {
    return InteractionSet{omega, full_space(omega.dim), omega};
  }
};

inline bool in_interaction_set(const InteractionSet& z, const Point& x, const Point& y) {
  if (x.dim != y.dim || x.dim != z.omega.dim) throw std::invalid_argument("in_interaction_set: dimension mismatch");
  return z.in_z(x, y);
}

// ---------------------------------------------------------------------------
// Lattices
// ---------------------------------------------------------------------------

/// Uniform node-centered lattice; points sit at integer multiples of h, so a
/// refinement by h/2 contains every coarse point.
struct Lattice {
  int dim = 1;
  double h = 1.0;
  std::array<long, 3> i_lo{0, 0, 0};
  std::array<long, 3> i_hi{0, 0, 0};  // inclusive
  double offset = 0.0;                // shift applied to every axis (cell-centered grids)

  // flags populated by build_grid for the generating domain
  std::vector<std::uint8_t> in_domain;
  std::vector<std::uint8_t> boundary_adjacent;
  bool truncated = false;  // far-field flag: the domain extends beyond this box

  long count(int axis) const { return i_hi[axis] - i_lo[axis] + 1; }

  std::size_t size() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(count(a));
    return n;
  }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= h;
    return v;
  }

  std::array<long, 3> multi(std::size_t flat) const {
    std::array<long, 3> m{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const long c = count(a);
      m[a] = i_lo[a] + static_cast<long>(flat % static_cast<std::size_t>(c));
      flat /= static_cast<std::size_t>(c);
    }
    return m;
  }

  std::size_t flat(const std::array<long, 3>& m) const {
    std::size_t f = 0;
    for (int a = dim - 1; a >= 0; --a) f = f * static_cast<std::size_t>(count(a)) + static_cast<std::size_t>(m[a] - i_lo[a]);
    return f;
  }

  bool in_range(const std::array<long, 3>& m) const {
    for (int a = 0; a < dim; ++a)
      if (m[a] < i_lo[a] || m[a] > i_hi[a]) return false;
    return true;
  }

  Point point(std::size_t f) const {
    const auto m = multi(f);
    Point p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p[a] = (static_cast<double>(m[a]) + offset) * h;
    return p;
  }

  Point point(const std::array<long, 3>& m) const {
    Point p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p[a] = (static_cast<double>(m[a]) + offset) * h;
    return p;
  }

  /// Nearest lattice index of x, or nullopt if x lies outside the box.
  std::optional<std::size_t> index_of(const Point& x) const {
    std::array<long, 3> m{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      m[a] = std::lround(x[a] / h - offset);
      if (m[a] < i_lo[a] || m[a] > i_hi[a]) return std::nullopt;
    }
    return flat(m);
  }

  Point box_lo() const {
    Point p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p[a] = (static_cast<double>(i_lo[a]) + offset) * h;
    return p;
  }
  Point box_hi() const {
    Point p;
    p.dim = dim;
    for (int a = 0; a < dim; ++a) p[a] = (static_cast<double>(i_hi[a]) + offset) * h;
    return p;
  }
};

/// Lattice over `d` (plus halo), spacing h, truncation box required for
/// unbounded domains. Flags every node with membership and with
/// boundary adjacency (within h/2 of the boundary).
inline Lattice build_grid(const DomainSpec& d, double h, double halo = 0.0,
                          const DomainSpec* truncation = nullptr) {
  if (!(h > 0.0)) throw std::invalid_argument("build_grid: h must be positive");
  Point lo, hi;
  bool trunc = false;
  if (bounded(d)) {
    bounding_box(d, lo, hi);
  } else if (truncation && bounded(*truncation)) {
    bounding_box(*truncation, lo, hi);
    trunc = true;
  } else {
    throw std::invalid_argument("build_grid: unbounded domain without truncation box");
  }
  Lattice lat;
  lat.dim = d.dim;
  lat.h = h;
  lat.truncated = trunc;
  const double eps = 1e-9 * h;
  for (int a = 0; a < d.dim; ++a) {
    lat.i_lo[a] = static_cast<long>(std::ceil((lo[a] - halo) / h - eps));
    lat.i_hi[a] = static_cast<long>(std::floor((hi[a] + halo) / h + eps));
    if (lat.i_hi[a] < lat.i_lo[a]) throw std::invalid_argument("build_grid: empty lattice");
  }
  const std::size_t n = lat.size();
  lat.in_domain.resize(n);
  lat.boundary_adjacent.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    const Point p = lat.point(f);
    const double sd = signed_distance(d, p);
    lat.in_domain[f] = sd > 0.0 ? 1 : 0;
    lat.boundary_adjacent[f] = std::abs(sd) < 0.5 * h ? 1 : 0;
  }
  return lat;
}

/// Membership mask of `d` on the nodes of `lat`.
inline std::vector<std::uint8_t> mask_of(const Lattice& lat, const DomainSpec& d) {
  std::vector<std::uint8_t> m(lat.size());
  for (std::size_t f = 0; f < m.size(); ++f) m[f] = contains(d, lat.point(f)) ? 1 : 0;
  return m;
}

}  // namespace nonlocal

#endif
