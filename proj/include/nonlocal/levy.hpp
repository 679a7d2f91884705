#ifndef NONLOCAL_LEVY_HPP
#define NONLOCAL_LEVY_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nonlocal/forms.hpp"
#include "nonlocal/frac_params.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/grid_function.hpp"

namespace nonlocal {

// ---------------------------------------------------------------------------
// Deterministic stream splitting
// ---------------------------------------------------------------------------

/// splitmix64 step; used to expand a master seed into per-path streams.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Stream for path `path` of ensemble `seed`: two splitmix64 steps from
/// seed + path, fed into a mersenne engine. The rule is part of the
/// determinism contract.
inline std::mt19937_64 path_rng(std::uint64_t seed, long path) {
  std::uint64_t s = seed + static_cast<std::uint64_t>(path);
  const std::uint64_t a = splitmix64(s);
  splitmix64(s);
  return std::mt19937_64(a ^ s);
}

// ---------------------------------------------------------------------------
// Stable increments
// ---------------------------------------------------------------------------

/// Standard symmetric alpha-stable displacement over time dt (characteristic
/// function exp(-dt |t|^alpha)), by the Chambers-Mallows-Stuck formula; for
/// n > 1 the magnitude is attached to an isotropic direction.
inline Point sample_stable_increment(double alpha, double dt, std::mt19937_64& rng, int dim = 1) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("sample_stable_increment: alpha in (0,2)");
  if (!(dt > 0.0)) throw std::invalid_argument("sample_stable_increment: dt > 0");
  std::uniform_real_distribution<double> uu(-0.5 * M_PI, 0.5 * M_PI);
  std::uniform_real_distribution<double> u01(std::numeric_limits<double>::min(), 1.0);
  const double u = uu(rng);
  const double w = -std::log(u01(rng));
  const double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
                   std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
  const double mag = std::pow(dt, 1.0 / alpha) * x;
  Point d;
  d.dim = dim;
  if (dim == 1) {
    d[0] = mag;
    return d;
  }
  std::normal_distribution<double> g(0.0, 1.0);
  double nrm = 0.0;
  do {
    for (int a = 0; a < dim; ++a) {
      d[a] = g(rng);
      nrm += d[a] * d[a];
    }
    nrm = std::sqrt(nrm);
  } while (!(nrm > 0.0));
  for (int a = 0; a < dim; ++a) d[a] *= std::abs(mag) / nrm;
  return d;
}

// ---------------------------------------------------------------------------
// Jump process configuration
// ---------------------------------------------------------------------------

struct JumpProcessConfig {
  enum class Kind { Killed, Censored, Semirestricted };
  Kind kind = Kind::Killed;
  DomainSpec omega = ball(Point::of(0.0), 1.0);
  double alpha = 1.0;  // = 2s
  Point x_start = Point::of(0.0);
  double horizon = 1.0;
  long max_jumps = 100000;
  std::uint64_t seed = 0;
  // spatial cutoff of the compound-Poisson approximation: jumps below
  // delta_jump are skipped (their compensated drift vanishes by symmetry);
  // 0 selects 1/128 of the narrowest omega extent
  double delta_jump = 0.0;
};

struct PathEnsembleStats {
  long n_paths = 0;
  double killed_fraction = 0.0, killed_fraction_stderr = 0.0;
  double mean_exit_time = 0.0, mean_exit_time_stderr = 0.0;
  std::vector<long> exit_location_histogram;  // first coordinate of exit points
  double histogram_lo = 0.0, histogram_bin = 0.0;
  long proposed_jumps = 0;
  long suppressed_jumps = 0;  // censored / semirestricted rule rejections
  long truncated_paths = 0;   // exceeded max_jumps before horizon or exit
};

/// One realized jump, for rule audits and CSV logs.
struct JumpRecord {
  long path_id = 0;
  double t = 0.0;
  Point from, to;
  bool accepted = false;
};

namespace detail {

inline double default_delta(const DomainSpec& omega) {
  Point lo, hi;
  bounding_box(omega, lo, hi);
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < omega.dim; ++a) extent = std::min(extent, hi[a] - lo[a]);
  return extent / 128.0;
}

/// Total rate of jumps with magnitude above delta under the C_{n,s}-normalized
/// kernel: C_{n,s} sigma_{n-1} delta^{-alpha} / alpha.
inline double jump_rate(double delta, const FracParams& p) {
  const double surf = p.n == 1 ? 2.0 : unit_sphere_area(p.n);
  return p.c_ns * surf * std::pow(delta, -2.0 * p.s) / (2.0 * p.s);
}

/// Displacement from the truncated kernel: Pareto magnitude delta * U^{-1/alpha},
/// isotropic direction.
inline Point truncated_jump(double delta, double alpha, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(std::numeric_limits<double>::min(), 1.0);
  const double mag = delta * std::pow(u01(rng), -1.0 / alpha);
  Point d;
  d.dim = dim;
  if (dim == 1) {
    std::uniform_real_distribution<double> sgn(0.0, 1.0);
    d[0] = sgn(rng) < 0.5 ? -mag : mag;
    return d;
  }
  std::normal_distribution<double> g(0.0, 1.0);
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (int a = 0; a < dim; ++a) {
      d[a] = g(rng);
      nrm += d[a] * d[a];
    }
    nrm = std::sqrt(nrm);
  } while (!(nrm > 0.0));
  for (int a = 0; a < dim; ++a) d[a] *= mag / nrm;
  return d;
}

inline void validate(const JumpProcessConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) throw std::invalid_argument("JumpProcessConfig: alpha in (0,2)");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("JumpProcessConfig: horizon > 0");
  if (cfg.max_jumps < 1) throw std::invalid_argument("JumpProcessConfig: max_jumps >= 1");
  if (!bounded(cfg.omega) && cfg.kind != JumpProcessConfig::Kind::Killed)
    throw std::invalid_argument("JumpProcessConfig: censored/semirestricted need bounded omega");
  if (cfg.kind != JumpProcessConfig::Kind::Semirestricted && !contains(cfg.omega, cfg.x_start))
    throw std::invalid_argument("JumpProcessConfig: x_start must lie in omega");
}

}  // namespace detail

/// Event-clock simulation of the compound-Poisson approximation of the
/// 2s-stable process under the three jump rules:
///   killed         - the path dies on the first jump landing outside omega;
///   censored       - jumps landing outside omega are suppressed (the clock
///                    still advances);
///   semirestricted - from inside omega every jump is allowed, from outside
///                    only jumps landing in omega are allowed.
/// The realized (from, to) pairs of each rule stay inside the matching
/// interaction-set preset.
inline PathEnsembleStats simulate(const JumpProcessConfig& cfg, long n_paths,
                                  std::vector<JumpRecord>* log = nullptr) {
  detail::validate(cfg);
  if (n_paths < 1) throw std::invalid_argument("simulate: n_paths >= 1");
  const int dim = cfg.omega.dim;
  const FracParams p(dim, 0.5 * cfg.alpha);
  const double delta = cfg.delta_jump > 0.0 ? cfg.delta_jump : detail::default_delta(cfg.omega);
  const double lambda = detail::jump_rate(delta, p);

  PathEnsembleStats st;
  st.n_paths = n_paths;
  const int nbins = 32;
  double extent = 1.0;
  if (bounded(cfg.omega)) {
    Point lo, hi;
    bounding_box(cfg.omega, lo, hi);
    extent = hi[0] - lo[0];
    st.histogram_lo = lo[0] - extent;
    st.histogram_bin = 3.0 * extent / nbins;
  } else {
    st.histogram_lo = -8.0;
    st.histogram_bin = 16.0 / nbins;
  }
  st.exit_location_histogram.assign(nbins, 0);

  long killed = 0;
  double t_sum = 0.0, t_sq = 0.0;
  for (long i = 0; i < n_paths; ++i) {
    auto rng = path_rng(cfg.seed, i);
    std::exponential_distribution<double> wait(lambda);
    Point x = cfg.x_start;
    double t = 0.0;
    long jumps = 0;
    bool dead = false;
    while (true) {
      t += wait(rng);
      if (t >= cfg.horizon) break;
      if (++jumps > cfg.max_jumps) {
        ++st.truncated_paths;
        break;
      }
      const Point d = detail::truncated_jump(delta, cfg.alpha, dim, rng);
      Point y = x;
      for (int a = 0; a < dim; ++a) y[a] += d[a];
      ++st.proposed_jumps;
      const bool lands_in = contains(cfg.omega, y);
      bool accept = true;
      switch (cfg.kind) {
        case JumpProcessConfig::Kind::Killed:
          break;  // all proposals realized; exits kill
        case JumpProcessConfig::Kind::Censored:
          accept = lands_in;
          break;
        case JumpProcessConfig::Kind::Semirestricted:
          accept = contains(cfg.omega, x) || lands_in;
          break;
      }
      if (log) log->push_back({i, t, x, y, accept});
      if (!accept) {
        ++st.suppressed_jumps;
        continue;
      }
      x = y;
      if (cfg.kind == JumpProcessConfig::Kind::Killed && !lands_in) {
        dead = true;
        ++killed;
        t_sum += t;
        t_sq += t * t;
        const int b = std::clamp(static_cast<int>((y[0] - st.histogram_lo) / st.histogram_bin), 0, nbins - 1);
        ++st.exit_location_histogram[static_cast<std::size_t>(b)];
        break;
      }
    }
    (void)dead;
  }
  st.killed_fraction = static_cast<double>(killed) / static_cast<double>(n_paths);
  st.killed_fraction_stderr =
      std::sqrt(std::max(st.killed_fraction * (1.0 - st.killed_fraction), 0.0) / static_cast<double>(n_paths));
  if (killed > 0) {
    st.mean_exit_time = t_sum / static_cast<double>(killed);
    const double var = std::max(t_sq / static_cast<double>(killed) - st.mean_exit_time * st.mean_exit_time, 0.0);
    st.mean_exit_time_stderr = std::sqrt(var / static_cast<double>(killed));
  }
  return st;
}

// ---------------------------------------------------------------------------
// Cross-checks against quadrature
// ---------------------------------------------------------------------------

struct RateCheck {
  double mc_rate = 0.0;
  double mc_stderr = 0.0;
  double quadrature_rate = 0.0;
};

/// Monte Carlo estimate of the relative killing measure at x: with a cutoff
/// delta below dist(x, boundary), the sub-cutoff jumps cannot leave G, so
/// rate * P(jump lands outside G) equals the kernel mass of G^c seen from x
/// exactly; the only error is sampling noise. Compared against the
/// product-integration value.
inline RateCheck killing_rate_crosscheck(const Point& x, const DomainSpec& g, const FracParams& p,
                                         long n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("killing_rate_crosscheck: n_samples >= 1");
  const double sd = signed_distance(g, x);
  if (!(sd > 0.0)) throw std::invalid_argument("killing_rate_crosscheck: x must be interior to G");
  RateCheck out;
  if (std::isinf(sd)) return out;  // G = R^n: both rates vanish
  const double delta = 0.5 * sd;
  const double lambda = detail::jump_rate(delta, p);
  const double alpha = 2.0 * p.s;
  auto rng = path_rng(seed, 0);
  long outside = 0;
  for (long i = 0; i < n_samples; ++i) {
    const Point d = detail::truncated_jump(delta, alpha, p.n, rng);
    Point y = x;
    for (int a = 0; a < p.n; ++a) y[a] += d[a];
    if (!contains(g, y)) ++outside;
  }
  const double phat = static_cast<double>(outside) / static_cast<double>(n_samples);
  out.mc_rate = lambda * phat;
  out.mc_stderr = lambda * std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(n_samples));

  // independent quadrature route
  Point lo, hi;
  bounding_box(g, lo, hi);
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < p.n; ++a) extent = std::min(extent, hi[a] - lo[a]);
  auto lat = build_grid(g, extent / 64.0, extent / 16.0);
  out.quadrature_rate = killing_measure(x, g, InteractionSet::dirichlet(g), p, lat);
  return out;
}

struct HarmonicCheck {
  double discrepancy = 0.0;  // |mc_mean - reference|
  double stderr_mean = 0.0;  // sampling error of mc_mean
  double mc_mean = 0.0;      // empirical mean of u at the exit locations
  double reference = 0.0;    // u(x_start)
  long exits = 0;
};

/// Mean-value check for the killed process: if u is (discretely) s-harmonic
/// in omega, the empirical mean of u at the first-exit locations reproduces
/// u(x_start) up to sampling noise plus the quadrature/discretization bias.
inline HarmonicCheck harmonic_mean_check(const GridFunction& u, const JumpProcessConfig& cfg, long n_paths) {
  if (cfg.kind != JumpProcessConfig::Kind::Killed)
    throw std::invalid_argument("harmonic_mean_check: killed configuration required");
  detail::validate(cfg);
  if (n_paths < 1) throw std::invalid_argument("harmonic_mean_check: n_paths >= 1");
  const int dim = cfg.omega.dim;
  const FracParams p(dim, 0.5 * cfg.alpha);
  const double delta = cfg.delta_jump > 0.0 ? cfg.delta_jump : detail::default_delta(cfg.omega);
  const double lambda = detail::jump_rate(delta, p);

  double sum = 0.0, sq = 0.0;
  long exits = 0, truncated = 0;
  for (long i = 0; i < n_paths; ++i) {
    auto rng = path_rng(cfg.seed, i);
    std::exponential_distribution<double> wait(lambda);
    Point x = cfg.x_start;
    double t = 0.0;
    long jumps = 0;
    while (true) {
      t += wait(rng);
      if (t >= cfg.horizon || ++jumps > cfg.max_jumps) {
        ++truncated;  // no exit observed
        break;
      }
      const Point d = detail::truncated_jump(delta, cfg.alpha, dim, rng);
      for (int a = 0; a < dim; ++a) x[a] += d[a];
      if (!contains(cfg.omega, x)) {
        const double v = u.eval(x);
        sum += v;
        sq += v * v;
        ++exits;
        break;
      }
    }
  }
  if (truncated * 100 > n_paths)
    throw std::runtime_error("harmonic_mean_check: more than 1% of paths were truncated");
  HarmonicCheck out;
  out.exits = exits;
  out.reference = u.eval(cfg.x_start);
  if (exits > 0) {
    out.mc_mean = sum / static_cast<double>(exits);
    const double var = std::max(sq / static_cast<double>(exits) - out.mc_mean * out.mc_mean, 0.0);
    out.stderr_mean = std::sqrt(var / static_cast<double>(exits));
  }
  out.discrepancy = std::abs(out.mc_mean - out.reference);
  return out;
}

}  // namespace nonlocal

#endif
