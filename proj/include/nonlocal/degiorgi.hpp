#ifndef NONLOCAL_DEGIORGI_HPP
#define NONLOCAL_DEGIORGI_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nonlocal/forms.hpp"
#include "nonlocal/operators.hpp"

namespace nonlocal {

// ---------------------------------------------------------------------------
// Iteration schedule
// ---------------------------------------------------------------------------

/// One rung of the iteration ladder: radius, level, and their midpoints
/// toward the next rung.
struct Schedule {
  double r = 0.0, k = 0.0, r_mid = 0.0, k_mid = 0.0;
};

/// r_j = 1 + 2^{-j}, k_j = k~ (1 - 2^{-j}), with the midpoint quantities
/// r~_j = (r_j + r_{j+1})/2 and k~_j = (k_j + k_{j+1})/2.
inline Schedule schedule(int j, double tilde_k) {
  if (j < 0) throw std::invalid_argument("schedule: j must be >= 0");
  if (!(tilde_k > 0.0)) throw std::invalid_argument("schedule: tilde_k must be positive");
  const double tj = std::pow(2.0, -static_cast<double>(j));
  Schedule s;
  s.r = 1.0 + tj;
  s.k = tilde_k * (1.0 - tj);
  const double rn = 1.0 + 0.5 * tj;
  const double kn = tilde_k * (1.0 - 0.5 * tj);
  s.r_mid = 0.5 * (s.r + rn);
  s.k_mid = 0.5 * (s.k + kn);
  return s;
}

// ---------------------------------------------------------------------------
// Level-set norms
// ---------------------------------------------------------------------------

/// alpha_j = (scale^{-n} int_{B_{r_j scale}(x0)} |(u-k_j)^+|^2)^{1/2} for
/// j = 0..jmax; the L^2 ladder driving the iteration, in rescaled units.
inline std::vector<double> level_norms(const GridFunction& u, const Point& x0, double tilde_k, int jmax,
                                       double scale = 1.0) {
  if (jmax < 0) throw std::invalid_argument("level_norms: jmax must be >= 0");
  const Point lo = u.lat.box_lo(), hi = u.lat.box_hi();
  for (int a = 0; a < u.lat.dim; ++a)
    if (x0[a] - 2.0 * scale < lo[a] - 1e-12 || x0[a] + 2.0 * scale > hi[a] + 1e-12)
      throw std::invalid_argument("level_norms: lattice does not cover B_2(x0)");
  const double vol = u.lat.cell_volume();
  const double voln = std::pow(scale, -u.lat.dim);
  std::vector<double> alpha(static_cast<std::size_t>(jmax) + 1, 0.0);
  for (int j = 0; j <= jmax; ++j) {
    const double rj = (1.0 + std::pow(2.0, -static_cast<double>(j))) * scale;
    const double kj = tilde_k * (1.0 - std::pow(2.0, -static_cast<double>(j)));
    double acc = 0.0;
    for (std::size_t f = 0; f < u.lat.size(); ++f) {
      if (dist(u.lat.point(f), x0) >= rj) continue;
      const double w = std::max(u.v[f] - kj, 0.0);
      acc += w * w * vol;
    }
    alpha[static_cast<std::size_t>(j)] = std::sqrt(acc * voln);
  }
  return alpha;
}

/// Exact pointwise truncation algebra on the lattice, j-th rung:
/// w~_j <= w_j, w~_j <= 2^{j+2} w_j^2 / k~, and
/// w_{j+1}^2 (k~/2^{j+2})^{pbar-2} <= w~_j^{pbar}.
inline bool truncation_chain_ok(const GridFunction& u, double tilde_k, int j, const FracParams& p) {
  if (!(tilde_k > 0.0)) throw std::invalid_argument("truncation_chain_ok: tilde_k must be positive");
  const double kj = tilde_k * (1.0 - std::pow(2.0, -static_cast<double>(j)));
  const double kj1 = tilde_k * (1.0 - std::pow(2.0, -static_cast<double>(j + 1)));
  const double kmid = 0.5 * (kj + kj1);
  const double gap = std::pow(2.0, static_cast<double>(j) + 2.0) / tilde_k;  // 1/(k~_j - k_j)
  bool ok = true;
  for (std::size_t f = 0; f < u.lat.size(); ++f) {
    const double wj = std::max(u.v[f] - kj, 0.0);
    const double wt = std::max(u.v[f] - kmid, 0.0);
    const double wj1 = std::max(u.v[f] - kj1, 0.0);
    const double slack = 1e-12 * (1.0 + wj * wj * gap);
    ok = ok && (wt <= wj + 1e-15);
    ok = ok && (wt <= gap * wj * wj + slack);
    const double lhs = wj1 * wj1 * std::pow(1.0 / gap, p.pbar - 2.0);
    const double rhs = std::pow(wt, p.pbar);
    ok = ok && (lhs <= rhs + 1e-12 * (1.0 + rhs));
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Caccioppoli inequality
// ---------------------------------------------------------------------------

namespace detail {

/// (C/2) sum over G x G of w+(x) w+(y) (phi(x)-phi(y))^2 |x-y|^{-(n+2s)}.
inline FormValue psi_weighted_double(const GridFunction& wp, const GridFunction& phi, const DomainSpec& g,
                                     const FracParams& p) {
  auto eval = [&](int stride) {
    const auto idx = strided_indices(wp.lat, stride);
    const auto mg = mask_of(wp.lat, g);
    const double vol = std::pow(stride * wp.lat.h, p.n);
    const double kx = p.kexp();
    double acc = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const std::size_t i = idx[a];
      if (!mg[i] || wp.v[i] == 0.0) continue;
      const Point xi = wp.lat.point(i);
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const std::size_t j = idx[b];
        if (!mg[j] || wp.v[j] == 0.0) continue;
        const double dphi = phi.v[i] - phi.v[j];
        if (dphi == 0.0) continue;
        acc += 2.0 * wp.v[i] * wp.v[j] * dphi * dphi * std::pow(dist(xi, wp.lat.point(j)), -kx) * vol * vol;
      }
    }
    return 0.5 * p.c_ns * acc;
  };
  const double fine = eval(1);
  const double coarse = eval(2);
  return FormValue{fine, std::abs(fine - coarse)};
}

}  // namespace detail

/// The four terms of the Caccioppoli-type inequality and its slack
///   gap = pairing + psi-term - cross-term - energy >= 0.
struct CaccioppoliTerms {
  double energy_term = 0.0;   // E_s(phi w+; G x G)
  double pairing_term = 0.0;  // <L^s_Z w, phi^2 w+>
  double psi_term = 0.0;      // (C/2) iint_{GxG} w+ w+ Psi_phi
  double cross_term = 0.0;    // complement cross interaction
  double gap = 0.0;
  double error_budget = 0.0;
};

inline CaccioppoliTerms caccioppoli_terms(const GridFunction& w, const GridFunction& phi, const DomainSpec& g,
                                          const InteractionSet& z, const FracParams& p) {
  check_support(phi, g);
  const GridFunction wp = truncate(w, Sign::Plus);
  GridFunction phi2wp = phi;
  for (std::size_t f = 0; f < phi2wp.v.size(); ++f) phi2wp.v[f] = phi.v[f] * phi.v[f] * wp.v[f];
  phi2wp.far = FarField::compact();
  GridFunction phiwp = phi;
  for (std::size_t f = 0; f < phiwp.v.size(); ++f) phiwp.v[f] = phi.v[f] * wp.v[f];
  phiwp.far = FarField::compact();

  CaccioppoliTerms t;
  const FormValue t1 = pairing(w, phi2wp, z, p);
  const FormValue t2 = detail::psi_weighted_double(wp, phi, g, p);
  const FormValue t3 = complement_regional_pairing(wp, phi2wp, g, z, p);
  const FormValue t4 = energy(phiwp, g, g, nullptr, p);
  t.pairing_term = t1.value;
  t.psi_term = t2.value;
  t.cross_term = 2.0 * t3.value;
  t.energy_term = t4.value;
  t.gap = t.pairing_term + t.psi_term - t.cross_term - t.energy_term;
  t.error_budget = t1.error_estimate + t2.error_estimate + 2.0 * t3.error_estimate + t4.error_estimate;
  return t;
}

inline double caccioppoli_gap(const GridFunction& w, const GridFunction& phi, const DomainSpec& g,
                              const InteractionSet& z, const FracParams& p) {
  return caccioppoli_terms(w, phi, g, z, p).gap;
}

// ---------------------------------------------------------------------------
// Localized Sobolev inequality
// ---------------------------------------------------------------------------

/// E_s(u; B_r x B_r) + (r-rho)^{-2s} int |u|^2 - c_sob (int_{B_rho} |u|^pbar)^{2/pbar},
/// for u vanishing outside B_rho; nonnegative when c_sob is calibrated.
inline double localized_sobolev_gap(const GridFunction& u, double r, double rho, const FracParams& p,
                                    double c_sob) {
  if (!(1.0 < rho && rho < r && r <= 2.0))
    throw std::invalid_argument("localized_sobolev_gap: need 1 < rho < r <= 2");
  Point origin;
  origin.dim = p.n;
  const DomainSpec br = ball(origin, r);
  const DomainSpec brho = ball(origin, rho);
  for (std::size_t f = 0; f < u.v.size(); ++f)
    if (u.v[f] != 0.0 && !contains(brho, u.lat.point(f)))
      throw std::invalid_argument("localized_sobolev_gap: u must vanish outside B_rho");
  const double e = energy(u, br, br, nullptr, p).value;
  const double vol = u.lat.cell_volume();
  double l2 = 0.0, lp = 0.0;
  for (std::size_t f = 0; f < u.v.size(); ++f) {
    const Point x = u.lat.point(f);
    if (contains(br, x)) l2 += u.v[f] * u.v[f] * vol;
    if (contains(brho, x)) lp += std::pow(std::abs(u.v[f]), p.pbar) * vol;
  }
  return e + std::pow(r - rho, -2.0 * p.s) * l2 - c_sob * std::pow(lp, 2.0 / p.pbar);
}

// ---------------------------------------------------------------------------
// De Giorgi iteration
// ---------------------------------------------------------------------------

/// Full record of one iteration run: the ladder, the level norms, the
/// induction flags, and the resulting sup bound.
struct DeGiorgiTrace {
  FracParams params;
  double tilde_k = 0.0;
  double tail = 0.0;
  double c_hat = 0.0;
  double bound = 0.0;
  double sup_br = 0.0;  // observed sup of u over B_r(x0)
  bool sup_ok = true;
  std::vector<double> alpha;
  std::vector<double> radii, radii_mid;
  std::vector<double> levels, levels_mid;
  std::vector<bool> induction_ok;
};

/// Runs the iteration for a subsolution u on B_{2r}(x0) c Omega: picks
///   k~ = Tail_Z(u^+; x0, r) + (c_hat r^{-n} int_{B_{2r}} |u^+|^2)^{1/2},
/// records the level norms and the induction checks
///   c_hat^{1/2} alpha_j / k~ <= eta^{-j/beta},
/// and returns bound = k~ with the observed sup over B_r(x0).
/// Subsolution status is the caller's responsibility (see the verifier
/// module); this routine only evaluates the bound.
inline DeGiorgiTrace degiorgi_bound(const GridFunction& u, const Point& x0, double r,
                                    const InteractionSet& z, const FracParams& p, double c_hat,
                                    int jmax = 20) {
  if (!(r > 0.0)) throw std::invalid_argument("degiorgi_bound: r must be positive");
  if (!(c_hat > 0.0)) throw std::invalid_argument("degiorgi_bound: c_hat must be positive");
  if (!(signed_distance(z.omega, x0) >= 2.0 * r))
    throw std::invalid_argument("degiorgi_bound: B_2r(x0) not contained in Omega");

  DeGiorgiTrace tr;
  tr.params = p;
  tr.c_hat = c_hat;

  const GridFunction up = truncate(u, Sign::Plus);
  tr.tail = relative_tail(u, x0, r, z, p);

  double l2 = 0.0;
  const double vol = u.lat.cell_volume();
  for (std::size_t f = 0; f < u.lat.size(); ++f)
    if (dist(u.lat.point(f), x0) < 2.0 * r) l2 += up.v[f] * up.v[f] * vol;
  tr.tilde_k = tr.tail + std::sqrt(c_hat * std::pow(r, -p.n) * l2);
  tr.bound = tr.tilde_k;

  for (std::size_t f = 0; f < u.lat.size(); ++f)
    if (dist(u.lat.point(f), x0) < r) tr.sup_br = std::max(tr.sup_br, u.v[f]);
  tr.sup_ok = tr.sup_br <= tr.bound + 1e-12 * (1.0 + std::abs(tr.bound));

  if (tr.tilde_k <= 0.0) {
    // u^+ vanishes and the tail is zero: the bound is 0 and every rung is
    // trivially satisfied
    tr.induction_ok.assign(static_cast<std::size_t>(jmax) + 1, true);
    tr.alpha.assign(static_cast<std::size_t>(jmax) + 1, 0.0);
    for (int j = 0; j <= jmax; ++j) {
      const Schedule sj = schedule(j, 1.0);
      tr.radii.push_back(sj.r);
      tr.radii_mid.push_back(sj.r_mid);
      tr.levels.push_back(0.0);
      tr.levels_mid.push_back(0.0);
    }
    return tr;
  }

  tr.alpha = level_norms(u, x0, tr.tilde_k, jmax, r);
  for (int j = 0; j <= jmax; ++j) {
    const Schedule sj = schedule(j, tr.tilde_k);
    tr.radii.push_back(sj.r);
    tr.radii_mid.push_back(sj.r_mid);
    tr.levels.push_back(sj.k);
    tr.levels_mid.push_back(sj.k_mid);
    // the ladder is checked honestly at every rung; the eta^{-j/beta} target
    // collapses fast, so beyond the first rungs it is met only when the level
    // k_j has climbed above sup u^+ and alpha_j vanishes identically
    const double lhs = std::sqrt(c_hat) * tr.alpha[static_cast<std::size_t>(j)] / tr.tilde_k;
    const double rhs = std::pow(p.eta, -static_cast<double>(j) / p.beta);
    tr.induction_ok.push_back(lhs <= rhs + 1e-12);
  }
  return tr;
}

}  // namespace nonlocal

#endif
