#ifndef NONLOCAL_FRAC_PARAMS_HPP
#define NONLOCAL_FRAC_PARAMS_HPP

#include <cmath>
#include <stdexcept>

namespace nonlocal {

/// Normalization constant of the fractional Laplacian,
///   C_{n,s} = s 2^{2s} Gamma(n/2+s) / (pi^{n/2} Gamma(1-s)).
inline double kernel_constant(int n, double s) {
  if (n < 1) throw std::invalid_argument("kernel_constant: n must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel_constant: s must be in (0,1)");
  return s * std::pow(2.0, 2.0 * s) * std::tgamma(0.5 * n + s) /
         (std::pow(M_PI, 0.5 * n) * std::tgamma(1.0 - s));
}

/// Sobolev-type exponent used by the iteration: 4 when n = 1 <= 2s,
/// otherwise the critical exponent 2n/(n-2s).
inline double bar_p_exponent(int n, double s) {
  if (n < 1) throw std::invalid_argument("bar_p_exponent: n must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("bar_p_exponent: s must be in (0,1)");
  if (n == 1 && 2.0 * s >= 1.0) return 4.0;
  return 2.0 * n / (n - 2.0 * s);
}

/// Dimension and order of the operator, with the derived constants cached.
struct FracParams {
  int n = 1;
  double s = 0.5;
  double c_ns = 0.0;
  double pbar = 0.0;
  double beta = 0.0;
  double eta = 0.0;

  FracParams() : FracParams(1, 0.5) {}
  FracParams(int n_, double s_) : n(n_), s(s_) {
    c_ns = kernel_constant(n, s);
    pbar = bar_p_exponent(n, s);
    beta = 0.5 * pbar - 1.0;
    eta = std::pow(2.0, 0.25 * pbar * (n + 2.0 * s + 1.0) + beta);
  }

  /// Kernel exponent n + 2s.
  double kexp() const { return n + 2.0 * s; }
};

}  // namespace nonlocal

#endif
