#pragma once

// Single-mode Fock-space vectors and the squeezed/cat reference states.
//
// Squeeze convention: S(r) = exp((r/2)(a^2 - a^dag^2)), so that
// S^dag(r) a S(r) = a cosh r - a^dag sinh r and the mean photon number of
// S(r)|beta> is beta^2 e^{-2r} + sinh^2 r.  Negative r stretches the
// coherent amplitude.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmspdc/errors.hpp"

namespace nmspdc {

using cplx = std::complex<double>;

struct FockVector {
  std::vector<cplx> amp;  // amp[n] = <n|psi>

  int cutoff() const noexcept { return static_cast<int>(amp.size()) - 1; }
};

inline double norm_sq(const FockVector& v) {
  double s = 0.0;
  for (const cplx& a : v.amp) s += std::norm(a);
  return s;
}

// |beta> in the number basis, amplitudes computed in the log domain so that
// large beta neither under- nor overflows.  The cutoff is chosen so the
// neglected Poisson tail is below tail_eps.
inline FockVector coherent_amplitudes(double beta, double tail_eps = 1e-12) {
  if (beta < 0.0 || beta > 64.0)
    throw std::domain_error("coherent_amplitudes: beta must be in [0, 64]");
  if (!(tail_eps > 0.0))
    throw std::domain_error("coherent_amplitudes: tail_eps must be positive");
  if (beta == 0.0) return FockVector{{cplx(1.0, 0.0)}};

  const double mean = beta * beta;
  int cutoff = static_cast<int>(std::ceil(mean + 12.0 * beta + 20.0));
  FockVector v;
  for (int round = 0; round < 6; ++round) {
    v.amp.assign(static_cast<std::size_t>(cutoff) + 1, cplx(0.0, 0.0));
    for (int n = 0; n <= cutoff; ++n) {
      const double la = -0.5 * mean + n * std::log(beta) - 0.5 * std::lgamma(n + 1.0);
      v.amp[static_cast<std::size_t>(n)] = cplx(std::exp(la), 0.0);
    }
    if (1.0 - norm_sq(v) <= tail_eps) return v;
    cutoff += static_cast<int>(std::ceil(6.0 * beta + 20.0));
  }
  throw truncation_error("coherent_amplitudes: tail budget not met", 1.0 - norm_sq(v));
}

// Real number-basis amplitudes of S(r)|beta> (beta real), by the stable
// forward recurrence c_{n+1} = (beta c_n - sinh r sqrt(n) c_{n-1}) /
// (cosh r sqrt(n+1)).
inline std::vector<double> squeezed_coherent_amplitudes(double beta, double r,
                                                        int cutoff) {
  if (cutoff < 0)
    throw std::domain_error("squeezed_coherent_amplitudes: cutoff must be >= 0");
  const double gamma = beta * std::exp(-r);
  const double log_c0 =
      -0.5 * gamma * gamma * (1.0 + std::tanh(r)) - 0.5 * std::log(std::cosh(r));
  if (log_c0 < -700.0)
    throw std::domain_error(
        "squeezed_coherent_amplitudes: amplitude dynamic range exceeds double "
        "precision for beta=" + std::to_string(beta) + ", r=" + std::to_string(r));

  std::vector<double> c(static_cast<std::size_t>(cutoff) + 1, 0.0);
  c[0] = std::exp(log_c0);
  if (cutoff >= 1) c[1] = beta * c[0] / std::cosh(r);
  const double sh = std::sinh(r), ch = std::cosh(r);
  for (int n = 1; n < cutoff; ++n)
    c[static_cast<std::size_t>(n) + 1] =
        (beta * c[static_cast<std::size_t>(n)] -
         sh * std::sqrt(static_cast<double>(n)) * c[static_cast<std::size_t>(n) - 1]) /
        (ch * std::sqrt(static_cast<double>(n) + 1.0));
  return c;
}

struct SqueezedCatParams {
  double beta = 0.0;
  double r = 0.0;
};

// Default cutoff covering the even cat N(S(r)|beta> + S(r)|-beta>): the
// photon distribution is centred near beta^2 e^{-2r} with width of the same
// order, so both terms scale with max(1, e^{-2r}).
inline int default_cat_cutoff(double beta, double r) {
  const double s = std::max(1.0, std::exp(-2.0 * r));
  const double b = std::fabs(beta);
  return static_cast<int>(std::ceil(b * b * s + 12.0 * b * s + 20.0));
}

// Normalized even squeezed cat.  cutoff < 0 selects the default; a cutoff
// that drops more than 1e-10 of the state's mass raises truncation_error.
inline FockVector squeezed_cat_amplitudes(const SqueezedCatParams& p, int cutoff = -1) {
  if (cutoff < 0) cutoff = default_cat_cutoff(p.beta, p.r);
  // Extend far enough to expose any mass the requested cutoff would drop.
  const int probe = std::max(default_cat_cutoff(p.beta, p.r), cutoff + 50);
  const std::vector<double> c = squeezed_coherent_amplitudes(p.beta, p.r, probe);

  double kept = 0.0, total = 0.0;
  for (int n = 0; n <= probe; n += 2) {  // odd components cancel in the even cat
    const double w = c[static_cast<std::size_t>(n)] * c[static_cast<std::size_t>(n)];
    total += w;
    if (n <= cutoff) kept += w;
  }
  if (total <= 0.0)
    throw std::domain_error("squeezed_cat_amplitudes: vanishing state");
  const double deficit = 1.0 - kept / total;
  if (deficit >= 1e-10)
    throw truncation_error("squeezed_cat_amplitudes: cutoff " + std::to_string(cutoff) +
                               " drops " + std::to_string(deficit) + " of the mass",
                           deficit);

  FockVector v;
  v.amp.assign(static_cast<std::size_t>(cutoff) + 1, cplx(0.0, 0.0));
  const double inv = 1.0 / std::sqrt(kept);
  for (int n = 0; n <= cutoff; n += 2)
    v.amp[static_cast<std::size_t>(n)] = cplx(c[static_cast<std::size_t>(n)] * inv, 0.0);
  return v;
}

// amp[n] -> e^{-i n phi} amp[n]  (phase-space rotation by phi)
inline FockVector phase_rotate(const FockVector& v, double phi) {
  FockVector out = v;
  for (std::size_t n = 0; n < out.amp.size(); ++n)
    out.amp[n] *= std::polar(1.0, -static_cast<double>(n) * phi);
  return out;
}

// |<u|v>|^2 / (<u|u><v|v>), vectors zero-padded to a common cutoff.
inline double fidelity(const FockVector& u, const FockVector& v) {
  const double nu = norm_sq(u), nv = norm_sq(v);
  if (nu <= 0.0 || nv <= 0.0)
    throw std::domain_error("fidelity: zero-norm state");
  const std::size_t m = std::min(u.amp.size(), v.amp.size());
  cplx ov(0.0, 0.0);
  for (std::size_t n = 0; n < m; ++n) ov += std::conj(u.amp[n]) * v.amp[n];
  return std::norm(ov) / (nu * nv);
}

inline double mean_photon(const FockVector& v) {
  const double ns = norm_sq(v);
  if (ns <= 0.0) throw std::domain_error("mean_photon: zero-norm state");
  double s = 0.0;
  for (std::size_t n = 0; n < v.amp.size(); ++n)
    s += static_cast<double>(n) * std::norm(v.amp[n]);
  return s / ns;
}

inline double photon_variance(const FockVector& v) {
  const double ns = norm_sq(v);
  if (ns <= 0.0) throw std::domain_error("photon_variance: zero-norm state");
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < v.amp.size(); ++n) {
    const double w = std::norm(v.amp[n]);
    s1 += static_cast<double>(n) * w;
    s2 += static_cast<double>(n) * static_cast<double>(n) * w;
  }
  s1 /= ns;
  s2 /= ns;
  return s2 - s1 * s1;
}

// Fraction of the state's mass on odd photon numbers.
inline double odd_fraction(const FockVector& v) {
  const double ns = norm_sq(v);
  if (ns <= 0.0) throw std::domain_error("odd_fraction: zero-norm state");
  double odd = 0.0;
  for (std::size_t n = 1; n < v.amp.size(); n += 2) odd += std::norm(v.amp[n]);
  return odd / ns;
}

// Closed form for <beta| S^dag(r) n S(r) |alpha> with alpha, beta real:
//   e^{-(alpha-beta)^2/2} (-(alpha^2+beta^2) sinh(2r)/2
//                          + alpha beta cosh(2r) + sinh^2 r).
inline double v_moment(double alpha, double beta, double r) {
  const double d = alpha - beta;
  const double sh = std::sinh(r);
  return std::exp(-0.5 * d * d) *
         (-0.5 * (alpha * alpha + beta * beta) * std::sinh(2.0 * r) +
          alpha * beta * std::cosh(2.0 * r) + sh * sh);
}

}  // namespace nmspdc
