#pragma once

// Photon-number-resolving measurement of the pump mode.
//
// A pump outcome m picks component k = m from every block N >= 2m; the
// conditional signal state then has photon number n_s = N - 2m.  Because
// the initial condition populates only even-N blocks, every conditional
// signal state is supported on even photon numbers.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nmspdc/eigensolver.hpp"
#include "nmspdc/evolution.hpp"
#include "nmspdc/fock.hpp"

namespace nmspdc {

struct MeasurementOutcome {
  int m = 0;
  double probability = 0.0;
  bool signal_defined = false;
  FockVector signal;  // normalized; empty when the outcome has zero probability
};

inline MeasurementOutcome project_pump(const NMState& state, int m) {
  if (m < 0) throw std::domain_error("project_pump: m must be >= 0");
  MeasurementOutcome out;
  out.m = m;

  int n_top = -1;
  for (const auto& [N, a] : state.blocks)
    if (N >= 2 * m) n_top = std::max(n_top, N - 2 * m);
  if (n_top < 0) return out;

  out.signal.amp.assign(static_cast<std::size_t>(n_top) + 1, cplx(0.0, 0.0));
  double p = 0.0;
  for (const auto& [N, a] : state.blocks) {
    if (N < 2 * m) continue;
    const cplx c = a[static_cast<std::size_t>(m)];
    out.signal.amp[static_cast<std::size_t>(N - 2 * m)] = c;
    p += std::norm(c);
  }
  out.probability = p;
  if (p == 0.0) {
    out.signal.amp.clear();
    return out;
  }
  out.signal_defined = true;
  const double inv = 1.0 / std::sqrt(p);
  for (cplx& c : out.signal.amp) c *= inv;
  return out;
}

// Single spectral term of the pump-n -> pump-m transition amplitude in
// block N = 2n: chi_j[m] * chi_j[n] * e^{-i lambda_j tau}, with j the
// ascending eigenvalue index.
inline cplx m_coeff(int n, int j, int m, double tau) {
  if (n < 0) throw std::domain_error("m_coeff: n must be >= 0");
  if (m < 0 || m > n) throw std::domain_error("m_coeff: m must be in [0, n]");
  const TridiagonalHamiltonian T = build_hamiltonian(2 * n);
  if (j < 0 || j >= T.dim()) throw std::domain_error("m_coeff: eigen index out of range");
  const double lam = eigenvalue_by_index(T, j);
  const std::vector<double> v = inverse_iteration(T, lam, j);
  return v[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(n)] *
         std::polar(1.0, -lam * tau);
}

// Transition amplitudes A_n = sum_j chi_j[m] chi_j[n] e^{-i lambda_j tau}
// for n = n_lo..n_hi, summed over the mode's eigenvalue window of block 2n.
inline std::vector<cplx> transition_amplitudes(int n_lo, int n_hi, int m, double tau,
                                               const EvolutionMode& mode =
                                                   EvolutionMode::full()) {
  if (m < 0) throw std::domain_error("transition_amplitudes: m must be >= 0");
  if (n_lo < m || n_hi < n_lo)
    throw std::domain_error("transition_amplitudes: need m <= n_lo <= n_hi");
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo) + 1);
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto dec = decomposition_cache().get(2 * n, mode);
    cplx acc(0.0, 0.0);
    for (int j = 0; j < dec->count(); ++j) {
      const double* v = dec->vec(j);
      acc += v[m] * v[n] *
             std::polar(1.0, -dec->eigenvalues[static_cast<std::size_t>(j)] * tau);
    }
    out.push_back(acc);
  }
  return out;
}

struct ParityStats {
  double p_even = 0.0;
  double p_odd = 0.0;
  std::vector<double> per_m;  // probability of pump outcome m
};

inline ParityStats parity_statistics(const NMState& state) {
  ParityStats ps;
  const int m_top = state.max_pump_occupation();
  ps.per_m.assign(static_cast<std::size_t>(std::max(0, m_top + 1)), 0.0);
  for (const auto& [N, a] : state.blocks)
    for (std::size_t k = 0; k < a.size(); ++k) ps.per_m[k] += std::norm(a[k]);
  for (std::size_t m = 0; m < ps.per_m.size(); ++m)
    (m % 2 == 0 ? ps.p_even : ps.p_odd) += ps.per_m[m];
  return ps;
}

}  // namespace nmspdc
