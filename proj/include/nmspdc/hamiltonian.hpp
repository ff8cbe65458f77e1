#pragma once

// Block decomposition of the two-mode down-conversion Hamiltonian
//   H = a^2 (b†) + (a†)^2 b
// over the conserved total quanta N = n_a + 2 n_b.  Each even N yields an
// (N/2 + 1)-dimensional invariant subspace spanned by |N-2k>_a |k>_b,
// k = 0..N/2, on which H is symmetric tridiagonal with zero diagonal.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmspdc {

struct SubspaceSpec {
  int N = 0;    // total quanta, even, >= 0
  int dim = 1;  // N/2 + 1
};

inline SubspaceSpec subspace_spec(int N) {
  if (N < 0 || N % 2 != 0)
    throw std::domain_error("subspace_spec: N must be even and non-negative, got " +
                            std::to_string(N));
  return SubspaceSpec{N, N / 2 + 1};
}

// Off-diagonal element <k+1|H|k> within block N.
inline double coupling(int N, int k) {
  SubspaceSpec s = subspace_spec(N);
  if (k < 0 || k >= s.dim - 1)
    throw std::domain_error("coupling: k out of range for block N=" + std::to_string(N) +
                            ", got k=" + std::to_string(k));
  double kk = static_cast<double>(k);
  double nn = static_cast<double>(N);
  return std::sqrt((kk + 1.0) * (nn - 2.0 * kk) * (nn - 2.0 * kk - 1.0));
}

struct TridiagonalHamiltonian {
  SubspaceSpec spec;
  std::vector<double> off;  // off[k] = coupling(N, k), size dim-1
  double max_coupling = 0.0;

  int dim() const noexcept { return spec.dim; }

  // Infinity norm bound (Gershgorin radius); every eigenvalue lies in
  // [-bound, bound].
  double spectral_bound() const noexcept {
    double g = 0.0;
    for (std::size_t i = 0; i < off.size(); ++i) {
      double row = off[i] + (i > 0 ? off[i - 1] : 0.0);
      if (row > g) g = row;
    }
    if (!off.empty() && off.back() > g) g = off.back();
    return g;
  }

  // y = T x
  void apply(const double* x, double* y) const {
    const int d = spec.dim;
    for (int i = 0; i < d; ++i) {
      double v = 0.0;
      if (i > 0) v += off[i - 1] * x[i - 1];
      if (i < d - 1) v += off[i] * x[i + 1];
      y[i] = v;
    }
  }
};

inline TridiagonalHamiltonian build_hamiltonian(int N) {
  TridiagonalHamiltonian h;
  h.spec = subspace_spec(N);
  h.off.resize(static_cast<std::size_t>(h.spec.dim - 1));
  for (int k = 0; k + 1 < h.spec.dim; ++k) {
    h.off[static_cast<std::size_t>(k)] = coupling(N, k);
    if (h.off[static_cast<std::size_t>(k)] > h.max_coupling)
      h.max_coupling = h.off[static_cast<std::size_t>(k)];
  }
  return h;
}

}  // namespace nmspdc
