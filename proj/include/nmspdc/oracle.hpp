#pragma once

// Dense two-mode reference implementation, used as an independent
// cross-check of the block-decomposed pipeline at small cutoffs.  The state
// lives on the full rectangle {0..dim_a-1} x {0..dim_b-1}; the Hamiltonian
// a^2 b^dag + a^dag^2 b is built elementwise and exponentiated through a
// dense symmetric eigendecomposition.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nmspdc/errors.hpp"
#include "nmspdc/evolution.hpp"
#include "nmspdc/fock.hpp"

namespace nmspdc {

struct DenseTwoModeState {
  int dim_a = 0;  // signal levels 0..dim_a-1
  int dim_b = 0;  // pump levels 0..dim_b-1
  Eigen::VectorXcd amp;

  int index(int na, int nb) const { return na * dim_b + nb; }

  double norm_sq() const { return amp.squaredNorm(); }
};

inline DenseTwoModeState dense_zero_state(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1)
    throw std::domain_error("dense_zero_state: dimensions must be >= 1");
  DenseTwoModeState s;
  s.dim_a = dim_a;
  s.dim_b = dim_b;
  s.amp = Eigen::VectorXcd::Zero(dim_a * dim_b);
  return s;
}

// <na+2, nb-1| H |na, nb> = sqrt((na+1)(na+2) nb), plus the transpose.
inline Eigen::MatrixXd dense_hamiltonian(int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1)
    throw std::domain_error("dense_hamiltonian: dimensions must be >= 1");
  const int n = dim_a * dim_b;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int na = 0; na + 2 < dim_a; ++na) {
    for (int nb = 1; nb < dim_b; ++nb) {
      const double el = std::sqrt((na + 1.0) * (na + 2.0) * nb);
      const int row = (na + 2) * dim_b + (nb - 1);
      const int col = na * dim_b + nb;
      H(row, col) = el;
      H(col, row) = el;
    }
  }
  return H;
}

// Largest N whose block lies entirely inside the rectangle.
inline int complete_block_limit(int dim_a, int dim_b) {
  return std::min(dim_a - 1, 2 * (dim_b - 1));
}

// Probability mass on basis states whose conserved-N block is clipped by
// the rectangle; such blocks evolve incorrectly (boundary reflection).
inline double incomplete_block_mass(const DenseTwoModeState& s) {
  const int limit = complete_block_limit(s.dim_a, s.dim_b);
  double mass = 0.0;
  for (int na = 0; na < s.dim_a; ++na)
    for (int nb = 0; nb < s.dim_b; ++nb)
      if (na + 2 * nb > limit) mass += std::norm(s.amp(s.index(na, nb)));
  return mass;
}

inline DenseTwoModeState dense_evolve(const DenseTwoModeState& in, double tau,
                                      double leakage_budget = 1e-10) {
  const double leak = incomplete_block_mass(in);
  if (leak > leakage_budget)
    throw truncation_error(
        "dense_evolve: input has " + std::to_string(leak) +
            " probability on blocks clipped by the cutoffs",
        leak);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(in.dim_a, in.dim_b));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_evolve: eigendecomposition failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd U = es.eigenvectors();
  Eigen::VectorXcd phase(lam.size());
  for (Eigen::Index j = 0; j < lam.size(); ++j)
    phase(j) = std::polar(1.0, -lam(j) * tau);
  DenseTwoModeState out = in;
  out.amp = U * (phase.asDiagonal() * (U.transpose() * in.amp));
  return out;
}

// Embed a block-decomposed state into the rectangle.  Blocks that do not
// fit entirely raise truncation_error with the dropped mass.
inline DenseTwoModeState nm_to_dense(const NMState& st, int dim_a, int dim_b) {
  DenseTwoModeState out = dense_zero_state(dim_a, dim_b);
  const int limit = complete_block_limit(dim_a, dim_b);
  double dropped = 0.0;
  for (const auto& [N, a] : st.blocks) {
    if (N > limit) {
      for (const cplx& c : a) dropped += std::norm(c);
      continue;
    }
    for (int k = 0; k <= N / 2; ++k)
      out.amp(out.index(N - 2 * k, k)) = a[static_cast<std::size_t>(k)];
  }
  if (dropped > 0.0)
    throw truncation_error("nm_to_dense: state extends beyond complete blocks", dropped);
  return out;
}

// Restrict to the even-N complete blocks of the rectangle.
inline NMState dense_to_nm(const DenseTwoModeState& s) {
  NMState out;
  const int limit = complete_block_limit(s.dim_a, s.dim_b);
  for (int N = 0; N <= limit; N += 2) {
    std::vector<cplx> block(static_cast<std::size_t>(N / 2) + 1, cplx(0.0, 0.0));
    for (int k = 0; k <= N / 2; ++k) block[static_cast<std::size_t>(k)] = s.amp(s.index(N - 2 * k, k));
    out.blocks[N] = std::move(block);
  }
  return out;
}

inline std::vector<double> dense_pump_marginal(const DenseTwoModeState& s) {
  std::vector<double> p(static_cast<std::size_t>(s.dim_b), 0.0);
  for (int nb = 0; nb < s.dim_b; ++nb)
    for (int na = 0; na < s.dim_a; ++na)
      p[static_cast<std::size_t>(nb)] += std::norm(s.amp(s.index(na, nb)));
  return p;
}

// Conditional signal state for pump outcome nb = m.
inline std::pair<double, FockVector> dense_project_pump(const DenseTwoModeState& s,
                                                        int m) {
  if (m < 0 || m >= s.dim_b)
    throw std::domain_error("dense_project_pump: m out of range");
  FockVector v;
  v.amp.assign(static_cast<std::size_t>(s.dim_a), cplx(0.0, 0.0));
  double p = 0.0;
  for (int na = 0; na < s.dim_a; ++na) {
    const cplx c = s.amp(s.index(na, m));
    v.amp[static_cast<std::size_t>(na)] = c;
    p += std::norm(c);
  }
  if (p == 0.0) return {0.0, FockVector{}};
  const double inv = 1.0 / std::sqrt(p);
  for (cplx& c : v.amp) c *= inv;
  return {p, v};
}

}  // namespace nmspdc
