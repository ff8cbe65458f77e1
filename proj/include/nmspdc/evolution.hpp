#pragma once

// Two-mode state in the block representation and its time evolution.
//
// A state is stored as one complex amplitude vector per conserved-N block;
// the initial condition (vacuum signal, coherent pump) populates one basis
// state per block.  Evolution diagonalizes each block, either over the full
// spectrum or over the central window of smallest-magnitude eigenvalues.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "nmspdc/eigensolver.hpp"
#include "nmspdc/errors.hpp"
#include "nmspdc/fock.hpp"
#include "nmspdc/hamiltonian.hpp"
#include "nmspdc/parallel.hpp"

namespace nmspdc {

struct EvolutionMode {
  enum class Kind { full, central };
  Kind kind = Kind::full;
  int n_cut = 9;

  static EvolutionMode full() { return EvolutionMode{Kind::full, 0}; }
  static EvolutionMode central(int n_cut = 9) {
    if (n_cut < 0) throw std::domain_error("EvolutionMode: n_cut must be >= 0");
    return EvolutionMode{Kind::central, n_cut};
  }
  bool is_central() const noexcept { return kind == Kind::central; }
};

struct NMState {
  // blocks[N][k] = amplitude on |N-2k>_signal |k>_pump, N even
  std::map<int, std::vector<cplx>> blocks;

  double norm_sq() const {
    double s = 0.0;
    for (const auto& [N, a] : blocks)
      for (const cplx& x : a) s += std::norm(x);
    return s;
  }

  int max_pump_occupation() const {
    int m = -1;
    for (const auto& [N, a] : blocks) m = std::max(m, N / 2);
    return m;
  }

  void validate() const {
    for (const auto& [N, a] : blocks) {
      const SubspaceSpec s = subspace_spec(N);  // throws on odd/negative N
      if (static_cast<int>(a.size()) != s.dim)
        throw std::domain_error("NMState: block " + std::to_string(N) +
                                " has wrong dimension");
    }
  }
};

// Pump-depletion time scale: the post-selection probability of the vacuum
// pump outcome peaks at this interaction time.
inline double tau_opt(double beta) {
  if (!(beta > 0.0) || beta > 40.0)
    throw std::domain_error("tau_opt: beta must be in (0, 40]");
  return 1.70 / std::pow(1.0 + 1.16 * beta, 0.84);
}

// Vacuum signal + coherent pump |0>_s |beta>_p, one populated basis state
// per block.  The retained Poisson window keeps all but tail_eps of the mass.
inline NMState initial_state(double beta, double tail_eps = 1e-12) {
  if (beta < 0.0 || beta > 40.0)
    throw std::domain_error("initial_state: beta must be in [0, 40]");
  if (!(tail_eps > 0.0))
    throw std::domain_error("initial_state: tail_eps must be positive");

  NMState st;
  if (beta == 0.0) {
    st.blocks[0] = {cplx(1.0, 0.0)};
    return st;
  }

  const double mean = beta * beta;
  const int n_lo = std::max(0, static_cast<int>(std::floor(mean - 12.0 * beta)));
  int n_hi = static_cast<int>(std::ceil(mean + 12.0 * beta)) + 1;
  const int n_cap = n_hi + static_cast<int>(std::ceil(12.0 * beta)) + 200;

  double total = 0.0;
  std::map<int, double> amp;  // n -> coherent amplitude (real, positive)
  for (int n = n_lo; n <= n_cap; ++n) {
    const double la = -0.5 * mean + n * std::log(beta) - 0.5 * std::lgamma(n + 1.0);
    const double a = std::exp(la);
    if (n > n_hi && a * a < tail_eps * 1e-6 && total > 0.5) break;
    amp[n] = a;
    total += a * a;
  }
  if (1.0 - total > tail_eps)
    throw truncation_error("initial_state: Poisson window misses too much mass",
                           1.0 - total);

  for (const auto& [n, a] : amp) {
    std::vector<cplx> block(static_cast<std::size_t>(n) + 1, cplx(0.0, 0.0));
    block[static_cast<std::size_t>(n)] = cplx(a, 0.0);
    st.blocks[2 * n] = std::move(block);
  }
  return st;
}

// Process-wide cache of block decompositions.  Entries above the per-entry
// size cap, or not fitting the global budget, are recomputed on demand; the
// solver is deterministic, so cached and fresh results are identical.
class DecompositionCache {
public:
  std::shared_ptr<const EigenDecomposition> get(int N, const EvolutionMode& mode) {
    const Key key = make_key(N, mode);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = entries_.find(key);
      if (it != entries_.end()) return it->second;
    }
    const TridiagonalHamiltonian T = build_hamiltonian(N);
    int first = 0, count = T.dim();
    if (mode.is_central()) std::tie(first, count) = central_window(T.dim(), mode.n_cut);
    auto dec = std::make_shared<const EigenDecomposition>(eigen_window(T, first, count));
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = entries_.find(key);
      if (it != entries_.end()) return it->second;
      if (dec->bytes() <= kMaxEntryBytes && used_ + dec->bytes() <= kMaxTotalBytes) {
        used_ += dec->bytes();
        entries_.emplace(key, dec);
      }
    }
    return dec;
  }

  void clear() {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.clear();
    used_ = 0;
  }

private:
  using Key = std::tuple<int, int, int>;  // N, kind, n_cut
  static Key make_key(int N, const EvolutionMode& mode) {
    return {N, mode.is_central() ? 1 : 0, mode.is_central() ? mode.n_cut : -1};
  }

  static constexpr std::size_t kMaxEntryBytes = std::size_t(4) << 20;
  static constexpr std::size_t kMaxTotalBytes = std::size_t(256) << 20;

  std::mutex mu_;
  std::map<Key, std::shared_ptr<const EigenDecomposition>> entries_;
  std::size_t used_ = 0;
};

inline DecompositionCache& decomposition_cache() {
  static DecompositionCache cache;
  return cache;
}

namespace detail {

inline void propagate_block(int N, const std::vector<cplx>& a, double tau,
                            const EvolutionMode& mode, std::vector<cplx>& out) {
  const auto dec = decomposition_cache().get(N, mode);
  const int d = dec->dim;
  out.assign(a.size(), cplx(0.0, 0.0));
  for (int j = 0; j < dec->count(); ++j) {
    const double* v = dec->vec(j);
    cplx y(0.0, 0.0);
    for (int i = 0; i < d; ++i) y += v[i] * a[static_cast<std::size_t>(i)];
    const cplx w = std::polar(1.0, -dec->eigenvalues[static_cast<std::size_t>(j)] * tau) * y;
    for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] += w * v[i];
  }
}

}  // namespace detail

// exp(-i H tau) applied blockwise.  In central mode each block's amplitude
// vector is projected onto the retained eigenvector window, so the result's
// norm drops by the discarded weight.
inline NMState evolve(const NMState& state, double tau,
                      const EvolutionMode& mode = EvolutionMode::full(),
                      int threads = 1) {
  state.validate();
  NMState out;
  std::vector<std::pair<const int, const std::vector<cplx>*>> work;
  work.reserve(state.blocks.size());
  for (const auto& [N, a] : state.blocks) {
    out.blocks[N] = {};
    work.emplace_back(N, &a);
  }
  parallel_for(static_cast<int>(work.size()), std::max(1, threads), [&](int i) {
    const auto& [N, a] = work[static_cast<std::size_t>(i)];
    detail::propagate_block(N, *a, tau, mode, out.blocks.at(N));
  });
  return out;
}

// Spectral weights |<chi_j|0, n>|^2 of the initial basis state of block
// N = 2n; pairs (lambda_j, weight) in ascending lambda order.  Full mode
// weights sum to 1; central mode reports only the retained window.
inline std::vector<std::pair<double, double>> overlap_spectrum(
    int n, const EvolutionMode& mode = EvolutionMode::full()) {
  if (n < 0) throw std::domain_error("overlap_spectrum: n must be >= 0");
  const auto dec = decomposition_cache().get(2 * n, mode);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(dec->count()));
  for (int j = 0; j < dec->count(); ++j) {
    const double c = dec->vec(j)[n];  // component on |0>_s |n>_p
    out.emplace_back(dec->eigenvalues[static_cast<std::size_t>(j)], c * c);
  }
  return out;
}

}  // namespace nmspdc
