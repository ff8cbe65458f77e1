#pragma once

// Eigensolver for the zero-diagonal symmetric tridiagonal block Hamiltonians.
//
// Eigenvalues are located one ascending-index at a time with Sturm-sequence
// bisection; eigenvectors follow by inverse iteration with a factored
// tridiagonal solve.  The spectrum of every block is simple (off-diagonals
// are strictly positive) and, for this operator family, neighbouring
// eigenvalues are separated by gaps of order sqrt(N), so no
// reorthogonalization is required.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmspdc/hamiltonian.hpp"

namespace nmspdc {

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

inline std::uint64_t lcg_next(std::uint64_t& s) {
  s = s * 6364136223846793005ULL + 1442695040888963407ULL;
  return s;
}

// Deterministic pseudo-random double in [-0.5, 0.5).
inline double lcg_unit(std::uint64_t& s) {
  return std::ldexp(static_cast<double>(lcg_next(s) >> 11), -53) - 0.5;
}

// Number of eigenvalues of T strictly below x, via the sign count of the
// LDL^T pivots of T - xI.  csq holds the squared off-diagonal elements.
inline int sturm_count_below(const std::vector<double>& csq, double x, double pivmin) {
  int count = 0;
  double d = -x;
  if (std::fabs(d) < pivmin) d = -pivmin;
  if (d < 0.0) ++count;
  for (double c2 : csq) {
    d = -x - c2 / d;
    if (std::fabs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

// Partial-pivot LU factorization of T - lambda*I (tridiagonal), plus solve.
struct TridiagonalFactor {
  std::vector<double> sub;   // multipliers
  std::vector<double> diag;  // U diagonal
  std::vector<double> sup;   // U first superdiagonal
  std::vector<double> sup2;  // U second superdiagonal (pivoting fill-in)
  std::vector<char> swapped;

  void factor(const std::vector<double>& off, double lambda, double pivot_floor) {
    const int n = static_cast<int>(off.size()) + 1;
    diag.assign(static_cast<std::size_t>(n), -lambda);
    sub.assign(off.begin(), off.end());
    sup.assign(off.begin(), off.end());
    sup2.assign(static_cast<std::size_t>(std::max(0, n - 2)), 0.0);
    swapped.assign(static_cast<std::size_t>(std::max(0, n - 1)), 0);
    for (int i = 0; i + 1 < n; ++i) {
      if (std::fabs(diag[i]) >= std::fabs(sub[i])) {
        swapped[i] = 0;
        if (std::fabs(diag[i]) < pivot_floor)
          diag[i] = diag[i] < 0.0 ? -pivot_floor : pivot_floor;
        const double fact = sub[i] / diag[i];
        sub[i] = fact;
        diag[i + 1] -= fact * sup[i];
        if (i + 2 < n) sup2[i] = 0.0;
      } else {
        swapped[i] = 1;
        const double fact = diag[i] / sub[i];
        diag[i] = sub[i];
        const double tmp = sup[i];
        sup[i] = diag[i + 1];
        diag[i + 1] = tmp - fact * diag[i + 1];
        if (i + 2 < n) {
          sup2[i] = sup[i + 1];
          sup[i + 1] = -fact * sup[i + 1];
        }
        sub[i] = fact;
      }
    }
    if (std::fabs(diag[n - 1]) < pivot_floor)
      diag[n - 1] = diag[n - 1] < 0.0 ? -pivot_floor : pivot_floor;
  }

  void solve(std::vector<double>& b) const {
    const int n = static_cast<int>(b.size());
    for (int i = 0; i + 1 < n; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= sub[i] * b[i];
      } else {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - sub[i] * b[i];
      }
    }
    b[n - 1] /= diag[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - sup[n - 2] * b[n - 1]) / diag[n - 2];
    for (int i = n - 3; i >= 0; --i)
      b[i] = (b[i] - sup[i] * b[i + 1] - sup2[i] * b[i + 2]) / diag[i];
  }
};

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Fix the overall sign: first structurally nonzero component positive.
inline void fix_sign(std::vector<double>& v) {
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::fabs(x));
  if (vmax == 0.0) return;
  for (double x : v) {
    if (std::fabs(x) > 1e-8 * vmax) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

inline double squared_offdiag_max(const std::vector<double>& off) {
  double m = 1.0;
  for (double c : off) m = std::max(m, c * c);
  return m;
}

}  // namespace detail

// k-th smallest eigenvalue (0-based, ascending) of the block Hamiltonian.
inline double eigenvalue_by_index(const TridiagonalHamiltonian& T, int index) {
  const int d = T.dim();
  if (index < 0 || index >= d)
    throw std::domain_error("eigenvalue_by_index: index out of range");
  if (d == 1) return 0.0;

  std::vector<double> csq(T.off.size());
  for (std::size_t i = 0; i < T.off.size(); ++i) csq[i] = T.off[i] * T.off[i];
  const double pivmin =
      std::numeric_limits<double>::min() * detail::squared_offdiag_max(T.off);

  double lo = -T.spectral_bound() - 1.0;
  double hi = -lo;
  for (int it = 0; it < 128; ++it) {
    const double width = hi - lo;
    const double tol =
        2.0 * detail::kEps * std::max(std::fabs(lo), std::fabs(hi)) + 2.0 * pivmin;
    if (width <= tol) break;
    const double mid = 0.5 * (lo + hi);
    if (detail::sturm_count_below(csq, mid, pivmin) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector for an eigenvalue approximation lambda, by inverse iteration.
// The deterministic start vector is seeded from (N, seed_tag).
inline std::vector<double> inverse_iteration(const TridiagonalHamiltonian& T,
                                             double lambda, int seed_tag) {
  const int d = T.dim();
  std::vector<double> v(static_cast<std::size_t>(d));
  if (d == 1) {
    v[0] = 1.0;
    return v;
  }

  std::uint64_t seed = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(T.spec.N)) << 32) ^
                       static_cast<std::uint64_t>(static_cast<std::uint32_t>(seed_tag)) ^
                       0x9E3779B97F4A7C15ULL;
  for (double& x : v) x = detail::lcg_unit(seed);
  double nrm = detail::norm2(v);
  for (double& x : v) x /= nrm;

  const double scale = std::max(1.0, T.spectral_bound());
  const double pivot_floor = detail::kEps * scale;
  detail::TridiagonalFactor f;
  f.factor(T.off, lambda, pivot_floor);

  std::vector<double> resid(static_cast<std::size_t>(d));
  const double tol = 128.0 * detail::kEps * scale;
  for (int iter = 0; iter < 10; ++iter) {
    f.solve(v);
    nrm = detail::norm2(v);
    for (double& x : v) x /= nrm;
    if (iter >= 1) {
      T.apply(v.data(), resid.data());
      double r = 0.0;
      for (int i = 0; i < d; ++i) r = std::max(r, std::fabs(resid[i] - lambda * v[i]));
      if (r <= tol) break;
    }
  }
  detail::fix_sign(v);
  return v;
}

struct EigenDecomposition {
  int N = 0;
  int dim = 1;
  int first_index = 0;               // ascending-spectrum index of eigenvalues[0]
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> eigenvectors;  // dim x count, column-major

  int count() const noexcept { return static_cast<int>(eigenvalues.size()); }
  bool is_full() const noexcept { return count() == dim; }
  const double* vec(int j) const { return eigenvectors.data() + static_cast<std::size_t>(j) * dim; }
  std::size_t bytes() const noexcept {
    return (eigenvalues.size() + eigenvectors.size()) * sizeof(double);
  }
};

// Index window of the m = min(dim, 2*n_cut+1) eigenvalues of smallest
// magnitude: by the +/- symmetry of the spectrum it is the contiguous
// ascending run starting at floor((dim - m) / 2).
inline std::pair<int, int> central_window(int dim, int n_cut) {
  if (n_cut < 0) throw std::domain_error("central_window: n_cut must be >= 0");
  const int m = std::min(dim, 2 * n_cut + 1);
  return {(dim - m) / 2, m};
}

// Visit eigenpairs (ascending index) without materializing the full basis.
inline void for_each_eigenpair(
    const TridiagonalHamiltonian& T, int first_index, int count,
    const std::function<void(int, double, const std::vector<double>&)>& visit) {
  for (int j = first_index; j < first_index + count; ++j) {
    const double lam = eigenvalue_by_index(T, j);
    const std::vector<double> v = inverse_iteration(T, lam, j);
    visit(j, lam, v);
  }
}

inline EigenDecomposition eigen_window(const TridiagonalHamiltonian& T,
                                       int first_index, int count) {
  EigenDecomposition e;
  e.N = T.spec.N;
  e.dim = T.dim();
  e.first_index = first_index;
  e.eigenvalues.reserve(static_cast<std::size_t>(count));
  e.eigenvectors.reserve(static_cast<std::size_t>(count) * e.dim);
  for_each_eigenpair(T, first_index, count,
                     [&](int, double lam, const std::vector<double>& v) {
                       e.eigenvalues.push_back(lam);
                       e.eigenvectors.insert(e.eigenvectors.end(), v.begin(), v.end());
                     });
  return e;
}

inline EigenDecomposition eigen_full(const TridiagonalHamiltonian& T) {
  return eigen_window(T, 0, T.dim());
}

inline EigenDecomposition eigen_central(const TridiagonalHamiltonian& T, int n_cut) {
  auto [start, m] = central_window(T.dim(), n_cut);
  return eigen_window(T, start, m);
}

// Eigenvector by the three-term recurrence chi_{k+1} = (lambda*chi_k -
// c_{k-1}*chi_{k-1}) / c_k.  Numerically unstable away from the central
// spectrum; `diverged` reports growth beyond 1e12 before normalization.
struct RecurrenceVector {
  std::vector<double> v;
  bool diverged = false;
};

inline RecurrenceVector eigvec_by_recurrence(const TridiagonalHamiltonian& T,
                                             double lambda) {
  const int d = T.dim();
  RecurrenceVector r;
  r.v.assign(static_cast<std::size_t>(d), 0.0);
  r.v[0] = 1.0;
  double peak = 1.0;
  if (d > 1) {
    r.v[1] = lambda / T.off[0];
    peak = std::max(peak, std::fabs(r.v[1]));
  }
  for (int k = 1; k + 1 < d; ++k) {
    r.v[k + 1] = (lambda * r.v[k] - T.off[k - 1] * r.v[k - 1]) / T.off[k];
    peak = std::max(peak, std::fabs(r.v[k + 1]));
  }
  r.diverged = !(peak <= 1e12);
  const double nrm = detail::norm2(r.v);
  if (nrm > 0.0 && std::isfinite(nrm))
    for (double& x : r.v) x /= nrm;
  detail::fix_sign(r.v);
  return r;
}

// Power-law fit to the central part of the spectrum (indices counted from
// the spectral center, valid for k <= 10).  For N/2 even, k = 0 maps to the
// zero eigenvalue; for N/2 odd, to the smallest positive one.
inline int central_fit_index(int N, int k) {
  SubspaceSpec s = subspace_spec(N);
  const int center = (s.dim % 2 == 1) ? (s.dim - 1) / 2 : s.dim / 2;
  if (k < 0 || k > 10)
    throw std::domain_error("central fit index: k must be in [0, 10]");
  if (center + k >= s.dim)
    throw std::domain_error("central fit index: k exceeds block dimension");
  return center + k;
}

inline double approx_central_eigenvalue(int N, int k) {
  central_fit_index(N, k);  // validate domain
  if (N == 0) return 0.0;
  const double Nd = static_cast<double>(N);
  const double kd = static_cast<double>(k);
  if ((N / 2) % 2 == 0) {
    const double b = 1.43 * std::pow(6.99 + Nd, 0.41);
    const double p = 1.09 + 0.84 * std::pow(Nd, -0.39);
    return b * std::pow(kd, p);
  }
  const double a = 2.14 + 0.43 * std::pow(Nd, 0.46);
  const double b = 1.58 * std::pow(6.04 + Nd, 0.41);
  const double p = 1.08 + 0.90 * std::pow(Nd, -0.41);
  return a + b * std::pow(kd, p);
}

struct ApproxAccuracyRow {
  int N = 0;
  int k = 0;
  double lambda_numeric = 0.0;
  double lambda_approx = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;  // abs_err / max(|lambda_numeric|, 1)
};

inline std::vector<ApproxAccuracyRow> approx_accuracy_table(
    const std::vector<int>& Ns = {100, 200, 202, 400}, int k_max = 10) {
  std::vector<ApproxAccuracyRow> rows;
  for (int N : Ns) {
    const TridiagonalHamiltonian T = build_hamiltonian(N);
    for (int k = 0; k <= k_max; ++k) {
      ApproxAccuracyRow row;
      row.N = N;
      row.k = k;
      row.lambda_numeric = eigenvalue_by_index(T, central_fit_index(N, k));
      row.lambda_approx = approx_central_eigenvalue(N, k);
      row.abs_err = std::fabs(row.lambda_approx - row.lambda_numeric);
      row.rel_err = row.abs_err / std::max(std::fabs(row.lambda_numeric), 1.0);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace nmspdc
