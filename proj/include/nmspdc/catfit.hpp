#pragma once

// Characterization of post-selected signal states as squeezed even cats.
//
// The reference family is N(phi) e^{i n phi} [S(r)|beta> + S(r)|-beta>];
// fitting maximizes fidelity over (beta, r, phi) with a deterministic
// coarse grid followed by Nelder-Mead refinement.  Grid ties prefer the
// smaller |r|.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nmspdc/evolution.hpp"
#include "nmspdc/fock.hpp"
#include "nmspdc/measurement.hpp"

namespace nmspdc {

// Squeeze parameter of the reference cat: -ln sqrt(2).
inline double reference_squeeze() { return -0.5 * std::log(2.0); }

namespace detail {

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
};

// Deterministic Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5).  Stable ordering makes exact ties reproducible.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& step, int max_iter,
                                    double ftol, double xtol) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> v(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += step[i];
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = fn(v[i]);

  std::vector<std::size_t> order(n + 1);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t lo = order[0], hi = order[n], second = order[n - 1];

    double fspread = f[hi] - f[lo];
    double xspread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      xspread = std::max(xspread, std::fabs(v[hi][i] - v[lo][i]));
    if (fspread <= ftol && xspread <= xtol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == hi) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += v[k][i];
    }
    for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = centroid[i] + t * (v[hi][i] - centroid[i]);
      return x;
    };

    const std::vector<double> xr = blend(-1.0);
    const double fr = fn(xr);
    if (fr < f[order[0]]) {
      const std::vector<double> xe = blend(-2.0);
      const double fe = fn(xe);
      if (fe < fr) {
        v[hi] = xe;
        f[hi] = fe;
      } else {
        v[hi] = xr;
        f[hi] = fr;
      }
    } else if (fr < f[second]) {
      v[hi] = xr;
      f[hi] = fr;
    } else {
      const bool outside = fr < f[hi];
      const std::vector<double> xc = blend(outside ? -0.5 : 0.5);
      const double fc = fn(xc);
      if (fc < std::min(fr, f[hi])) {
        v[hi] = xc;
        f[hi] = fc;
      } else {
        for (std::size_t k = 0; k <= n; ++k) {
          if (k == lo) continue;
          for (std::size_t i = 0; i < n; ++i)
            v[k][i] = v[lo][i] + 0.5 * (v[k][i] - v[lo][i]);
          f[k] = fn(v[k]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (f[k] < f[best]) best = k;
  return NelderMeadResult{v[best], f[best], iter};
}

}  // namespace detail

struct CatFitResult {
  SqueezedCatParams params;
  double phase = 0.0;     // residual per-photon phase, in [-pi/2, pi/2]
  double fidelity = 0.0;  // at the fitted parameters
  int iterations = 0;
};

// Best squeezed-even-cat approximation of `signal`.  Preconditions: the
// state is normalizable and supported on even photon numbers (odd-mass
// fraction <= 1e-6).
inline CatFitResult fit_squeezed_cat(const FockVector& signal) {
  if (norm_sq(signal) <= 0.0)
    throw std::domain_error("fit_squeezed_cat: zero-norm signal");
  if (odd_fraction(signal) > 1e-6)
    throw std::domain_error("fit_squeezed_cat: signal has odd-photon support");
  const double mean = mean_photon(signal);

  const auto objective = [&](const std::vector<double>& x) -> double {
    const double b = x[0], r = x[1], phi = x[2];
    if (!(b > 0.0) || b > 40.0 || r < -1.6 || r > 1.6 || std::fabs(phi) > 2.0)
      return 1.0;
    try {
      const FockVector cat = squeezed_cat_amplitudes(
          {b, r}, std::max(default_cat_cutoff(b, r), signal.cutoff()));
      return 1.0 - fidelity(signal, phase_rotate(cat, phi));
    } catch (const std::domain_error&) {
      return 1.0;
    } catch (const truncation_error&) {
      return 1.0;
    }
  };

  // Coarse grid over (r, phi); beta seeded at each r by inverting the mean
  // photon number of the squeezed coherent component.
  double best_f = 2.0;
  std::vector<double> best_x = {std::sqrt(std::max(mean, 1e-6)), 0.0, 0.0};
  for (int ir = -30; ir <= 30; ++ir) {
    const double r = 0.05 * ir;
    const double sh = std::sinh(r);
    const double b2 = (mean - sh * sh) * std::exp(2.0 * r);
    if (!(b2 > 1e-8)) continue;
    const double b = std::min(std::sqrt(b2), 40.0);
    for (int ip = -4; ip <= 4; ++ip) {
      const double phi = ip * (std::acos(-1.0) / 8.0);
      const double f = objective({b, r, phi});
      const bool better =
          f < best_f - 1e-12 ||
          (std::fabs(f - best_f) <= 1e-12 && std::fabs(r) < std::fabs(best_x[1]));
      if (better) {
        best_f = f;
        best_x = {b, r, phi};
      }
    }
  }

  // Refine, then polish with a tight restart simplex.
  const std::vector<double> step1 = {0.02 * best_x[0] + 1e-3, 0.02, 0.02};
  auto res = detail::nelder_mead(objective, best_x, step1, 600, 1e-14, 1e-9);
  const std::vector<double> step2 = {1e-5 * best_x[0] + 1e-7, 1e-5, 1e-5};
  auto polish = detail::nelder_mead(objective, res.x, step2, 200, 1e-15, 1e-11);
  if (polish.f <= res.f) {
    polish.iterations += res.iterations;
    res = polish;
  }

  CatFitResult out;
  out.params.beta = res.x[0];
  out.params.r = res.x[1];
  out.phase = std::remainder(res.x[2], std::acos(-1.0));  // even support: period pi
  out.fidelity = 1.0 - objective({out.params.beta, out.params.r, out.phase});
  out.iterations = res.iterations;
  return out;
}

// One row of the m = 0 post-selection characterization.
struct FidelityLawRow {
  double beta = 0.0;
  double tau = 0.0;
  double probability = 0.0;
  double one_minus_f_fixed = 0.0;  // vs the cat at (beta, reference_squeeze())
  double one_minus_f_fit = 0.0;    // vs the best-fit cat
  double beta_fit = 0.0;
  double r_fit = 0.0;
  double phase = 0.0;
};

// Post-selected m = 0 signal at interaction time tau (tau < 0 selects
// tau_opt(beta)), phase-rotated by -pi/4 so the state is real up to
// numerical noise, then compared with the fixed and fitted cats.
inline FidelityLawRow characterize_m0(double beta, double tau = -1.0,
                                      const EvolutionMode& mode = EvolutionMode::full(),
                                      int threads = 1) {
  FidelityLawRow row;
  row.beta = beta;
  row.tau = tau < 0.0 ? tau_opt(beta) : tau;

  const NMState evolved = evolve(initial_state(beta), row.tau, mode, threads);
  const MeasurementOutcome out = project_pump(evolved, 0);
  if (!out.signal_defined)
    throw std::domain_error("characterize_m0: vacuum pump outcome has zero probability");
  row.probability = out.probability;
  const FockVector signal = phase_rotate(out.signal, -std::acos(-1.0) / 4.0);

  const FockVector fixed_cat = squeezed_cat_amplitudes(
      {beta, reference_squeeze()},
      std::max(default_cat_cutoff(beta, reference_squeeze()), signal.cutoff()));
  row.one_minus_f_fixed = 1.0 - fidelity(signal, fixed_cat);

  const CatFitResult fit = fit_squeezed_cat(signal);
  row.one_minus_f_fit = 1.0 - fit.fidelity;
  row.beta_fit = fit.params.beta;
  row.r_fit = fit.params.r;
  row.phase = fit.phase;
  return row;
}

inline std::vector<FidelityLawRow> fidelity_law(const std::vector<double>& betas,
                                                const EvolutionMode& mode =
                                                    EvolutionMode::full(),
                                                int threads = 1) {
  std::vector<FidelityLawRow> rows;
  rows.reserve(betas.size());
  for (double b : betas) rows.push_back(characterize_m0(b, -1.0, mode, threads));
  return rows;
}

// Characterization of every pump outcome m <= m_max at fixed beta.
struct PumpOutcomeRow {
  int m = 0;
  double probability = 0.0;
  bool fitted = false;  // outcomes below prob_threshold are skipped
  double fidelity = 0.0;
  double beta_fit = 0.0;
  double r_fit = 0.0;
  double phase = 0.0;
};

inline std::vector<PumpOutcomeRow> per_m_characterization(
    double beta, int m_max, double tau = -1.0,
    const EvolutionMode& mode = EvolutionMode::full(), int threads = 1,
    double prob_threshold = 1e-10) {
  if (m_max < 0) throw std::domain_error("per_m_characterization: m_max must be >= 0");
  const double t = tau < 0.0 ? tau_opt(beta) : tau;
  const NMState evolved = evolve(initial_state(beta), t, mode, threads);

  std::vector<PumpOutcomeRow> rows(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    PumpOutcomeRow& row = rows[static_cast<std::size_t>(m)];
    row.m = m;
    const MeasurementOutcome out = project_pump(evolved, m);
    row.probability = out.probability;
    if (!out.signal_defined || out.probability < prob_threshold) continue;
    const CatFitResult fit =
        fit_squeezed_cat(phase_rotate(out.signal, -std::acos(-1.0) / 4.0));
    row.fitted = true;
    row.fidelity = fit.fidelity;
    row.beta_fit = fit.params.beta;
    row.r_fit = fit.params.r;
    row.phase = fit.phase;
  }
  return rows;
}

}  // namespace nmspdc
