// Command-line front end for the two-mode parametric interaction toolkit.
//
// Subcommands: eigvals, overlap, evolve, measure, fit, sweep, reproduce,
// and a hidden oracle cross-check.  All tabular output is CSV with a header
// row and 17-significant-digit floats; measure/fit/sweep can emit JSON.
//
// Exit codes: 0 success, 2 usage error (bad flags or argument domains),
// 3 numeric failure (truncation / dynamic-range limits).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <nmspdc/catfit.hpp>
#include <nmspdc/errors.hpp>
#include <nmspdc/evolution.hpp>
#include <nmspdc/fock.hpp>
#include <nmspdc/hamiltonian.hpp>
#include <nmspdc/io.hpp>
#include <nmspdc/measurement.hpp>
#include <nmspdc/oracle.hpp>
#include <nmspdc/parallel.hpp>

namespace {

using nmspdc::cplx;
using nmspdc::EvolutionMode;
using nmspdc::io::csv_row;
using nmspdc::io::csv_sanitize;
using nmspdc::io::fmt17;
using json = nlohmann::json;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output sink: stdout by default, a file when --output is given.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  void open(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw usage_error("cannot open output file: " + path);
    os = &file;
  }
  std::ostream& stream() { return *os; }
};

double parse_tau(const std::string& spec, double beta) {
  if (spec == "opt") return nmspdc::tau_opt(beta);
  try {
    return nmspdc::io::parse_double(spec);
  } catch (const std::exception&) {
    throw usage_error("--tau expects a number or 'opt', got '" + spec + "'");
  }
}

EvolutionMode parse_mode(const std::string& mode, int n_cut) {
  if (mode == "full") return EvolutionMode::full();
  if (mode == "central") {
    if (n_cut < 0) throw usage_error("--n-cut must be >= 0");
    return EvolutionMode::central(n_cut);
  }
  throw usage_error("--mode expects 'full' or 'central', got '" + mode + "'");
}

// ---------------------------------------------------------------------------
// eigvals: eigenvalues of one fixed-total-energy block, with the closed-form
// approximation column where the central-fit domain applies.
// ---------------------------------------------------------------------------

void cmd_eigvals(int N, int central, Sink& sink) {
  const nmspdc::TridiagonalHamiltonian T = nmspdc::build_hamiltonian(N);
  const nmspdc::EigenDecomposition dec =
      central >= 0 ? nmspdc::eigen_central(T, central) : nmspdc::eigen_full(T);
  const int dim = dec.dim;

  std::ostream& os = sink.stream();
  os << "N,j,lambda,approx_lambda,rel_err\n";
  for (int i = 0; i < dec.count(); ++i) {
    const int j = dec.first_index + i;
    const double lambda = dec.eigenvalues[static_cast<std::size_t>(i)];
    bool have = false;
    double approx = 0.0;
    if (dim % 2 == 1) {
      // Symmetric spectrum with a zero eigenvalue at the center: signed
      // offsets map onto the non-negative fit domain by reflection.
      const int center = (dim - 1) / 2;
      const int k = j - center;
      if (std::abs(k) <= 10) {
        approx = (k < 0 ? -1.0 : 1.0) * nmspdc::approx_central_eigenvalue(N, std::abs(k));
        have = true;
      }
    } else {
      // No zero eigenvalue: the fit covers the smallest positive branch,
      // the negative branch is its mirror image.
      const int c = dim / 2;
      if (j >= c && j - c <= 10) {
        approx = nmspdc::approx_central_eigenvalue(N, j - c);
        have = true;
      } else if (j < c && c - 1 - j <= 10) {
        approx = -nmspdc::approx_central_eigenvalue(N, c - 1 - j);
        have = true;
      }
    }
    std::vector<std::string> row = {std::to_string(N), std::to_string(j), fmt17(lambda),
                                    "", ""};
    if (have) {
      row[3] = fmt17(approx);
      row[4] = fmt17(std::fabs(lambda - approx) / std::max(std::fabs(lambda), 1.0));
    }
    os << csv_row(row);
  }
}

// ---------------------------------------------------------------------------
// overlap: spectral weights of the initial pump Fock state in its block.
// ---------------------------------------------------------------------------

void cmd_overlap(int n, int central, Sink& sink) {
  const EvolutionMode mode =
      central >= 0 ? EvolutionMode::central(central) : EvolutionMode::full();
  const auto spectrum = nmspdc::overlap_spectrum(n, mode);
  std::ostream& os = sink.stream();
  os << "n,lambda,weight\n";
  for (const auto& [lambda, weight] : spectrum)
    os << csv_row({std::to_string(n), fmt17(lambda), fmt17(weight)});
}

// ---------------------------------------------------------------------------
// evolve: full two-mode state after interaction time tau, one row per basis
// vector of every populated block.
// ---------------------------------------------------------------------------

void cmd_evolve(double beta, const std::string& tau_spec, const EvolutionMode& mode,
                int threads, Sink& sink) {
  const double tau = parse_tau(tau_spec, beta);
  const nmspdc::NMState state =
      nmspdc::evolve(nmspdc::initial_state(beta), tau, mode, threads);
  std::ostream& os = sink.stream();
  os << "N,k,re,im\n";
  for (const auto& [N, amps] : state.blocks)
    for (std::size_t k = 0; k < amps.size(); ++k)
      os << csv_row({std::to_string(N), std::to_string(k), fmt17(amps[k].real()),
                     fmt17(amps[k].imag())});
}

// ---------------------------------------------------------------------------
// measure: pump photon-number projection (JSON), or the full per-outcome
// probability table (--parity, CSV).
// ---------------------------------------------------------------------------

void cmd_measure(double beta, const std::string& tau_spec, int m, bool parity,
                 const EvolutionMode& mode, int threads, Sink& sink) {
  const double tau = parse_tau(tau_spec, beta);
  const nmspdc::NMState state =
      nmspdc::evolve(nmspdc::initial_state(beta), tau, mode, threads);
  std::ostream& os = sink.stream();

  if (parity) {
    const nmspdc::ParityStats ps = nmspdc::parity_statistics(state);
    os << "m,probability\n";
    for (std::size_t i = 0; i < ps.per_m.size(); ++i)
      os << csv_row({std::to_string(i), fmt17(ps.per_m[i])});
    return;
  }

  const nmspdc::MeasurementOutcome out = nmspdc::project_pump(state, m);
  json j;
  j["m"] = out.m;
  j["probability"] = out.probability;
  j["signal_defined"] = out.signal_defined;
  if (out.signal_defined) {
    j["cutoff"] = out.signal.cutoff();
    json amps = json::array();
    for (const cplx& a : out.signal.amp) amps.push_back({a.real(), a.imag()});
    j["signal"] = std::move(amps);
  } else {
    j["signal"] = nullptr;
  }
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// fit: single post-selected state characterized against the squeezed-cat
// ansatz; CSV by default, JSON mirror with --json.
// ---------------------------------------------------------------------------

struct FitRow {
  double beta = 0.0;
  int m = 0;
  double tau = 0.0;
  double probability = 0.0;
  double one_minus_f_fixed = 0.0;
  double one_minus_f_fit = 0.0;
  double beta_fit = 0.0;
  double r_fit = 0.0;
  double phase = 0.0;
};

FitRow run_fit(double beta, const std::string& tau_spec, int m, const EvolutionMode& mode,
               int threads) {
  FitRow row;
  row.beta = beta;
  row.m = m;
  row.tau = parse_tau(tau_spec, beta);

  if (m == 0) {
    const nmspdc::FidelityLawRow r = nmspdc::characterize_m0(beta, row.tau, mode, threads);
    row.probability = r.probability;
    row.one_minus_f_fixed = r.one_minus_f_fixed;
    row.one_minus_f_fit = r.one_minus_f_fit;
    row.beta_fit = r.beta_fit;
    row.r_fit = r.r_fit;
    row.phase = r.phase;
    return row;
  }

  const nmspdc::NMState state =
      nmspdc::evolve(nmspdc::initial_state(beta), row.tau, mode, threads);
  const nmspdc::MeasurementOutcome out = nmspdc::project_pump(state, m);
  if (!out.signal_defined || out.probability < 1e-10)
    throw std::domain_error("fit: outcome probability below 1e-10, nothing to fit");
  row.probability = out.probability;
  const nmspdc::FockVector signal =
      nmspdc::phase_rotate(out.signal, -std::acos(-1.0) / 4.0);
  const nmspdc::FockVector fixed_cat = nmspdc::squeezed_cat_amplitudes(
      {beta, nmspdc::reference_squeeze()},
      std::max(nmspdc::default_cat_cutoff(beta, nmspdc::reference_squeeze()),
               signal.cutoff()));
  row.one_minus_f_fixed = 1.0 - nmspdc::fidelity(signal, fixed_cat);
  const nmspdc::CatFitResult fit = nmspdc::fit_squeezed_cat(signal);
  row.one_minus_f_fit = 1.0 - fit.fidelity;
  row.beta_fit = fit.params.beta;
  row.r_fit = fit.params.r;
  row.phase = fit.phase;
  return row;
}

json fit_row_json(const FitRow& row) {
  return json{{"beta", row.beta},
              {"m", row.m},
              {"tau", row.tau},
              {"probability", row.probability},
              {"one_minus_f_fixed", row.one_minus_f_fixed},
              {"one_minus_f_fit", row.one_minus_f_fit},
              {"beta_fit", row.beta_fit},
              {"r_fit", row.r_fit},
              {"phase", row.phase}};
}

const char* kFitHeader =
    "beta,m,tau,probability,one_minus_f_fixed,one_minus_f_fit,beta_fit,r_fit,phase\n";

std::string fit_row_csv(const FitRow& row) {
  return csv_row({fmt17(row.beta), std::to_string(row.m), fmt17(row.tau),
                  fmt17(row.probability), fmt17(row.one_minus_f_fixed),
                  fmt17(row.one_minus_f_fit), fmt17(row.beta_fit), fmt17(row.r_fit),
                  fmt17(row.phase)});
}

void cmd_fit(double beta, const std::string& tau_spec, int m, const EvolutionMode& mode,
             int threads, bool as_json, Sink& sink) {
  const FitRow row = run_fit(beta, tau_spec, m, mode, threads);
  std::ostream& os = sink.stream();
  if (as_json) {
    os << fit_row_json(row).dump(2) << '\n';
  } else {
    os << kFitHeader << fit_row_csv(row);
  }
}

// ---------------------------------------------------------------------------
// sweep: a (beta, m) grid of pipeline cells, executed by a worker pool and
// merged in grid order so output is independent of scheduling.
// ---------------------------------------------------------------------------

struct SweepCellResult {
  std::string csv;
  json obj;
};

void cmd_sweep(double beta_min, double beta_max, double beta_step,
               const std::string& m_spec, int m_max, const std::string& tau_spec,
               const EvolutionMode& mode, int threads, bool as_json, Sink& sink) {
  if (beta_step <= 0.0) throw usage_error("--beta-step must be > 0");

  std::vector<double> betas;
  for (double b = beta_min; b <= beta_max + 1e-12; b += beta_step) betas.push_back(b);

  std::vector<int> ms;
  if (m_spec == "all") {
    if (m_max < 0) throw usage_error("--m-max must be >= 0 with --m all");
    for (int m = 0; m <= m_max; ++m) ms.push_back(m);
  } else {
    int m = 0;
    try {
      std::size_t pos = 0;
      m = std::stoi(m_spec, &pos);
      if (pos != m_spec.size()) throw std::invalid_argument(m_spec);
    } catch (const std::exception&) {
      throw usage_error("--m expects an integer or 'all', got '" + m_spec + "'");
    }
    if (m < 0) throw usage_error("--m must be >= 0");
    ms.push_back(m);
  }

  struct Cell {
    double beta;
    int m;
  };
  std::vector<Cell> cells;
  for (double b : betas)
    for (int m : ms) cells.push_back({b, m});

  std::vector<SweepCellResult> results(cells.size());
  const int pool = nmspdc::resolve_threads(threads);

  nmspdc::parallel_for(static_cast<int>(cells.size()), pool, [&](int idx) {
    const Cell& cell = cells[static_cast<std::size_t>(idx)];
    SweepCellResult& res = results[static_cast<std::size_t>(idx)];
    const std::string beta_s = fmt17(cell.beta);
    const std::string m_s = std::to_string(cell.m);
    try {
      // Cells are independent pipelines; they share only the immutable
      // eigendecomposition cache, so any scheduling order gives identical
      // numbers.
      const FitRow row = run_fit(cell.beta, tau_spec, cell.m, mode, 1);
      res.csv = csv_row({beta_s, m_s, fmt17(row.tau), fmt17(row.probability),
                         fmt17(1.0 - row.one_minus_f_fit), fmt17(row.beta_fit),
                         fmt17(row.r_fit), fmt17(row.phase), ""});
      res.obj = json{{"beta", cell.beta},
                     {"m", cell.m},
                     {"tau", row.tau},
                     {"probability", row.probability},
                     {"fidelity", 1.0 - row.one_minus_f_fit},
                     {"beta_fit", row.beta_fit},
                     {"r_fit", row.r_fit},
                     {"phase", row.phase},
                     {"error", nullptr}};
    } catch (const std::exception& e) {
      const std::string msg = csv_sanitize(e.what());
      res.csv = csv_row({beta_s, m_s, "", "", "", "", "", "", msg});
      res.obj = json{{"beta", cell.beta}, {"m", cell.m}, {"error", msg}};
    }
  });

  std::ostream& os = sink.stream();
  if (as_json) {
    json arr = json::array();
    for (const SweepCellResult& r : results) arr.push_back(r.obj);
    os << arr.dump(2) << '\n';
  } else {
    os << "beta,m,tau,probability,fidelity,beta_fit,r_fit,phase,error\n";
    for (const SweepCellResult& r : results) os << r.csv;
  }
}

// ---------------------------------------------------------------------------
// reproduce: the CSV datasets behind the published figures.
// ---------------------------------------------------------------------------

void reproduce_overlaps(Sink& sink) {
  std::ostream& os = sink.stream();
  os << "n,lambda,weight\n";
  for (int n : {100, 101})
    for (const auto& [lambda, weight] : nmspdc::overlap_spectrum(n))
      os << csv_row({std::to_string(n), fmt17(lambda), fmt17(weight)});
}

void reproduce_eigenstate_terms(Sink& sink) {
  const double tau = nmspdc::tau_opt(10.0);
  std::ostream& os = sink.stream();
  os << "n,j,lambda,re,im\n";
  for (int n : {100, 101}) {
    const auto dec =
        nmspdc::decomposition_cache().get(2 * n, EvolutionMode::full());
    for (int j = 0; j < dec->count(); ++j) {
      const double lambda = dec->eigenvalues[static_cast<std::size_t>(j)];
      const double* v = dec->vec(j);
      const cplx term = v[0] * v[n] * std::polar(1.0, -lambda * tau);
      os << csv_row({std::to_string(n), std::to_string(j), fmt17(lambda),
                     fmt17(term.real()), fmt17(term.imag())});
    }
  }
}

void reproduce_amplitude_envelope(double beta, const EvolutionMode& mode, Sink& sink) {
  const double tau = nmspdc::tau_opt(beta);
  const int n_lo = std::max(0, static_cast<int>(std::floor(beta * beta - 12.0 * beta)));
  const int n_hi = static_cast<int>(std::ceil(beta * beta + 12.0 * beta));
  const std::vector<cplx> amps = nmspdc::transition_amplitudes(n_lo, n_hi, 0, tau, mode);
  const nmspdc::FockVector coh = nmspdc::coherent_amplitudes(beta);
  std::ostream& os = sink.stream();
  os << "n,re,im,abs,coherent\n";
  for (int n = n_lo; n <= n_hi; ++n) {
    const cplx a = amps[static_cast<std::size_t>(n - n_lo)];
    const double c = n <= coh.cutoff() ? coh.amp[static_cast<std::size_t>(n)].real() : 0.0;
    os << csv_row({std::to_string(n), fmt17(a.real()), fmt17(a.imag()),
                   fmt17(std::abs(a)), fmt17(c)});
  }
}

void reproduce_fidelity_law(Sink& sink) {
  std::vector<double> betas;
  for (double b = 4.0; b <= 20.0 + 1e-12; b += 2.0) betas.push_back(b);
  const auto rows = nmspdc::fidelity_law(betas);
  std::ostream& os = sink.stream();
  os << "beta,tau,probability,one_minus_f_fixed,one_minus_f_fit,beta_fit,r_fit,phase\n";
  for (const auto& r : rows)
    os << csv_row({fmt17(r.beta), fmt17(r.tau), fmt17(r.probability),
                   fmt17(r.one_minus_f_fixed), fmt17(r.one_minus_f_fit),
                   fmt17(r.beta_fit), fmt17(r.r_fit), fmt17(r.phase)});
}

void reproduce_outcome_probabilities(Sink& sink) {
  const double beta = 8.0;
  const nmspdc::NMState state =
      nmspdc::evolve(nmspdc::initial_state(beta), nmspdc::tau_opt(beta));
  const nmspdc::ParityStats ps = nmspdc::parity_statistics(state);
  std::ostream& os = sink.stream();
  os << "m,probability\n";
  for (std::size_t i = 0; i < ps.per_m.size(); ++i)
    os << csv_row({std::to_string(i), fmt17(ps.per_m[i])});
}

void reproduce_outcome_fits(Sink& sink) {
  const auto rows = nmspdc::per_m_characterization(8.0, 10);
  std::ostream& os = sink.stream();
  os << "m,probability,fitted,fidelity,beta_fit,r_fit,phase\n";
  for (const auto& r : rows) {
    std::vector<std::string> row = {std::to_string(r.m), fmt17(r.probability),
                                    r.fitted ? "1" : "0", "", "", "", ""};
    if (r.fitted) {
      row[3] = fmt17(r.fidelity);
      row[4] = fmt17(r.beta_fit);
      row[5] = fmt17(r.r_fit);
      row[6] = fmt17(r.phase);
    }
    os << csv_row(row);
  }
}

void cmd_reproduce(const std::string& figure, Sink& sink) {
  if (figure == "fig1") return reproduce_overlaps(sink);
  if (figure == "fig2") return reproduce_eigenstate_terms(sink);
  // The wide-window envelope at beta = 30 uses the central spectral window
  // (half-width 20), which resolves the retained amplitudes far below the
  // plotted scale at a fraction of the full-decomposition cost.
  if (figure == "fig3")
    return reproduce_amplitude_envelope(30.0, EvolutionMode::central(20), sink);
  if (figure == "fig4")
    return reproduce_amplitude_envelope(10.0, EvolutionMode::full(), sink);
  if (figure == "fig5") return reproduce_fidelity_law(sink);
  if (figure == "fig6") return reproduce_outcome_probabilities(sink);
  if (figure == "fig7" || figure == "fig8" || figure == "fig9")
    return reproduce_outcome_fits(sink);  // one dataset backs all three panels
  throw usage_error("--figure expects fig1..fig9, got '" + figure + "'");
}

// ---------------------------------------------------------------------------
// oracle (hidden): dense two-mode cross-check of the block pipeline.
// ---------------------------------------------------------------------------

void cmd_oracle(double beta, const std::string& tau_spec, int dim_a, int dim_b, int m_max,
                Sink& sink) {
  if (dim_a < 1 || dim_b < 1) throw usage_error("--dim-a and --dim-b must be >= 1");
  const double tau = parse_tau(tau_spec, beta);

  const nmspdc::NMState initial = nmspdc::initial_state(beta);
  const nmspdc::DenseTwoModeState dense0 = nmspdc::nm_to_dense(initial, dim_a, dim_b);
  const nmspdc::DenseTwoModeState denseT = nmspdc::dense_evolve(dense0, tau);
  const nmspdc::NMState nmT = nmspdc::evolve(initial, tau);

  const std::vector<double> marginal = nmspdc::dense_pump_marginal(denseT);
  const nmspdc::ParityStats ps = nmspdc::parity_statistics(nmT);

  double max_marginal_dev = 0.0;
  for (std::size_t m = 0; m < marginal.size(); ++m) {
    const double p_nm = m < ps.per_m.size() ? ps.per_m[m] : 0.0;
    max_marginal_dev = std::max(max_marginal_dev, std::fabs(marginal[m] - p_nm));
  }

  json outcomes = json::array();
  for (int m = 0; m <= std::min(m_max, dim_b - 1); ++m) {
    const auto [p_dense, dense_sig] = nmspdc::dense_project_pump(denseT, m);
    const nmspdc::MeasurementOutcome out = nmspdc::project_pump(nmT, m);
    json o{{"m", m}, {"probability_dense", p_dense}, {"probability_nm", out.probability}};
    if (p_dense > 0.0 && out.signal_defined)
      o["signal_fidelity"] = nmspdc::fidelity(dense_sig, out.signal);
    else
      o["signal_fidelity"] = nullptr;
    outcomes.push_back(std::move(o));
  }

  json j{{"beta", beta},
         {"tau", tau},
         {"dim_a", dim_a},
         {"dim_b", dim_b},
         {"incomplete_block_mass", nmspdc::incomplete_block_mass(denseT)},
         {"max_marginal_deviation", max_marginal_dev},
         {"outcomes", std::move(outcomes)}};
  sink.stream() << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode parametric interaction simulator and cat-state analysis"};
  app.require_subcommand(1);

  // Common option storage.
  std::string output;
  double beta = 0.0;
  std::string tau_spec = "opt";
  std::string mode_name = "full";
  int n_cut = 9;
  int threads = 0;  // 0 = auto (NMSPDC_THREADS overrides either way)
  bool as_json = false;

  int eig_N = 0;
  int eig_central = -1;
  CLI::App* eigvals = app.add_subcommand("eigvals", "Eigenvalues of one energy block");
  eigvals->add_option("--N", eig_N, "Even total excitation number")->required();
  eigvals->add_option("--central", eig_central,
                      "Restrict to the central window with this half-width");
  eigvals->add_option("--output", output, "Write CSV to this file instead of stdout");

  int ov_n = 0;
  int ov_central = -1;
  CLI::App* overlap = app.add_subcommand(
      "overlap", "Spectral weights of the initial pump Fock state");
  overlap->add_option("--n", ov_n, "Initial pump photon number")->required();
  overlap->add_option("--central", ov_central,
                      "Restrict to the central window with this half-width");
  overlap->add_option("--output", output, "Write CSV to this file instead of stdout");

  CLI::App* evolve = app.add_subcommand("evolve", "Evolve the coherent-pump state");
  evolve->add_option("--beta", beta, "Pump coherent amplitude")->required();
  evolve->add_option("--tau", tau_spec, "Interaction time, or 'opt'");
  evolve->add_option("--mode", mode_name, "Spectral mode: full or central");
  evolve->add_option("--n-cut", n_cut, "Central-window half-width");
  evolve->add_option("--threads", threads, "Worker threads (0 = auto)");
  evolve->add_option("--output", output, "Write CSV to this file instead of stdout");

  int meas_m = 0;
  bool meas_parity = false;
  CLI::App* measure = app.add_subcommand("measure", "Project the pump photon number");
  measure->add_option("--beta", beta, "Pump coherent amplitude")->required();
  measure->add_option("--tau", tau_spec, "Interaction time, or 'opt'");
  measure->add_option("--m", meas_m, "Pump outcome to project onto");
  measure->add_flag("--parity", meas_parity, "Emit the full per-outcome CSV instead");
  measure->add_option("--mode", mode_name, "Spectral mode: full or central");
  measure->add_option("--n-cut", n_cut, "Central-window half-width");
  measure->add_option("--threads", threads, "Worker threads (0 = auto)");
  measure->add_option("--output", output, "Write output to this file instead of stdout");

  int fit_m = 0;
  CLI::App* fit = app.add_subcommand("fit", "Characterize one post-selected state");
  fit->add_option("--beta", beta, "Pump coherent amplitude")->required();
  fit->add_option("--tau", tau_spec, "Interaction time, or 'opt'");
  fit->add_option("--m", fit_m, "Pump outcome to post-select");
  fit->add_option("--mode", mode_name, "Spectral mode: full or central");
  fit->add_option("--n-cut", n_cut, "Central-window half-width");
  fit->add_option("--threads", threads, "Worker threads (0 = auto)");
  fit->add_flag("--json", as_json, "Emit JSON instead of CSV");
  fit->add_option("--output", output, "Write output to this file instead of stdout");

  double sw_beta_min = 0.0, sw_beta_max = -1.0, sw_beta_step = 1.0;
  std::string sw_m = "0";
  int sw_m_max = 10;
  CLI::App* sweep = app.add_subcommand("sweep", "Pipeline over a (beta, m) grid");
  sweep->add_option("--beta-min", sw_beta_min, "Grid start")->required();
  sweep->add_option("--beta-max", sw_beta_max, "Grid end (inclusive)")->required();
  sweep->add_option("--beta-step", sw_beta_step, "Grid step (> 0)");
  sweep->add_option("--m", sw_m, "Pump outcome, or 'all'");
  sweep->add_option("--m-max", sw_m_max, "Largest outcome with --m all");
  sweep->add_option("--tau", tau_spec, "Interaction time, or 'opt'");
  sweep->add_option("--mode", mode_name, "Spectral mode: full or central");
  sweep->add_option("--n-cut", n_cut, "Central-window half-width");
  sweep->add_option("--threads", threads, "Worker threads (0 = auto)");
  sweep->add_flag("--json", as_json, "Emit JSON instead of CSV");
  sweep->add_option("--output", output, "Write output to this file instead of stdout");

  std::string figure;
  CLI::App* reproduce = app.add_subcommand("reproduce", "Emit a figure dataset");
  reproduce->add_option("--figure", figure, "One of fig1..fig9")->required();
  reproduce->add_option("--output", output, "Write CSV to this file instead of stdout");

  int or_dim_a = 0, or_dim_b = 0, or_m_max = 2;
  CLI::App* oracle =
      app.add_subcommand("oracle", "Dense two-mode cross-check (debugging)");
  oracle->group("");  // hidden from help
  oracle->add_option("--beta", beta, "Pump coherent amplitude")->required();
  oracle->add_option("--tau", tau_spec, "Interaction time, or 'opt'");
  oracle->add_option("--dim-a", or_dim_a, "Signal-mode dimension")->required();
  oracle->add_option("--dim-b", or_dim_b, "Pump-mode dimension")->required();
  oracle->add_option("--m-max", or_m_max, "Largest outcome to compare");
  oracle->add_option("--output", output, "Write JSON to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    Sink sink;
    sink.open(output);
    const EvolutionMode mode = parse_mode(mode_name, n_cut);
    if (app.got_subcommand(eigvals)) {
      cmd_eigvals(eig_N, eig_central, sink);
    } else if (app.got_subcommand(overlap)) {
      cmd_overlap(ov_n, ov_central, sink);
    } else if (app.got_subcommand(evolve)) {
      cmd_evolve(beta, tau_spec, mode, threads, sink);
    } else if (app.got_subcommand(measure)) {
      cmd_measure(beta, tau_spec, meas_m, meas_parity, mode, threads, sink);
    } else if (app.got_subcommand(fit)) {
      cmd_fit(beta, tau_spec, fit_m, mode, threads, as_json, sink);
    } else if (app.got_subcommand(sweep)) {
      cmd_sweep(sw_beta_min, sw_beta_max, sw_beta_step, sw_m, sw_m_max, tau_spec, mode,
                threads, as_json, sink);
    } else if (app.got_subcommand(reproduce)) {
      cmd_reproduce(figure, sink);
    } else if (app.got_subcommand(oracle)) {
      cmd_oracle(beta, tau_spec, or_dim_a, or_dim_b, or_m_max, sink);
    }
    sink.stream().flush();
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nmspdc::truncation_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
