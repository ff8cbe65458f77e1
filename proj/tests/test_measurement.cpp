#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "nmspdc/measurement.hpp"

using namespace nmspdc;

TEST_CASE("projection before evolution reproduces the pump distribution") {
  const NMState st = initial_state(2.0);
  for (int m = 0; m <= 6; ++m) {
    const MeasurementOutcome out = project_pump(st, m);
    const double pois =
        std::exp(-4.0 + m * std::log(4.0) - std::lgamma(m + 1.0));
    INFO("m=" << m);
    REQUIRE(out.probability == Catch::Approx(pois).epsilon(1e-12));
    REQUIRE(out.signal_defined);
    REQUIRE(std::norm(out.signal.amp[0]) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(norm_sq(out.signal) == Catch::Approx(1.0).margin(1e-14));
  }
  CHECK_THROWS_AS(project_pump(st, -1), std::domain_error);
}

TEST_CASE("single-block projection outcomes") {
  NMState st;
  st.blocks[4] = {cplx(0, 0), cplx(0, 0), cplx(1.0, 0.0)};  // |0>_s |2>_p
  const MeasurementOutcome hit = project_pump(st, 2);
  CHECK(hit.probability == Catch::Approx(1.0));
  REQUIRE(hit.signal_defined);
  CHECK(std::norm(hit.signal.amp[0]) == Catch::Approx(1.0));

  const MeasurementOutcome zero_amp = project_pump(st, 1);
  CHECK(zero_amp.probability == 0.0);
  CHECK_FALSE(zero_amp.signal_defined);

  const MeasurementOutcome beyond = project_pump(st, 3);
  CHECK(beyond.probability == 0.0);
  CHECK_FALSE(beyond.signal_defined);
}

TEST_CASE("spectral transition coefficients") {
  // Block N = 4 (n = 2): lambda_1 = 0 with chi = (1, 0, -sqrt(3))/2.
  const cplx c = m_coeff(2, 1, 0, 0.0);
  CHECK(c.real() == Catch::Approx(-std::sqrt(3.0) / 4.0).margin(1e-12));
  CHECK(c.imag() == Catch::Approx(0.0).margin(1e-13));
  // tau-independent on the kernel
  const cplx c5 = m_coeff(2, 1, 0, 5.0);
  CHECK(c5.real() == Catch::Approx(-std::sqrt(3.0) / 4.0).margin(1e-12));
  CHECK(c5.imag() == Catch::Approx(0.0).margin(1e-12));

  // lambda_0 = -4 with chi = (sqrt(3), -2, 1)/(2 sqrt(2)):
  // coefficient (sqrt(3)/8) e^{+4 i tau}.
  const double tau = 0.41;
  const cplx c0 = m_coeff(2, 0, 0, tau);
  CHECK(c0.real() == Catch::Approx(std::sqrt(3.0) / 8.0 * std::cos(4.0 * tau)).margin(1e-12));
  CHECK(c0.imag() == Catch::Approx(std::sqrt(3.0) / 8.0 * std::sin(4.0 * tau)).margin(1e-12));

  // Completeness at tau = 0: sum_j chi_j[m] chi_j[n] = delta_{m n}.
  for (int m = 0; m <= 3; ++m) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j <= 3; ++j) acc += m_coeff(3, j, m, 0.0);
    INFO("m=" << m);
    REQUIRE(acc.real() == Catch::Approx(m == 3 ? 1.0 : 0.0).margin(1e-12));
    REQUIRE(acc.imag() == Catch::Approx(0.0).margin(1e-13));
  }

  CHECK_THROWS_AS(m_coeff(2, 3, 0, 0.0), std::domain_error);
  CHECK_THROWS_AS(m_coeff(2, 0, 3, 0.0), std::domain_error);
  CHECK_THROWS_AS(m_coeff(-1, 0, 0, 0.0), std::domain_error);
}

TEST_CASE("batched transition amplitudes match the spectral sum") {
  const double tau = 0.7;
  const auto batch = transition_amplitudes(2, 5, 0, tau);
  REQUIRE(batch.size() == 4);
  for (int n = 2; n <= 5; ++n) {
    cplx direct(0.0, 0.0);
    for (int j = 0; j <= n; ++j) direct += m_coeff(n, j, 0, tau);
    INFO("n=" << n);
    REQUIRE(batch[static_cast<std::size_t>(n - 2)].real() ==
            Catch::Approx(direct.real()).margin(1e-13));
    REQUIRE(batch[static_cast<std::size_t>(n - 2)].imag() ==
            Catch::Approx(direct.imag()).margin(1e-13));
  }
  CHECK_THROWS_AS(transition_amplitudes(1, 5, 2, 0.0), std::domain_error);
  CHECK_THROWS_AS(transition_amplitudes(5, 4, 0, 0.0), std::domain_error);
}

TEST_CASE("outcome probabilities close the Born rule") {
  const NMState evolved = evolve(initial_state(2.5), 0.7);
  const ParityStats ps = parity_statistics(evolved);
  double total = 0.0;
  for (double p : ps.per_m) total += p;
  CHECK(total == Catch::Approx(evolved.norm_sq()).margin(1e-12));
  CHECK(ps.p_even + ps.p_odd == Catch::Approx(total).margin(1e-13));

  double direct = 0.0;
  for (int m = 0; m < static_cast<int>(ps.per_m.size()); ++m)
    direct += project_pump(evolved, m).probability;
  CHECK(direct == Catch::Approx(total).margin(1e-12));
}

TEST_CASE("collapsed signal assembles from transition amplitudes") {
  const double beta = 3.0, tau = 0.35;
  const NMState evolved = evolve(initial_state(beta), tau);
  const MeasurementOutcome out = project_pump(evolved, 0);
  REQUIRE(out.signal_defined);

  const int n_top = out.signal.cutoff() / 2;
  const auto amps = transition_amplitudes(0, n_top, 0, tau);
  const double sqrt_p = std::sqrt(out.probability);
  for (int n = 0; n <= n_top; ++n) {
    const double coh =
        std::exp(-0.5 * beta * beta + n * std::log(beta) - 0.5 * std::lgamma(n + 1.0));
    const cplx expect = coh * amps[static_cast<std::size_t>(n)] / sqrt_p;
    const cplx got = out.signal.amp[static_cast<std::size_t>(2 * n)];
    INFO("n=" << n);
    REQUIRE(got.real() == Catch::Approx(expect.real()).margin(1e-11));
    REQUIRE(got.imag() == Catch::Approx(expect.imag()).margin(1e-11));
  }
  // odd signal levels are empty
  for (int n = 1; n <= out.signal.cutoff(); n += 2)
    REQUIRE(std::norm(out.signal.amp[static_cast<std::size_t>(n)]) == 0.0);
}

TEST_CASE("pump statistics at the working point") {
  const double beta = 8.0;
  const NMState evolved = evolve(initial_state(beta), tau_opt(beta));
  const ParityStats ps = parity_statistics(evolved);
  CHECK(ps.per_m[0] == Catch::Approx(0.14679443097144473).epsilon(1e-10));
  CHECK(ps.per_m[1] == Catch::Approx(8.58894087078207e-05).epsilon(1e-8));
  CHECK(ps.per_m[2] == Catch::Approx(0.07333083537646312).epsilon(1e-10));
  CHECK(ps.p_even == Catch::Approx(0.8719563266462826).epsilon(1e-10));

  // Collapsed m = 0 state is real after the -pi/4 per-photon rotation.
  const MeasurementOutcome out = project_pump(evolved, 0);
  const FockVector rot = phase_rotate(out.signal, -std::acos(-1.0) / 4.0);
  double imag_mass = 0.0;
  for (const cplx& a : rot.amp) imag_mass += a.imag() * a.imag();
  CHECK(imag_mass / norm_sq(rot) < 1e-12);
}

TEST_CASE("central window reproduces the collapsed state at moderate depletion") {
  const double beta = 6.0;
  const double tau = tau_opt(beta);
  const MeasurementOutcome full =
      project_pump(evolve(initial_state(beta), tau, EvolutionMode::full()), 0);
  const MeasurementOutcome cen =
      project_pump(evolve(initial_state(beta), tau, EvolutionMode::central(9)), 0);
  REQUIRE(full.signal_defined);
  REQUIRE(cen.signal_defined);
  CHECK(fidelity(full.signal, cen.signal) > 0.999);
  CHECK(cen.probability == Catch::Approx(full.probability).epsilon(1e-3));
}
