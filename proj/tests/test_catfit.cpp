#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nmspdc/catfit.hpp"

using namespace nmspdc;

TEST_CASE("simplex minimizer converges on a quadratic") {
  const auto res = detail::nelder_mead(
      [](const std::vector<double>& x) {
        return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] + 1.0) * (x[1] + 1.0);
      },
      {0.0, 0.0}, {0.5, 0.5}, 500, 1e-15, 1e-10);
  CHECK(res.x[0] == Catch::Approx(2.0).margin(1e-7));
  CHECK(res.x[1] == Catch::Approx(-1.0).margin(1e-7));
  CHECK(res.f < 1e-13);
}

TEST_CASE("reference squeeze constant") {
  CHECK(reference_squeeze() == Catch::Approx(-0.34657359027997264).epsilon(1e-15));
}

TEST_CASE("fit recovers exact cat parameters") {
  const FockVector cat = squeezed_cat_amplitudes({5.0, -0.3});
  const CatFitResult fit = fit_squeezed_cat(cat);
  CHECK(fit.params.beta == Catch::Approx(5.0).margin(1e-4));
  CHECK(fit.params.r == Catch::Approx(-0.3).margin(1e-4));
  CHECK(fit.phase == Catch::Approx(0.0).margin(1e-4));
  CHECK(fit.fidelity >= 1.0 - 1e-9);
  CHECK(fit.iterations > 0);
}

TEST_CASE("fit tracks an extra per-photon phase") {
  const FockVector cat = squeezed_cat_amplitudes({4.0, -0.2});
  const FockVector rotated = phase_rotate(cat, 0.3);
  const CatFitResult fit = fit_squeezed_cat(rotated);
  CHECK(fit.params.beta == Catch::Approx(4.0).margin(1e-4));
  CHECK(fit.params.r == Catch::Approx(-0.2).margin(1e-4));
  CHECK(fit.phase == Catch::Approx(0.3).margin(1e-4));
  CHECK(fit.fidelity >= 1.0 - 1e-9);
}

TEST_CASE("fit preconditions") {
  CHECK_THROWS_AS(fit_squeezed_cat(coherent_amplitudes(2.0)), std::domain_error);
  FockVector z;
  z.amp = {cplx(0.0, 0.0)};
  CHECK_THROWS_AS(fit_squeezed_cat(z), std::domain_error);
}

TEST_CASE("reported fidelity reproduces from the reported parameters") {
  const FockVector cat = squeezed_cat_amplitudes({3.0, -0.25});
  const FockVector signal = phase_rotate(cat, -0.1);
  const CatFitResult fit = fit_squeezed_cat(signal);
  const FockVector model = phase_rotate(
      squeezed_cat_amplitudes({fit.params.beta, fit.params.r},
                              std::max(default_cat_cutoff(fit.params.beta, fit.params.r),
                                       signal.cutoff())),
      fit.phase);
  CHECK(fidelity(signal, model) == Catch::Approx(fit.fidelity).margin(1e-12));
}

TEST_CASE("fit is a local maximum") {
  const FockVector signal = squeezed_cat_amplitudes({4.5, -0.35});
  const CatFitResult fit = fit_squeezed_cat(signal);
  const double base = fit.fidelity;
  for (int db = -1; db <= 1; ++db) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dp = -1; dp <= 1; ++dp) {
        if (db == 0 && dr == 0 && dp == 0) continue;
        const double b = fit.params.beta + 1e-5 * db;
        const double r = fit.params.r + 1e-5 * dr;
        const double phi = fit.phase + 1e-5 * dp;
        const FockVector model = phase_rotate(
            squeezed_cat_amplitudes(
                {b, r}, std::max(default_cat_cutoff(b, r), signal.cutoff())),
            phi);
        REQUIRE(fidelity(signal, model) <= base + 1e-9);
      }
    }
  }
}

TEST_CASE("post-selected state characterization at moderate pump") {
  const FidelityLawRow row = characterize_m0(6.0);
  CHECK(row.tau == Catch::Approx(0.29763359117616656).epsilon(1e-14));
  CHECK(row.probability == Catch::Approx(0.19290204971845737).epsilon(1e-9));
  CHECK(row.one_minus_f_fixed == Catch::Approx(0.0027923790626933).epsilon(1e-5));
  CHECK(row.one_minus_f_fit == Catch::Approx(3.70196698104e-05).epsilon(1e-2));
  CHECK(row.beta_fit == Catch::Approx(6.170961380155838).margin(1e-3));
  CHECK(row.r_fit == Catch::Approx(-0.3109432247169778).margin(1e-3));
  CHECK(row.phase == Catch::Approx(0.0).margin(1e-4));
}

TEST_CASE("fidelity-law rows improve with pump amplitude") {
  const auto rows = fidelity_law({4.0, 6.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].beta == 4.0);
  CHECK(rows[1].beta == 6.0);
  for (const auto& r : rows) {
    CHECK(r.one_minus_f_fit < r.one_minus_f_fixed);
    CHECK(r.one_minus_f_fit > 0.0);
    CHECK(r.probability > 0.0);
  }
  CHECK(rows[1].one_minus_f_fixed < rows[0].one_minus_f_fixed);
  CHECK(rows[1].one_minus_f_fit < rows[0].one_minus_f_fit);
  CHECK(rows[1].probability < rows[0].probability);
}

TEST_CASE("per-outcome characterization") {
  const auto rows = per_m_characterization(4.0, 3);
  REQUIRE(rows.size() == 4);
  const FidelityLawRow m0 = characterize_m0(4.0);
  CHECK(rows[0].m == 0);
  REQUIRE(rows[0].fitted);
  CHECK(rows[0].probability == Catch::Approx(m0.probability).epsilon(1e-12));
  CHECK(rows[0].beta_fit == Catch::Approx(m0.beta_fit).margin(1e-6));
  CHECK(rows[0].r_fit == Catch::Approx(m0.r_fit).margin(1e-6));
  CHECK(1.0 - rows[0].fidelity == Catch::Approx(m0.one_minus_f_fit).margin(1e-9));

  const NMState evolved = evolve(initial_state(4.0), tau_opt(4.0));
  const ParityStats ps = parity_statistics(evolved);
  for (const auto& row : rows) {
    REQUIRE(row.probability ==
            Catch::Approx(ps.per_m[static_cast<std::size_t>(row.m)]).margin(1e-12));
    if (row.fitted) {
      REQUIRE(row.beta_fit > 0.0);
      REQUIRE(row.fidelity > 0.0);
      REQUIRE(row.fidelity <= 1.0 + 1e-12);
      // Only the even outcomes collapse onto near-ideal cats; the rare odd
      // outcomes (probability < 1% here) are genuinely broader states.
      if (row.m % 2 == 0) REQUIRE(row.fidelity > 0.99);
    }
  }

  // Outcomes beyond the pump support are flagged, not fitted.
  const auto sparse = per_m_characterization(1.0, 30);
  bool saw_skip = false;
  for (const auto& row : sparse)
    if (!row.fitted) {
      saw_skip = true;
      CHECK(row.probability < 1e-10);
    }
  CHECK(saw_skip);

  CHECK_THROWS_AS(per_m_characterization(4.0, -1), std::domain_error);
}
