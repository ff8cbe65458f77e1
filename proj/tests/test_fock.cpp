#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "nmspdc/fock.hpp"

using namespace nmspdc;

namespace {

// Independent route to S(r)|beta>: dense matrix exponential of
// K = (r/2)(a^2 - a^dag^2) through the Hermitian eigendecomposition of iK.
std::vector<double> squeezed_by_expm(double beta, double r, int cutoff) {
  const int d = cutoff + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d, d);
  for (int n = 0; n + 2 < d + 2 && n + 2 <= cutoff; ++n) {
    const double el = 0.5 * r * std::sqrt((n + 1.0) * (n + 2.0));
    K(n, n + 2) = el;    // a^2 part
    K(n + 2, n) = -el;   // -a^dag^2 part
  }
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = cplx(0.0, 1.0) * K(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  Eigen::VectorXcd phase(d);
  for (int j = 0; j < d; ++j) phase(j) = std::polar(1.0, -es.eigenvalues()(j));
  // exp(K) = exp(-i M)
  Eigen::MatrixXcd S =
      es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();

  const FockVector coh = coherent_amplitudes(beta);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d);
  for (int n = 0; n < d && n <= coh.cutoff(); ++n) b(n) = coh.amp[static_cast<std::size_t>(n)];
  const Eigen::VectorXcd out = S * b;
  std::vector<double> res(static_cast<std::size_t>(d));
  for (int n = 0; n < d; ++n) res[static_cast<std::size_t>(n)] = out(n).real();
  return res;
}

}  // namespace

TEST_CASE("coherent amplitudes") {
  const FockVector vac = coherent_amplitudes(0.0);
  REQUIRE(vac.amp.size() == 1);
  CHECK(vac.amp[0] == cplx(1.0, 0.0));

  const FockVector v = coherent_amplitudes(2.0);
  REQUIRE(v.cutoff() >= 20);
  // |<4|beta=2>|^2 is the Poisson(4; mean 4) weight
  CHECK(std::norm(v.amp[4]) ==
        Catch::Approx(std::exp(-4.0) * 256.0 / 24.0).epsilon(1e-12));
  CHECK(norm_sq(v) == Catch::Approx(1.0).margin(1e-12));
  CHECK(mean_photon(v) == Catch::Approx(4.0).margin(1e-9));

  const FockVector w = coherent_amplitudes(3.0);
  CHECK(mean_photon(w) == Catch::Approx(9.0).margin(1e-9));
  CHECK(photon_variance(w) == Catch::Approx(9.0).margin(1e-8));

  CHECK_THROWS_AS(coherent_amplitudes(-1.0), std::domain_error);
  CHECK_THROWS_AS(coherent_amplitudes(65.0), std::domain_error);
  CHECK_THROWS_AS(coherent_amplitudes(2.0, 0.0), std::domain_error);
}

TEST_CASE("squeezed coherent recurrence matches a dense matrix exponential") {
  for (double r : {-0.4, 0.3}) {
    const auto rec = squeezed_coherent_amplitudes(2.0, r, 120);
    const auto ref = squeezed_by_expm(2.0, r, 120);
    INFO("r=" << r);
    for (int n = 0; n <= 80; ++n)
      REQUIRE(rec[static_cast<std::size_t>(n)] ==
              Catch::Approx(ref[static_cast<std::size_t>(n)]).margin(1e-12));
  }
}

TEST_CASE("squeezed coherent guards") {
  CHECK_THROWS_AS(squeezed_coherent_amplitudes(2.0, 0.0, -1), std::domain_error);
  // Amplitude dynamic range beyond double precision
  CHECK_THROWS_AS(squeezed_coherent_amplitudes(40.0, -1.5, 10), std::domain_error);
}

TEST_CASE("even cat state") {
  const FockVector trivial = squeezed_cat_amplitudes({0.0, 0.0});
  CHECK(std::norm(trivial.amp[0]) == Catch::Approx(1.0).margin(1e-14));

  const double rr = -0.5 * std::log(2.0);  // reference squeeze -ln sqrt(2)
  const FockVector cat = squeezed_cat_amplitudes({10.0, rr});
  CHECK(norm_sq(cat) == Catch::Approx(1.0).margin(1e-13));
  CHECK(odd_fraction(cat) == 0.0);
  // mean = beta^2 e^{-2r} + sinh^2 r = 200.125
  CHECK(mean_photon(cat) == Catch::Approx(200.125).epsilon(1e-12));
  // exact variance of the even cat at large beta separation:
  // beta^2 e^{-4r} + sinh^2(2r)/2 = 400.28125
  CHECK(photon_variance(cat) == Catch::Approx(400.28125).epsilon(1e-10));
  // within 1% of the leading-order law beta^2 e^{-4r}
  CHECK(std::fabs(photon_variance(cat) - 400.0) / 400.0 < 0.01);

  CHECK_THROWS_AS(squeezed_cat_amplitudes({10.0, rr}, 100), truncation_error);
  try {
    squeezed_cat_amplitudes({10.0, rr}, 100);
  } catch (const truncation_error& e) {
    CHECK(e.deficit() > 0.5);
  }
}

TEST_CASE("phase rotation") {
  FockVector v;
  v.amp = {cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)};
  const FockVector w = phase_rotate(v, -std::acos(-1.0) / 4.0);
  // level 2 picks up e^{+i pi/2} = +i
  CHECK(w.amp[2].real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(w.amp[2].imag() == Catch::Approx(1.0).margin(1e-15));

  const FockVector big = coherent_amplitudes(9.0);
  const FockVector rot = phase_rotate(big, 0.7);
  CHECK(norm_sq(rot) == Catch::Approx(norm_sq(big)).epsilon(1e-14));
  const FockVector id = phase_rotate(big, 0.0);
  for (std::size_t n = 0; n < big.amp.size(); ++n) REQUIRE(id.amp[n] == big.amp[n]);
}

TEST_CASE("fidelity") {
  const FockVector a = coherent_amplitudes(1.0);
  const FockVector b = coherent_amplitudes(2.0);
  CHECK(fidelity(a, a) == Catch::Approx(1.0).margin(1e-14));
  // |<alpha|beta>|^2 = e^{-(alpha-beta)^2} for real amplitudes
  CHECK(fidelity(a, b) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));

  FockVector f0, f1;
  f0.amp = {cplx(1.0, 0.0)};
  f1.amp = {cplx(0.0, 0.0), cplx(1.0, 0.0)};
  CHECK(fidelity(f0, f1) == 0.0);
  // zero-padding across different cutoffs
  CHECK(fidelity(f0, a) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));

  FockVector z;
  z.amp = {cplx(0.0, 0.0)};
  CHECK_THROWS_AS(fidelity(z, a), std::domain_error);
  CHECK_THROWS_AS(mean_photon(z), std::domain_error);
  CHECK_THROWS_AS(photon_variance(z), std::domain_error);
  CHECK_THROWS_AS(odd_fraction(z), std::domain_error);
}

TEST_CASE("first-moment matrix element closed form") {
  // Frozen values from a brute-force Fock-basis evaluation.
  CHECK(v_moment(1.0, 0.3, -0.25) == Catch::Approx(0.5370117941584232).epsilon(1e-10));
  CHECK(v_moment(2.0, 1.5, 0.4) == Catch::Approx(1.2405180573879617).epsilon(1e-10));
  // alpha = beta reduces to the mean photon number of S(r)|beta>
  CHECK(v_moment(10.0, 10.0, -0.5 * std::log(2.0)) ==
        Catch::Approx(200.125).epsilon(1e-13));
  CHECK(v_moment(3.0, 3.0, 0.0) == Catch::Approx(9.0).epsilon(1e-13));
  // symmetric in alpha <-> beta
  CHECK(v_moment(1.2, 0.4, -0.3) == Catch::Approx(v_moment(0.4, 1.2, -0.3)).epsilon(1e-14));

  // In-test numeric determination at fresh parameters.
  const double al = 1.5, be = 0.8, r = -0.3;
  const auto ca = squeezed_coherent_amplitudes(al, r, 300);
  const auto cb = squeezed_coherent_amplitudes(be, r, 300);
  double brute = 0.0;
  for (int n = 0; n <= 300; ++n)
    brute += cb[static_cast<std::size_t>(n)] * n * ca[static_cast<std::size_t>(n)];
  CHECK(v_moment(al, be, r) == Catch::Approx(brute).epsilon(1e-10));
}
