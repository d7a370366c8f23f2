#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qex/fixtures.hpp"
#include "qex/oracle.hpp"
#include "test_support.hpp"

using namespace qex;

TEST_CASE("eigen_oracle on a diagonal matrix") {
  CMatrix m(2, 2);
  m << 3, 0, 0, 1;
  const OracleSpectrum spectrum = eigen_oracle(m);
  CHECK(spectrum.eigenvalues(0) == Catch::Approx(3.0).margin(1e-14));
  CHECK(spectrum.eigenvalues(1) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("eigen_oracle on the qutrit exchange fixture") {
  // b = c = 1 gives eigenvalues 1 and (1 +- sqrt(5))/2.
  const CMatrix h = fixtures::qutrit_bec(1.0, 1.0);
  const OracleSpectrum spectrum = eigen_oracle(h);
  const double s5 = std::sqrt(5.0);
  CHECK(spectrum.eigenvalues(0) == Catch::Approx((1 + s5) / 2).margin(1e-12));
  CHECK(spectrum.eigenvalues(1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(spectrum.eigenvalues(2) == Catch::Approx((1 - s5) / 2).margin(1e-12));
}

TEST_CASE("eigen_oracle satisfies the eigenpair residual bound") {
  std::mt19937 rng(3);
  for (int d = 2; d <= 6; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix m = testing::random_hermitian(d, rng);
      const OracleSpectrum spectrum = eigen_oracle(m);
      const double scale = std::max(1.0, inf_norm(m));
      CHECK(spectrum.residual < 1e-10 * scale);
      const CMatrix v = spectrum.eigenvectors;
      CHECK(inf_norm(CMatrix(v.adjoint() * v - CMatrix::Identity(d, d))) < 1e-10);
      // Eigenvalues sorted descending.
      for (int i = 0; i + 1 < d; ++i)
        CHECK(spectrum.eigenvalues(i) >= spectrum.eigenvalues(i + 1) - 1e-14);
    }
  }
}

TEST_CASE("eigen_oracle handles degenerate spectra") {
  std::mt19937 rng(11);
  RVector gamma(4);
  gamma << 2.0, 2.0, -1.0, -1.0;
  const CMatrix u = testing::random_unitary(4, rng);
  const CMatrix m = u * gamma.asDiagonal().toDenseMatrix().cast<cxd>() * u.adjoint();
  const OracleSpectrum spectrum = eigen_oracle(m);
  CHECK(spectrum.eigenvalues(0) == Catch::Approx(2.0).margin(1e-11));
  CHECK(spectrum.eigenvalues(1) == Catch::Approx(2.0).margin(1e-11));
  CHECK(spectrum.eigenvalues(2) == Catch::Approx(-1.0).margin(1e-11));
  CHECK(spectrum.eigenvalues(3) == Catch::Approx(-1.0).margin(1e-11));
  CHECK(spectrum.residual < 1e-10 * 2.0);
}

TEST_CASE("eigen_oracle rejects non-Hermitian input") {
  CMatrix bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(eigen_oracle(bad), ValidationError);
}

TEST_CASE("trace_bounds examples") {
  {
    RVector eps(2), gamma(2);
    eps << 2, 1;
    gamma << 1, 0;
    const auto [lower, upper] = trace_bounds(eps, gamma);
    CHECK(lower == Catch::Approx(1.0).margin(1e-15));
    CHECK(upper == Catch::Approx(2.0).margin(1e-15));
  }
  {
    RVector eps(3), gamma(3);
    eps << 3, 2, 1;
    gamma << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    const auto [lower, upper] = trace_bounds(eps, gamma);
    CHECK(lower == Catch::Approx(2.0).margin(1e-14));
    CHECK(upper == Catch::Approx(2.0).margin(1e-14));
  }
  {
    RVector eps(2), gamma(2);
    eps << 3, 1;
    gamma << 0.7, 0.3;
    const auto [lower, upper] = trace_bounds(eps, gamma);
    CHECK(lower == Catch::Approx(1.6).margin(1e-14));
    CHECK(upper == Catch::Approx(2.4).margin(1e-14));
  }
  {
    RVector eps(2), gamma(2);
    eps << 1, 0;
    gamma << 0.9, 0.3;  // not a probability vector
    CHECK_THROWS_AS(trace_bounds(eps, gamma), ValidationError);
  }
}

TEST_CASE("permutation_means examples") {
  {
    RVector eps(2), gamma(2);
    eps << 2, 0;
    gamma << 1, 0;
    const auto means = permutation_means(eps, gamma);
    REQUIRE(means.size() == 2);
    CHECK(means[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(means[1] == Catch::Approx(2.0).margin(1e-15));
  }
  SECTION("qutrit mixed point reproduces the six closed-form means") {
    const double b = 1.0, c = 1.0;
    const double s = std::sqrt(b * b + 4 * c * c);
    RVector eps(3), gamma(3);
    eps << (b + s) / 2, b, (b - s) / 2;
    gamma << 0.5, 0.4, 0.1;  // spectrum fixed by c2 = 29/100, c3 = 1/50
    const auto means = permutation_means(eps, gamma);
    REQUIRE(means.size() == 6);
    std::vector<double> expected = {
        11 * b / 20 - s / 20, 11 * b / 20 + s / 20, 7 * b / 10 - s / 5,
        7 * b / 10 + s / 5,   3 * b / 4 - 3 * s / 20, 3 * b / 4 + 3 * s / 20};
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(means[i] == Catch::Approx(expected[i]).margin(1e-12));
  }
  SECTION("degenerate inputs collapse the multiset") {
    RVector eps(3), gamma(3);
    eps << 2, 2, 0;
    gamma << 0.5, 0.3, 0.2;
    CHECK(permutation_means(eps, gamma).size() < 6);
    RVector eps2(3);
    eps2 << 3, 2, 1;
    CHECK(permutation_means(eps2, gamma).size() == 6);
  }
}
