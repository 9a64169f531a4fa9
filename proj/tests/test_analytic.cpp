// SPDX-License-Identifier: Apache-2.0

#include <twistlab/analytic.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace twistlab;

TEST_CASE("haar_average_exact values") {
  // Frozen rationals from the closed form (independently cross-checked by the
  // Monte-Carlo gates below and in the acceptance suite).
  REQUIRE_THAT(haar_average_exact(6, 3, 1), Catch::Matchers::WithinAbs(21.0 / 22.0, 1e-15));
  REQUIRE_THAT(haar_average_exact(6, 3, 2), Catch::Matchers::WithinAbs(21.0 / 22.0, 1e-15));
  REQUIRE(haar_average_exact(6, 3, 3) == 0.0);  // omega_3 vanishes identically at (6,3)
  REQUIRE_THAT(haar_average_exact(8, 4, 1), Catch::Matchers::WithinAbs(31.0 / 18.0, 1e-15));
  REQUIRE_THAT(haar_average_exact(8, 4, 2), Catch::Matchers::WithinAbs(7.0 / 4.0, 1e-15));
  REQUIRE_THAT(haar_average_exact(8, 4, 3), Catch::Matchers::WithinAbs(1.0 / 18.0, 1e-15));
  REQUIRE_THAT(haar_average_exact(4, 2, 1), Catch::Matchers::WithinAbs(0.25, 1e-15));
  REQUIRE_THAT(haar_average_exact(7, 3, 2), Catch::Matchers::WithinAbs(48.0 / 37.0, 1e-15));

  // k = 0 returns (C+1)/(C+2), not 1: the average formula targets k >= 1.
  double c = static_cast<double>(binomial(6, 3));
  REQUIRE_THAT(haar_average_exact(6, 3, 0), Catch::Matchers::WithinAbs((c + 1) / (c + 2), 1e-15));

  REQUIRE_THROWS_AS(haar_average_exact(6, 3, 4), InvalidInputError);
  REQUIRE_THROWS_AS(haar_average_exact(6, 3, -1), InvalidInputError);
  REQUIRE_THROWS_AS(haar_average_exact(22, 11, 1), InvalidInputError);
}

TEST_CASE("haar_average_exact closed forms agree for all l <= 20") {
  // The equality of the binomial and factorial forms is asserted inside the
  // call (exact integer cross-multiplication); sweep every admissible (l,n,k).
  for (int l = 1; l <= 20; ++l)
    for (int n = 0; n <= l; ++n)
      for (int k = 0; k <= std::min(n, l - n); ++k) {
        double w = haar_average_exact(l, n, k);
        REQUIRE(w >= 0.0);
        REQUIRE(w <= purity_upper_bound(l, n, k) + 1e-12);
      }
}

TEST_CASE("structural zero at odd half filling") {
  // At l = 2n with n odd, omega_n = 0 for every state: the k = n residual
  // matrix is the v-Gram of an antisymmetric pairing. The Haar average must
  // agree, and random states must satisfy it to round-off.
  REQUIRE(haar_average_exact(6, 3, 3) == 0.0);
  REQUIRE(haar_average_exact(10, 5, 5) == 0.0);
  GaussianRng rng(42);
  for (int rep = 0; rep < 3; ++rep) {
    StateVector v = random_state(6, 3, rng);
    REQUIRE(twisted_purity(v, 3, PurityMethod::tensor_apply) < 1e-24);
  }
}

TEST_CASE("haar_sample statistics") {
  GaussianRng rng(1234);

  SECTION("unit norm, real amplitudes") {
    StateVector v = haar_sample(6, 3, rng);
    REQUIRE_THAT(v.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    for (std::size_t i = 0; i < v.dim(); ++i)
      REQUIRE(v.amps()[static_cast<Eigen::Index>(i)].imag() == 0.0);
  }

  SECTION("mean omega_1 approaches the closed form") {
    const int samples = 500;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
      double w = twisted_purity(haar_sample(6, 3, rng), 1, PurityMethod::rdm_trace);
      sum += w;
      sumsq += w * w;
    }
    double mean = sum / samples;
    double se = std::sqrt((sumsq / samples - mean * mean) / (samples - 1));
    REQUIRE(std::abs(mean - haar_average_exact(6, 3, 1)) < 3.0 * se);
  }

  SECTION("four-point moment structure") {
    // <v_A v_B v_C v_D> = (dAB dCD + dAC dBD + dAD dBC) / (d(d+2)) for the
    // sphere in d dimensions; spot-check three index patterns at d = 6.
    const int d = 6, samples = 20000;
    GaussianRng mrng(77);
    double m4 = 0.0, m22 = 0.0, mx = 0.0;
    for (int s = 0; s < samples; ++s) {
      StateVector v = haar_sample(4, 2, mrng);
      auto a = [&](int i) { return v.amps()[i].real(); };
      m4 += a(0) * a(0) * a(0) * a(0);
      m22 += a(0) * a(0) * a(1) * a(1);
      mx += a(0) * a(1) * a(2) * a(3);
    }
    double norm = static_cast<double>(d) * (d + 2);
    REQUIRE_THAT(m4 / samples, Catch::Matchers::WithinAbs(3.0 / norm, 5e-3));
    REQUIRE_THAT(m22 / samples, Catch::Matchers::WithinAbs(1.0 / norm, 2e-3));
    REQUIRE_THAT(mx / samples, Catch::Matchers::WithinAbs(0.0, 2e-3));
  }

  SECTION("seed determinism") {
    StateVector a = haar_sample(6, 3, std::uint64_t{9});
    StateVector b = haar_sample(6, 3, std::uint64_t{9});
    REQUIRE((a.amps() - b.amps()).norm() == 0.0);
  }
}

TEST_CASE("bell_product_spectrum") {
  PuritySpectrum s1 = bell_product_spectrum(1);
  REQUIRE(s1.omegas == std::vector<double>{1, 1, 1});
  PuritySpectrum s2 = bell_product_spectrum(2);
  REQUIRE(s2.omegas == std::vector<double>{1, 2, 3, 2, 1});
  PuritySpectrum s3 = bell_product_spectrum(3);
  REQUIRE(s3.omegas == std::vector<double>{1, 3, 6, 7, 6, 3, 1});
  REQUIRE(s3.l == 12);
  REQUIRE(s3.n == 6);
  REQUIRE_THROWS_AS(bell_product_spectrum(0), InvalidInputError);
}

TEST_CASE("embed_product") {
  SECTION("Bell cube matches the closed-form spectrum") {
    StateVector b3 = bell_power(3);
    REQUIRE(b3.l() == 12);
    REQUIRE_THAT(b3.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    PuritySpectrum s = purity_spectrum(b3, 6);
    PuritySpectrum expect = bell_product_spectrum(3);
    for (int k = 0; k <= 6; ++k)
      REQUIRE_THAT(s.omegas[k], Catch::Matchers::WithinAbs(expect.omegas[k], 1e-10));
  }

  SECTION("Slater wedge Slater is Slater") {
    StateVector s = embed_product({basis_state(3, 1, ModeSet{2}), basis_state(3, 2, ModeSet{1, 3})});
    REQUIRE(s.amp(ModeSet{2, 4, 6}) == cplx(1.0));
    REQUIRE(twisted_purity(s, 1, PurityMethod::tensor_apply) < 1e-12);
  }

  SECTION("Z multiplicativity for random parts") {
    GaussianRng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
      StateVector v1 = random_state(4, 2, rng);
      StateVector v2 = random_state(4, 2, rng);
      StateVector w = embed_product({v1, v2});
      PuritySpectrum sw = purity_spectrum(w, 4);
      PuritySpectrum sa = purity_spectrum(v1, 2);
      PuritySpectrum sb = purity_spectrum(v2, 2);
      for (double beta : {0.5, 1.0, 2.0})
        REQUIRE_THAT(generating_function(sw, beta),
                     Catch::Matchers::WithinAbs(
                         generating_function(sa, beta) * generating_function(sb, beta), 1e-9));
    }
  }

  REQUIRE_THROWS_AS(embed_product({}), InvalidInputError);
}

TEST_CASE("random_ci_state radius bound") {
  GaussianRng rng(55);
  StateVector v = random_ci_state(10, 5, ModeSet{1, 2, 3, 4, 5}, 2, rng);
  REQUIRE(support_radius(v, ModeSet{1, 2, 3, 4, 5}) <= 4);
  REQUIRE_THROWS_AS(random_ci_state(10, 5, ModeSet{1, 2}, 2, rng), InvalidInputError);
}
