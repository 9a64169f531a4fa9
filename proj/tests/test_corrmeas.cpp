// SPDX-License-Identifier: Apache-2.0

#include <twistlab/corrmeas.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace twistlab;

namespace {

StateVector random_state(int l, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  StateVector v(l, n);
  for (std::size_t i = 0; i < v.dim(); ++i)
    v.amps()[static_cast<Eigen::Index>(i)] = cplx(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

// Wedge power of the Bell pair (|1,2>+|3,4>)/sqrt(2) on consecutive 4-mode blocks.
StateVector bell_power(int copies) {
  StateVector v(4 * copies, 2 * copies);
  double amp = std::pow(2.0, -0.5 * copies);
  for (std::uint32_t choice = 0; choice < (1u << copies); ++choice) {
    std::uint32_t bits = 0;
    for (int c = 0; c < copies; ++c)
      bits |= (choice >> c & 1u ? 0b1100u : 0b0011u) << (4 * c);
    v.set_amp(ModeSet::from_bits(bits), amp);
  }
  return v;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rdm basics") {
  SECTION("occupation numbers of a basis state") {
    KRdm r = rdm(basis_state(4, 2, ModeSet{1, 2}), 1);
    Eigen::VectorXd diag{{1.0, 1.0, 0.0, 0.0}};
    REQUIRE(max_abs(r.m - Eigen::MatrixXcd(diag.cast<cplx>().asDiagonal())) < 1e-15);
  }

  SECTION("Bell state occupations are uniform") {
    StateVector bell = bell_power(1);
    KRdm r = rdm(bell, 1);
    REQUIRE(max_abs(r.m - 0.5 * Eigen::MatrixXcd::Identity(4, 4)) < 1e-15);
  }

  SECTION("Hermitian, PSD, trace C(n,k)") {
    std::mt19937_64 rng(5);
    StateVector v = random_state(6, 3, rng);
    for (int k = 1; k <= 3; ++k) {
      KRdm r = rdm(v, k);
      REQUIRE(max_abs(r.m - r.m.adjoint()) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.m);
      REQUIRE(es.eigenvalues().minCoeff() > -1e-10);
      REQUIRE_THAT(r.m.trace().real(),
                   Catch::Matchers::WithinAbs(static_cast<double>(binomial(3, k)), 1e-10));
    }
    REQUIRE_THAT(rdm(v, 3).m.trace().real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THROWS_AS(rdm(v, 0), InvalidInputError);
    REQUIRE_THROWS_AS(rdm(v, 4), InvalidInputError);
  }
}

TEST_CASE("twisted rdm direct") {
  SECTION("hole occupations of a basis state") {
    KRdm r = twisted_rdm_direct(basis_state(4, 2, ModeSet{1, 2}), 1);
    Eigen::VectorXd diag{{0.0, 0.0, 1.0, 1.0}};
    REQUIRE(max_abs(r.m - Eigen::MatrixXcd(diag.cast<cplx>().asDiagonal())) < 1e-15);
  }

  SECTION("k=1 anticommutator identity and traces") {
    std::mt19937_64 rng(6);
    StateVector v = random_state(6, 3, rng);
    KRdm rt = twisted_rdm_direct(v, 1);
    REQUIRE(max_abs(rt.m - (Eigen::MatrixXcd::Identity(6, 6) - rdm(v, 1).m)) < 1e-12);
    for (int k = 1; k <= 3; ++k) {
      KRdm r = twisted_rdm_direct(v, k);
      REQUIRE(max_abs(r.m - r.m.adjoint()) < 1e-12);
      REQUIRE_THAT(r.m.trace().real(),
                   Catch::Matchers::WithinAbs(static_cast<double>(binomial(3, k)), 1e-10));
    }
    REQUIRE_THROWS_AS(twisted_rdm_direct(v, 4), InvalidInputError);
  }
}

TEST_CASE("twisted rdm reconstruction from ordinary rdms") {
  std::mt19937_64 rng(8);
  StateVector v = random_state(6, 3, rng);

  SECTION("k=1 is I - rho_1") {
    KRdm rec = twisted_rdm_from_rdms({rdm(v, 1)});
    REQUIRE(max_abs(rec.m - twisted_rdm_direct(v, 1).m) < 1e-12);
  }

  SECTION("matches the direct twisted RDM at k=2,3") {
    std::vector<KRdm> rdms;
    for (int k = 1; k <= 3; ++k) {
      rdms.push_back(rdm(v, k));
      KRdm rec = twisted_rdm_from_rdms(rdms);
      REQUIRE(rec.kind == RdmKind::twisted);
      REQUIRE(max_abs(rec.m - twisted_rdm_direct(v, k).m) < 1e-10);
    }
  }

  SECTION("product state gives hole-pair occupations") {
    StateVector p = basis_state(6, 3, ModeSet{1, 2, 3});
    KRdm rec = twisted_rdm_from_rdms({rdm(p, 1), rdm(p, 2)});
    FockBasis pairs(6, 2);
    for (std::size_t qi = 0; qi < pairs.dim(); ++qi)
      for (std::size_t pi = 0; pi < pairs.dim(); ++pi) {
        double expect = (qi == pi && pairs.subset(qi).disjoint(ModeSet{1, 2, 3})) ? 1.0 : 0.0;
        REQUIRE(std::abs(rec.m(static_cast<Eigen::Index>(qi), static_cast<Eigen::Index>(pi)) -
                         expect) < 1e-12);
      }
  }

  SECTION("input validation") {
    REQUIRE_THROWS_AS(twisted_rdm_from_rdms({}), InvalidInputError);
    REQUIRE_THROWS_AS(twisted_rdm_from_rdms({rdm(v, 2)}), InvalidInputError);
    StateVector other = random_state(8, 3, rng);
    REQUIRE_THROWS_AS(twisted_rdm_from_rdms({rdm(other, 1), rdm(v, 2)}), InvalidInputError);
    REQUIRE_THROWS_AS(twisted_rdm_from_rdms({twisted_rdm_direct(v, 1)}), InvalidInputError);
  }
}

TEST_CASE("twisted purity three ways") {
  std::mt19937_64 rng(10);
  const PurityMethod methods[] = {PurityMethod::rdm_trace, PurityMethod::residual_sum,
                                  PurityMethod::tensor_apply};

  SECTION("Slater nullity") {
    StateVector s = basis_state(6, 3, ModeSet{1, 4, 5});
    for (PurityMethod m : methods) REQUIRE(twisted_purity(s, 1, m) < 1e-12);
  }

  SECTION("Bell pair has flat spectrum") {
    StateVector bell = bell_power(1);
    for (PurityMethod m : methods) {
      REQUIRE_THAT(twisted_purity(bell, 1, m), Catch::Matchers::WithinAbs(1.0, 1e-12));
      REQUIRE_THAT(twisted_purity(bell, 2, m), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
  }

  SECTION("cross-method agreement on random states") {
    for (auto [l, n] : {std::pair{6, 3}, std::pair{5, 2}}) {
      StateVector v = random_state(l, n, rng);
      for (int k = 0; k <= n; ++k) {
        double w0 = twisted_purity(v, k, methods[0]);
        for (PurityMethod m : {methods[1], methods[2]})
          REQUIRE_THAT(twisted_purity(v, k, m),
                       Catch::Matchers::WithinAbs(w0, 1e-10 * std::max(1.0, w0)));
      }
    }
  }

  SECTION("structural zero beyond min(n, l-n)") {
    StateVector v = random_state(5, 3, rng);
    for (PurityMethod m : methods) REQUIRE(twisted_purity(v, 3, m) == 0.0);
  }

  SECTION("guards") {
    StateVector v = random_state(4, 2, rng);
    v.amps() *= 2.0;
    REQUIRE_THROWS_AS(twisted_purity(v, 1, PurityMethod::rdm_trace), NormalizationError);
    v.normalize();
    REQUIRE_THROWS_AS(twisted_purity(v, -1, PurityMethod::rdm_trace), InvalidInputError);
  }
}

TEST_CASE("purity spectrum") {
  SECTION("Slater spectrum") {
    PuritySpectrum s = purity_spectrum(basis_state(6, 3, ModeSet{1, 2, 3}), 3);
    REQUIRE(s.omegas.size() == 4);
    REQUIRE(s.omegas[0] == 1.0);
    for (int k = 1; k <= 3; ++k) REQUIRE(s.omegas[k] < 1e-12);
  }

  SECTION("Bell powers") {
    PuritySpectrum s2 = purity_spectrum(bell_power(2), 4);
    std::vector<double> expect2 = {1, 2, 3, 2, 1};
    for (int k = 0; k <= 4; ++k)
      REQUIRE_THAT(s2.omegas[k], Catch::Matchers::WithinAbs(expect2[k], 1e-10));

    PuritySpectrum s3 = purity_spectrum(bell_power(3), 6);
    std::vector<double> expect3 = {1, 3, 6, 7, 6, 3, 1};
    for (int k = 0; k <= 6; ++k)
      REQUIRE_THAT(s3.omegas[k], Catch::Matchers::WithinAbs(expect3[k], 1e-10));
  }

  SECTION("exact zeros past min(n, l-n)") {
    std::mt19937_64 rng(12);
    PuritySpectrum s = purity_spectrum(random_state(5, 3, rng), 3);
    REQUIRE(s.omegas[3] == 0.0);
  }

  SECTION("forced single method") {
    std::mt19937_64 rng(14);
    StateVector v = random_state(6, 3, rng);
    PuritySpectrum auto_s = purity_spectrum(v, 3);
    for (PurityMethod m :
         {PurityMethod::rdm_trace, PurityMethod::residual_sum, PurityMethod::tensor_apply}) {
      PuritySpectrum s = purity_spectrum_with(v, 3, m);
      REQUIRE(s.method == purity_method_name(m));
      for (int k = 0; k <= 3; ++k)
        REQUIRE_THAT(s.omegas[k], Catch::Matchers::WithinAbs(
                                      auto_s.omegas[k],
                                      1e-10 * std::max(1.0, auto_s.omegas[k])));
    }
  }

  SECTION("kmax validation") {
    std::mt19937_64 rng(15);
    StateVector v = random_state(5, 2, rng);
    REQUIRE_THROWS_AS(purity_spectrum(v, 3), InvalidInputError);
    REQUIRE_THROWS_AS(purity_spectrum(v, -1), InvalidInputError);
  }
}

TEST_CASE("purity upper bound") {
  REQUIRE(purity_upper_bound(4, 2, 1) == 4.0);
  REQUIRE(purity_upper_bound(8, 4, 2) == 36.0);
  REQUIRE(purity_upper_bound(12, 6, 6) == 1.0);
  REQUIRE_THROWS_AS(purity_upper_bound(4, 2, 3), InvalidInputError);

  std::mt19937_64 rng(16);
  StateVector v = random_state(6, 3, rng);
  PuritySpectrum s = purity_spectrum(v, 3);
  for (int k = 0; k <= 3; ++k) REQUIRE(s.omegas[k] <= purity_upper_bound(6, 3, k) + 1e-9);
}

TEST_CASE("generating function") {
  PuritySpectrum bell = purity_spectrum(bell_power(1), 2);
  REQUIRE_THAT(generating_function(bell, 1.0), Catch::Matchers::WithinAbs(3.0, 1e-10));

  PuritySpectrum slater = purity_spectrum(basis_state(6, 3, ModeSet{1, 2, 3}), 3);
  for (double beta : {0.5, 1.0, 2.0})
    REQUIRE_THAT(generating_function(slater, beta), Catch::Matchers::WithinAbs(1.0, 1e-10));

  PuritySpectrum bell2 = purity_spectrum(bell_power(2), 4);
  REQUIRE_THAT(generating_function(bell2, 1.0), Catch::Matchers::WithinAbs(9.0, 1e-9));

  PuritySpectrum incomplete = purity_spectrum(bell_power(2), 3);
  REQUIRE_THROWS_AS(generating_function(incomplete, 1.0), InvalidInputError);
}

TEST_CASE("spectrum csv format") {
  PuritySpectrum s{4, 2, {1.0, 0.25}, "auto"};
  std::ostringstream out;
  write_spectrum_csv(s, out);
  REQUIRE(out.str() ==
          "k,omega\n0,1.0000000000000000e+00\n1,2.5000000000000000e-01\n");
}
