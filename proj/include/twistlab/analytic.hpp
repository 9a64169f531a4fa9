// SPDX-License-Identifier: Apache-2.0
//
// Closed-form baselines and state factories: exact Haar-average twisted
// purities, real-Haar sampling, Bell-product spectra, wedge-product embedding,
// and the random-state generators used by experiments and tests.

#pragma once

#include <twistlab/corrmeas.hpp>
#include <twistlab/fock.hpp>
#include <twistlab/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <vector>

namespace twistlab {

namespace detail {

inline unsigned long long factorial_u64(int a) {
  unsigned long long f = 1;
  for (int i = 2; i <= a; ++i) f *= static_cast<unsigned long long>(i);
  return f;  // exact through 20!
}

}  // namespace detail

// Exact average of omega_k over real (orthogonally invariant) Haar states,
//   <omega_k> = [C(l,k)C(l-k,n)C(l-k,n-k) + (-1)^k C(l,n-k)C(l-n,k)C(l-n+k,k)]
//               / [C(l,n)(C(l,n)+2)],
// equivalently (C = C(l,n))
//   <omega_k> = (k!(l-k)! + (-1)^k n!(l-n)!) / ((C+2) (k!)^2 (n-k)!(l-n-k)!).
// Both forms are evaluated in exact integer arithmetic and asserted equal.
// The alternating term makes <omega_n> vanish at odd half filling (l = 2n,
// n odd), where omega_n = 0 identically for every state.
//
// At k = 0 the formula returns (C+1)/(C+2), not the identity omega_0 = 1:
// the average is derived for k >= 1, and callers gate on k >= 1.
inline double haar_average_exact(int l, int n, int k) {
  if (n < 0 || n > l || l > 20)
    throw InvalidInputError("haar_average_exact: need 0 <= n <= l <= 20");
  if (k < 0 || k > std::min(n, l - n))
    throw InvalidInputError("haar_average_exact: need 0 <= k <= min(n, l-n)");
  using i128 = __int128;
  const i128 sign = (k & 1) ? -1 : 1;
  const i128 c = static_cast<i128>(binomial(l, n));

  i128 num1 = static_cast<i128>(binomial(l, k)) * static_cast<i128>(binomial(l - k, n)) *
                  static_cast<i128>(binomial(l - k, n - k)) +
              sign * static_cast<i128>(binomial(l, n - k)) *
                  static_cast<i128>(binomial(l - n, k)) *
                  static_cast<i128>(binomial(l - n + k, k));
  i128 den1 = c * (c + 2);

  i128 num2 = static_cast<i128>(detail::factorial_u64(k)) *
                  static_cast<i128>(detail::factorial_u64(l - k)) +
              sign * static_cast<i128>(detail::factorial_u64(n)) *
                  static_cast<i128>(detail::factorial_u64(l - n));
  i128 den2 = (c + 2) * static_cast<i128>(detail::factorial_u64(k)) *
              static_cast<i128>(detail::factorial_u64(k)) *
              static_cast<i128>(detail::factorial_u64(n - k)) *
              static_cast<i128>(detail::factorial_u64(l - n - k));

  if (num1 * den2 != num2 * den1)
    throw InvariantError("haar_average_exact: closed forms disagree");
  return static_cast<double>(num1) / static_cast<double>(den1);
}

// Real Gaussian amplitudes normalized to the unit sphere: the orthogonally
// invariant (real Haar) distribution on state space.
inline StateVector haar_sample(int l, int n, GaussianRng& rng) {
  StateVector v(l, n);
  for (std::size_t i = 0; i < v.dim(); ++i)
    v.amps()[static_cast<Eigen::Index>(i)] = rng.normal();
  v.normalize();
  return v;
}

inline StateVector haar_sample(int l, int n, std::uint64_t seed) {
  GaussianRng rng(seed);
  return haar_sample(l, n, rng);
}

// Complex-Gaussian normalized state (generic test state, no invariance claim).
inline StateVector random_state(int l, int n, GaussianRng& rng) {
  StateVector v(l, n);
  for (std::size_t i = 0; i < v.dim(); ++i)
    v.amps()[static_cast<Eigen::Index>(i)] = rng.complex_normal();
  v.normalize();
  return v;
}

// Random Hermitian generator for single_particle_rotate.
inline Eigen::MatrixXcd random_hermitian(int l, GaussianRng& rng) {
  Eigen::MatrixXcd a(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) a(i, j) = rng.complex_normal();
  return 0.5 * (a + a.adjoint().eval());
}

// Random CI state with support confined to |S sym-diff S0| <= 2*max_exc
// (support radius at most 2*max_exc, hence in G_{2*max_exc+1}).
inline StateVector random_ci_state(int l, int n, ModeSet S0, int max_exc, GaussianRng& rng) {
  if (S0.size() != n) throw InvalidInputError("random_ci_state: |S0| != n");
  StateVector v(l, n);
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (std::popcount(v.basis().subset(i).bits() ^ S0.bits()) <= 2 * max_exc)
      v.amps()[static_cast<Eigen::Index>(i)] = rng.complex_normal();
  v.normalize();
  return v;
}

// The Bell pair (|1,2> + |3,4>)/sqrt(2): minimal non-Slater state, spectrum (1,1,1).
inline StateVector bell_pair() {
  StateVector v(4, 2);
  v.set_amp(ModeSet{1, 2}, 1.0 / std::numbers::sqrt2);
  v.set_amp(ModeSet{3, 4}, 1.0 / std::numbers::sqrt2);
  return v;
}

// Wedge product of states on consecutive disjoint mode ranges. Part i's modes
// are shifted up by the total mode count of parts before it; with ascending
// block layout all embedding signs are +1 and amplitudes multiply.
inline StateVector embed_product(const std::vector<StateVector>& parts) {
  if (parts.empty()) throw InvalidInputError("embed_product: no parts");
  int l = 0, n = 0;
  for (const StateVector& p : parts) {
    l += p.l();
    n += p.n();
  }
  if (l > 28) throw InvalidInputError("embed_product: total mode count exceeds 28");
  StateVector acc = parts[0];
  for (std::size_t pi = 1; pi < parts.size(); ++pi) {
    const StateVector& p = parts[pi];
    StateVector next(acc.l() + p.l(), acc.n() + p.n());
    for (std::size_t i = 0; i < acc.dim(); ++i) {
      cplx a = acc.amps()[static_cast<Eigen::Index>(i)];
      if (a == 0.0) continue;
      std::uint32_t abits = acc.basis().subset(i).bits();
      for (std::size_t j = 0; j < p.dim(); ++j) {
        cplx b = p.amps()[static_cast<Eigen::Index>(j)];
        if (b == 0.0) continue;
        next.set_amp(ModeSet::from_bits(abits | (p.basis().subset(j).bits() << acc.l())), a * b);
      }
    }
    acc = std::move(next);
  }
  return acc;
}

inline StateVector bell_power(int copies) {
  if (copies < 1) throw InvalidInputError("bell_power: copies must be >= 1");
  return embed_product(std::vector<StateVector>(copies, bell_pair()));
}

// Spectrum of the Bell wedge power: coefficients of (1 + x + x^2)^copies,
// exact integers.
inline PuritySpectrum bell_product_spectrum(int copies) {
  if (copies < 1) throw InvalidInputError("bell_product_spectrum: copies must be >= 1");
  std::vector<std::uint64_t> coeff = {1, 1, 1};
  for (int c = 1; c < copies; ++c) {
    std::vector<std::uint64_t> next(coeff.size() + 2, 0);
    for (std::size_t i = 0; i < coeff.size(); ++i)
      for (int d = 0; d <= 2; ++d) next[i + d] += coeff[i];
    coeff = std::move(next);
  }
  PuritySpectrum s{4 * copies, 2 * copies, {}, "closed-form"};
  s.omegas.assign(coeff.begin(), coeff.end());
  return s;
}

}  // namespace twistlab
