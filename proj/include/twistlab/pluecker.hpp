// SPDX-License-Identifier: Apache-2.0
//
// Generalized Pluecker residuals c_{A,B}, G_k membership, and the
// configuration-interaction support diagnostics (diameter / radius / dimension).

#pragma once

#include <twistlab/fock.hpp>

#include <cstdint>
#include <vector>

namespace twistlab {

// c_{A,B} = sum_{R subset (B\A), |R|=k} v(A u R) v(B\R) sigma(A,R) sigma(B\R,R)
// for |A| = n-k, |B| = n+k. Vanishing of all components is equivalent to
// membership in G_k. Exactly zero when |B\A| < k (no admissible R).
inline cplx residual_component(const StateVector& v, ModeSet A, ModeSet B, int k) {
  int l = v.l(), n = v.n();
  if (k < 0 || k > n || n + k > l)
    throw InvalidInputError("residual_component: k out of range");
  if (A.size() != n - k || B.size() != n + k)
    throw InvalidInputError("residual_component: need |A| = n-k, |B| = n+k");
  if ((A.bits() >> l) != 0 || (B.bits() >> l) != 0)
    throw InvalidInputError("residual_component: mode set outside 1..l");
  cplx c = 0.0;
  for_each_subset(B - A, k, [&](ModeSet R) {
    ModeSet Br = B - R;
    c += v.amp(A | R) * v.amp(Br) *
         static_cast<double>(sign_concat(A, R) * sign_concat(Br, R));
  });
  return c;
}

struct GkResult {
  bool member;
  double omega;  // the deciding omega_k value
};

// v in G_k iff omega_k(v) < tol.
inline GkResult is_in_gk(const StateVector& v, int k, double tol = 1e-10) {
  if (tol <= 0.0) throw InvalidInputError("is_in_gk: tol must be positive");
  double w = omega_power_apply(v, k).norm2();
  return {w < tol, w};
}

// max over support pairs of |S1 (sym diff) S2| / 2; support is |v(S)| > amp_tol.
// Any state with support_diameter < k lies in G_k (sufficient, not necessary).
inline int support_diameter(const StateVector& v, double amp_tol = 1e-12) {
  if (amp_tol < 0.0) throw InvalidInputError("support_diameter: negative amp_tol");
  std::vector<std::uint32_t> support;
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (std::abs(v.amps()[static_cast<Eigen::Index>(i)]) > amp_tol)
      support.push_back(v.basis().subset(i).bits());
  if (support.empty()) throw InvalidInputError("support_diameter: empty support");
  int best = 0;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      best = std::max(best, std::popcount(support[i] ^ support[j]) / 2);
  return best;
}

// max over support of |S (sym diff) S0|: the CI truncation level relative to
// the reference determinant |S0>. Radius < k implies membership in G_k after
// any single-particle rotation.
inline int support_radius(const StateVector& v, ModeSet S0, double amp_tol = 1e-12) {
  if (S0.size() != v.n()) throw InvalidInputError("support_radius: |S0| != n");
  if (amp_tol < 0.0) throw InvalidInputError("support_radius: negative amp_tol");
  int best = -1;
  for (std::size_t i = 0; i < v.dim(); ++i)
    if (std::abs(v.amps()[static_cast<Eigen::Index>(i)]) > amp_tol)
      best = std::max(best, std::popcount(v.basis().subset(i).bits() ^ S0.bits()));
  if (best < 0) throw InvalidInputError("support_radius: empty support");
  return best;
}

// Dimension of the radius-(k) CI subspace sum_{r <= floor(k/2)} C(n,r) C(l-n,r):
// the span of excitations with |S sym-diff S0| < k, all inside G_k.
inline std::uint64_t ci_dimension(int l, int n, int k) {
  if (k < 1 || n < 0 || n > l) throw InvalidInputError("ci_dimension: need k >= 1, 0 <= n <= l");
  std::uint64_t total = 0;
  for (int r = 0; r <= k / 2; ++r) total += binomial(n, r) * binomial(l - n, r);
  return total;
}

}  // namespace twistlab
