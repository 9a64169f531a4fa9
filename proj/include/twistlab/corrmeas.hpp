// SPDX-License-Identifier: Apache-2.0
//
// Correlation measures: k-RDMs, twisted k-RDMs (direct and reconstructed from
// ordinary RDMs), twisted purities omega_k by three independent methods, the
// Cauchy-Schwarz upper bound, and the generating function Z(beta).
//
// Index convention: RDM rows/columns run over unordered k-subsets in basis
// rank order. With this convention Tr[rho_k] = C(n,k) and
// Tr[rho~_k] = C(l-n,k) (an ordered-tuple trace would differ by k!).

#pragma once

#include <twistlab/fock.hpp>
#include <twistlab/pluecker.hpp>

#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

namespace twistlab {

enum class RdmKind { ordinary, twisted };

struct KRdm {
  int l = 0, n = 0, k = 0;
  RdmKind kind = RdmKind::ordinary;
  Eigen::MatrixXcd m;  // C(l,k) x C(l,k), k-subset rank indexed

  FockBasis index_basis() const { return FockBasis(l, k); }
};

// rho_k[Q,P] = <v| Psi^dag_P Psi_Q |v>, assembled as D^T conj(D) with
// D[T,Q] = sigma(T,Q) v(T u Q); Hermitian PSD with Tr = C(n,k).
inline KRdm rdm(const StateVector& v, int k) {
  int l = v.l(), n = v.n();
  if (k < 1 || k > n) throw InvalidInputError("rdm: need 1 <= k <= n");
  FockBasis idx(l, k), rest(l, n - k);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rest.dim()),
                                              static_cast<Eigen::Index>(idx.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) {
    cplx a = v.amps()[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    ModeSet S = v.basis().subset(i);
    for_each_subset(S, k, [&](ModeSet Q) {
      ModeSet T = S - Q;
      D(static_cast<Eigen::Index>(rest.rank(T)), static_cast<Eigen::Index>(idx.rank(Q))) =
          static_cast<double>(sign_concat(T, Q)) * a;
    });
  }
  return {l, n, k, RdmKind::ordinary, D.transpose() * D.conjugate()};
}

// rho~_k[Q,P] = <v| Psi_Q Psi^dag_P |v>, assembled as C^dag C with
// C[B,P] = sigma(B\P,P) v(B\P); Hermitian PSD with Tr = C(l-n,k).
inline KRdm twisted_rdm_direct(const StateVector& v, int k) {
  int l = v.l(), n = v.n();
  if (k < 1 || k > l - n) throw InvalidInputError("twisted_rdm_direct: need 1 <= k <= l-n");
  FockBasis idx(l, k), big(l, n + k);
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(big.dim()),
                                              static_cast<Eigen::Index>(idx.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) {
    cplx a = v.amps()[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    ModeSet S = v.basis().subset(i);
    for_each_subset(S.complement(l), k, [&](ModeSet P) {
      C(static_cast<Eigen::Index>(big.rank(S | P)), static_cast<Eigen::Index>(idx.rank(P))) =
          static_cast<double>(sign_concat(S, P)) * a;
    });
  }
  return {l, n, k, RdmKind::twisted, C.adjoint() * C};
}

// Particle-hole reconstruction: commuting every psi^dag to the left of Psi_Q
// Psi^dag_P leaves one contraction per common subset C of Q and P,
//   rho~_k[Q,P] = sum_{C subset Q^P} (-1)^{k-|C|} sigma(Q\C,C) sigma(P\C,C)
//                 rho_{k-|C|}[Q\C, P\C],   rho_0 = 1.
// The alternating sign is (-1)^{order of the remaining block}; the k=1 case
// reduces to rho~_1 = I - rho_1.
inline KRdm twisted_rdm_from_rdms(const std::vector<KRdm>& rdms) {
  if (rdms.empty()) throw InvalidInputError("twisted_rdm_from_rdms: empty input");
  int k = static_cast<int>(rdms.size());
  int l = rdms[0].l, n = rdms[0].n;
  for (int j = 1; j <= k; ++j) {
    const KRdm& r = rdms[j - 1];
    if (r.l != l || r.n != n)
      throw InvalidInputError("twisted_rdm_from_rdms: inconsistent (l,n) across inputs");
    if (r.k != j || r.kind != RdmKind::ordinary)
      throw InvalidInputError("twisted_rdm_from_rdms: need ordinary RDMs of orders 1..k");
  }
  std::vector<FockBasis> jbasis;
  jbasis.reserve(k);
  for (int j = 1; j <= k; ++j) jbasis.emplace_back(l, j);
  const FockBasis& idx = jbasis[k - 1];
  const auto dim = static_cast<Eigen::Index>(idx.dim());
  Eigen::MatrixXcd M(dim, dim);
  for (Eigen::Index qi = 0; qi < dim; ++qi) {
    ModeSet Q = idx.subset(static_cast<std::size_t>(qi));
    for (Eigen::Index pi = 0; pi < dim; ++pi) {
      ModeSet P = idx.subset(static_cast<std::size_t>(pi));
      std::uint32_t common = (Q & P).bits();
      cplx sum = 0.0;
      for (std::uint32_t c = common;; c = (c - 1) & common) {
        ModeSet C = ModeSet::from_bits(c);
        int j = k - C.size();
        if (j == 0) {
          sum += 1.0;  // C = Q = P, contraction down to rho_0 = Tr|v><v| = 1
        } else {
          ModeSet Qr = Q - C, Pr = P - C;
          double s = static_cast<double>(sign_concat(Qr, C) * sign_concat(Pr, C));
          if (j & 1) s = -s;
          sum += s * rdms[j - 1].m(static_cast<Eigen::Index>(jbasis[j - 1].rank(Qr)),
                                   static_cast<Eigen::Index>(jbasis[j - 1].rank(Pr)));
        }
        if (c == 0) break;
      }
      M(qi, pi) = sum;
    }
  }
  return {l, n, k, RdmKind::twisted, std::move(M)};
}

enum class PurityMethod { rdm_trace, residual_sum, tensor_apply };

inline const char* purity_method_name(PurityMethod m) {
  switch (m) {
    case PurityMethod::rdm_trace: return "rdm";
    case PurityMethod::residual_sum: return "residual";
    case PurityMethod::tensor_apply: return "tensor";
  }
  return "?";
}

// omega_k by one of three routes:
//   rdm-trace    Tr[rho_k rho~_k]
//   residual-sum sum_{A,B} |c_{A,B}|^2 over Pluecker residual components
//   tensor-apply |Omega^k |v> (x) |v> / k!|_F^2
// The routes are algebraically equal; keeping them independent is the point
// (each validates the others).
inline double twisted_purity(const StateVector& v, int k, PurityMethod method) {
  if (k < 0) throw InvalidInputError("twisted_purity: negative k");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw NormalizationError("twisted_purity: state must be normalized");
  int l = v.l(), n = v.n();
  switch (method) {
    case PurityMethod::tensor_apply:
      return omega_power_apply(v, k).norm2();
    case PurityMethod::rdm_trace: {
      if (k == 0) return 1.0;  // rho_0 = rho~_0 = 1
      if (k > n || k > l - n) return 0.0;
      KRdm r = rdm(v, k);
      KRdm rt = twisted_rdm_direct(v, k);
      return r.m.transpose().cwiseProduct(rt.m).sum().real();
    }
    case PurityMethod::residual_sum: {
      if (k > n || k > l - n) return 0.0;
      FockBasis ab(l, n - k), bb(l, n + k);
      std::vector<double> row(ab.dim());
      parallel_for(ab.dim(), [&](std::size_t ai) {
        ModeSet A = ab.subset(ai);
        double acc = 0.0;
        for (std::size_t bi = 0; bi < bb.dim(); ++bi)
          acc += std::norm(residual_component(v, A, bb.subset(bi), k));
        row[ai] = acc;
      });
      return std::accumulate(row.begin(), row.end(), 0.0);
    }
  }
  throw InvalidInputError("twisted_purity: unknown method");
}

struct PuritySpectrum {
  int l = 0, n = 0;
  std::vector<double> omegas;  // omega_k for k = 0..kmax
  std::string method;

  int kmax() const { return static_cast<int>(omegas.size()) - 1; }
};

namespace detail {

inline PurityMethod default_method(int k) {
  return k <= 3 ? PurityMethod::rdm_trace : PurityMethod::tensor_apply;
}

}  // namespace detail

// Spectrum with one forced method for every k (no cross-check).
inline PuritySpectrum purity_spectrum_with(const StateVector& v, int kmax, PurityMethod method) {
  if (kmax < 0 || kmax > v.n())
    throw InvalidInputError("purity_spectrum: need 0 <= kmax <= n");
  PuritySpectrum s{v.l(), v.n(), {}, purity_method_name(method)};
  s.omegas.reserve(kmax + 1);
  for (int k = 0; k <= kmax; ++k) s.omegas.push_back(twisted_purity(v, k, method));
  return s;
}

// Spectrum with per-k method selection (rdm-trace for k <= 3, tensor-apply
// beyond) plus a cross-check: the dominant entry is recomputed by an
// independent route and must agree to 1e-10 relative.
inline PuritySpectrum purity_spectrum(const StateVector& v, int kmax) {
  if (kmax < 0 || kmax > v.n())
    throw InvalidInputError("purity_spectrum: need 0 <= kmax <= n");
  PuritySpectrum s{v.l(), v.n(), {}, "auto"};
  s.omegas.reserve(kmax + 1);
  for (int k = 0; k <= kmax; ++k)
    s.omegas.push_back(twisted_purity(v, k, detail::default_method(k)));
  int kbest = kmax >= 1 ? 1 : 0;
  for (int k = 2; k <= kmax; ++k)
    if (s.omegas[k] > s.omegas[kbest]) kbest = k;
  if (kbest >= 1) {
    PurityMethod alt =
        kbest <= 3 ? PurityMethod::tensor_apply : PurityMethod::residual_sum;
    double w = twisted_purity(v, kbest, alt);
    if (std::abs(w - s.omegas[kbest]) > 1e-10 * std::max(1.0, std::abs(s.omegas[kbest])))
      throw InvariantError("purity_spectrum: cross-method check failed at k = " +
                           std::to_string(kbest));
  }
  return s;
}

// Cauchy-Schwarz bound omega_k <= C(n,k) C(l-n,k).
inline double purity_upper_bound(int l, int n, int k) {
  if (n < 0 || n > l || k < 0 || k > std::min(n, l - n))
    throw InvalidInputError("purity_upper_bound: need 0 <= k <= min(n, l-n)");
  return static_cast<double>(binomial(n, k)) * static_cast<double>(binomial(l - n, k));
}

// Z(v, beta) = sum_k omega_k beta^{2k}; multiplicative over wedge products.
// Requires the complete spectrum (kmax = min(n, l-n)).
inline double generating_function(const PuritySpectrum& s, double beta) {
  if (s.kmax() < std::min(s.n, s.l - s.n))
    throw InvalidInputError("generating_function: spectrum incomplete");
  double z = 0.0, b2 = beta * beta, p = 1.0;
  for (double w : s.omegas) {
    z += w * p;
    p *= b2;
  }
  return z;
}

// CSV rows "k,omega" with 17 significant digits.
inline void write_spectrum_csv(const PuritySpectrum& s, std::ostream& out) {
  out << "k,omega\n";
  char buf[64];
  for (int k = 0; k <= s.kmax(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.16e\n", k, s.omegas[k]);
    out << buf;
  }
}

}  // namespace twistlab
