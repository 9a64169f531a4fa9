// SPDX-License-Identifier: Apache-2.0
//
// Model Hamiltonians in the fixed-n sector and dense exact diagonalization.
//
// The 1D Hubbard chain (periodic, half filling) and the complex SYK model
// are assembled directly in the occupation basis.  Both conserve particle
// number by construction, so the matrix lives in a single C(l,n) block; an
// optional S_z filter restricts the Hubbard block further for speed.

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twistlab/combi.hpp"
#include "twistlab/common.hpp"
#include "twistlab/fock.hpp"
#include "twistlab/rng.hpp"

namespace twistlab {

// Hermitian Hamiltonian over a retained set of configurations of the fixed-n
// sector (all of them unless a symmetry filter was applied), plus the model
// metadata needed to reproduce it.
struct HamiltonianMatrix {
  explicit HamiltonianMatrix(FockBasis b) : basis(std::move(b)) {}

  FockBasis basis;                     // full fixed-(l,n) sector
  std::vector<std::uint32_t> configs;  // retained configurations (bitmasks)
  Eigen::MatrixXcd matrix;             // dim = configs.size()
  std::string model;
  double t = 0.0;
  double U = 0.0;
  std::uint64_t seed = 0;
  bool restricted = false;

  std::size_t dim() const { return configs.size(); }
};

struct Eigenstate {
  double energy;
  StateVector state;
};

namespace detail {

inline std::unordered_map<std::uint32_t, Eigen::Index> config_index(
    const std::vector<std::uint32_t>& configs) {
  std::unordered_map<std::uint32_t, Eigen::Index> idx;
  idx.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i)
    idx.emplace(configs[i], static_cast<Eigen::Index>(i));
  return idx;
}

// Matrix element of Psi^dag_Q Psi_P between configurations, written into
// column `col`: if S supports the move, returns (row, sign), else row < 0.
inline std::pair<Eigen::Index, int> hop_element(
    ModeSet S, ModeSet P, ModeSet Q,
    const std::unordered_map<std::uint32_t, Eigen::Index>& idx) {
  if (!P.subset_of(S)) return {-1, 0};
  const ModeSet T = S - P;
  if (!T.disjoint(Q)) return {-1, 0};
  const auto it = idx.find((T | Q).bits());
  if (it == idx.end())
    throw InvariantError("model build: move leaves the retained sector");
  return {it->second, sign_concat(T, P) * sign_concat(T, Q)};
}

}  // namespace detail

// Site/spin to mode: (x, up) -> 2x-1, (x, down) -> 2x, site index periodic.
inline int hubbard_mode(int x, int spin, int sites) {
  const int xp = ((x - 1) % sites + sites) % sites + 1;
  return 2 * xp - 1 + spin;
}

// Periodic 1D Hubbard chain at half filling (l = 2*sites modes, n = sites):
//
//   H = -t sum_{x,s} (c^dag_{x+1,s} c_{x,s} + c^dag_{x,s} c_{x+1,s})
//       + U sum_x n_{x,up} n_{x,down},
//
// with the bond sum taken literally over x = 1..sites, so for sites = 2 both
// bonds between the two sites are present.  sz_restrict keeps only the
// n_up = n_down = sites/2 configurations.
inline HamiltonianMatrix hubbard(int sites, double t, double U,
                                 bool sz_restrict = false) {
  if (sites < 2) throw InvalidInputError("hubbard: need at least 2 sites");
  const int l = 2 * sites;
  const int n = sites;
  HamiltonianMatrix H{FockBasis(l, n)};
  H.model = "hubbard";
  H.t = t;
  H.U = U;
  H.restricted = sz_restrict;

  if (sz_restrict && sites % 2 != 0)
    throw InvalidInputError("hubbard: S_z = 0 filter needs an even site count");
  std::uint32_t up_mask = 0;
  for (int x = 1; x <= sites; ++x) up_mask |= 1u << (hubbard_mode(x, 0, sites) - 1);
  for (std::size_t i = 0; i < H.basis.dim(); ++i) {
    const std::uint32_t bits = H.basis.subset(i).bits();
    if (!sz_restrict || std::popcount(bits & up_mask) == sites / 2)
      H.configs.push_back(bits);
  }

  const auto idx = detail::config_index(H.configs);
  const auto dim = static_cast<Eigen::Index>(H.configs.size());
  H.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  parallel_for(H.configs.size(), [&](std::size_t col) {
    const ModeSet S = ModeSet::from_bits(H.configs[col]);
    double diag = 0.0;
    for (int x = 1; x <= sites; ++x)
      if (S.contains(hubbard_mode(x, 0, sites)) &&
          S.contains(hubbard_mode(x, 1, sites)))
        diag += U;
    H.matrix(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) =
        diag;
    for (int x = 1; x <= sites; ++x) {
      for (int spin = 0; spin < 2; ++spin) {
        const int p = hubbard_mode(x, spin, sites);
        const int q = hubbard_mode(x + 1, spin, sites);
        for (const auto& [from, to] :
             {std::pair<int, int>{p, q}, std::pair<int, int>{q, p}}) {
          const auto [row, sign] =
              detail::hop_element(S, ModeSet{from}, ModeSet{to}, idx);
          if (row >= 0)
            H.matrix(row, static_cast<Eigen::Index>(col)) -=
                t * static_cast<double>(sign);
        }
      }
    }
  });
  return H;
}

// Complex SYK model at half filling (n = l/2):
//
//   H = sum_{a>b>c>d} (t_{abcd} psi^dag_a psi^dag_b psi_c psi_d + h.c.),
//
// with independent Re/Im parts of each coupling normal of variance
// 1/(2 (2l)^3), so <|t|^2> = (2l)^-3 and <t^2> = 0.  Couplings are drawn in
// a fixed nested loop order, making the matrix a pure function of the seed.
inline HamiltonianMatrix syk(int l, std::uint64_t seed) {
  if (l < 4) throw InvalidInputError("syk: need l >= 4");
  HamiltonianMatrix H{FockBasis(l, l / 2)};
  H.model = "syk";
  H.seed = seed;

  GaussianRng rng(seed);
  const double s = std::sqrt(1.0 / (2.0 * std::pow(2.0 * l, 3)));
  struct Term {
    ModeSet AB, CD;
    cplx t;
  };
  std::vector<Term> terms;
  for (int a = 4; a <= l; ++a)
    for (int b = 3; b < a; ++b)
      for (int c = 2; c < b; ++c)
        for (int d = 1; d < c; ++d) {
          const double re = s * rng.normal();
          const double im = s * rng.normal();
          terms.push_back({ModeSet{a, b}, ModeSet{c, d}, cplx(re, im)});
        }

  for (std::size_t i = 0; i < H.basis.dim(); ++i)
    H.configs.push_back(H.basis.subset(i).bits());
  const auto idx = detail::config_index(H.configs);
  const auto dim = static_cast<Eigen::Index>(H.configs.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  parallel_for(H.configs.size(), [&](std::size_t col) {
    const ModeSet S = ModeSet::from_bits(H.configs[col]);
    for (const Term& term : terms) {
      // psi^dag_a psi^dag_b psi_c psi_d = -Psi^dag_{ab} Psi_{cd}
      const auto [row, sign] = detail::hop_element(S, term.CD, term.AB, idx);
      if (row >= 0)
        A(row, static_cast<Eigen::Index>(col)) -=
            term.t * static_cast<double>(sign);
    }
  });
  H.matrix = A + A.adjoint().eval();
  return H;
}

// Lowest `count` eigenpairs, energies ascending, eigenvectors scattered back
// into the full fixed-n basis.  Dense solve, capped at dimension 5000.
inline std::vector<Eigenstate> eigenstates(const HamiltonianMatrix& H,
                                           int count) {
  const auto dim = static_cast<Eigen::Index>(H.dim());
  if (count < 1 || count > dim)
    throw InvalidInputError("eigenstates: count out of range");
  if (dim > 5000)
    throw DimensionError("eigenstates: dimension " + std::to_string(dim) +
                         " exceeds the dense cap 5000");
  if ((H.matrix - H.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvariantError("eigenstates: Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
  if (es.info() != Eigen::Success)
    throw InvariantError("eigenstates: eigensolver did not converge");

  const double scale = std::max(1.0, H.matrix.norm());
  std::vector<Eigenstate> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double e = es.eigenvalues()[i];
    const Eigen::VectorXcd vec = es.eigenvectors().col(i);
    if ((H.matrix * vec - e * vec).norm() > 1e-9 * scale)
      throw InvariantError("eigenstates: residual exceeds tolerance");
    StateVector sv(H.basis.l(), H.basis.n());
    for (Eigen::Index r = 0; r < dim; ++r)
      sv.set_amp(ModeSet::from_bits(H.configs[static_cast<std::size_t>(r)]),
                 vec[r]);
    out.push_back({e, std::move(sv)});
  }
  return out;
}

}  // namespace twistlab
