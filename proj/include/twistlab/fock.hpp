// SPDX-License-Identifier: Apache-2.0
//
// Fock-space layer: n-fermion state vectors over l modes, normal-ordered
// monomial application, the k-th power of Omega = sum_r psi_r (x) psi^dag_r
// applied to |v> (x) |v>, and exact single-particle rotations.
//
// Conventions (1-based modes, S = {s_1 < ... < s_n}):
//   Psi_S = psi_{s_1} ... psi_{s_n}          (ascending annihilation string)
//   Psi^dag_S = psi^dag_{s_n} ... psi^dag_{s_1}  (descending creation string)
//   Psi^dag_B |A> = sigma(A,B) |A u B>,  Psi_B |A> = sigma(A\B, B) |A\B>
// where sigma is the concatenation sign from combi.hpp.

#pragma once

#include <twistlab/combi.hpp>
#include <twistlab/common.hpp>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace twistlab {

class StateVector {
 public:
  StateVector(int l, int n)
      : basis_(l, n), amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_.dim()))) {}
  StateVector(FockBasis basis, Eigen::VectorXcd amps)
      : basis_(std::move(basis)), amps_(std::move(amps)) {
    if (static_cast<std::size_t>(amps_.size()) != basis_.dim())
      throw InvalidInputError("StateVector: amplitude length != basis dimension");
  }

  const FockBasis& basis() const { return basis_; }
  int l() const { return basis_.l(); }
  int n() const { return basis_.n(); }
  std::size_t dim() const { return basis_.dim(); }

  const Eigen::VectorXcd& amps() const { return amps_; }
  Eigen::VectorXcd& amps() { return amps_; }

  cplx amp(ModeSet S) const { return amps_[static_cast<Eigen::Index>(basis_.rank(S))]; }
  void set_amp(ModeSet S, cplx value) { amps_[static_cast<Eigen::Index>(basis_.rank(S))] = value; }

  double norm() const { return amps_.norm(); }
  void normalize() {
    double nrm = norm();
    if (nrm == 0.0) throw InvalidInputError("StateVector::normalize: zero state");
    amps_ /= nrm;
  }
  void ensure_normalized(double tol = 1e-9) const {
    double dev = std::abs(norm() - 1.0);
    if (dev > tol)
      throw NormalizationError("state is not normalized (|norm-1| = " + std::to_string(dev) + ")");
  }

 private:
  FockBasis basis_;
  Eigen::VectorXcd amps_;
};

// Basis state |S0>.
inline StateVector basis_state(int l, int n, ModeSet S0) {
  if (S0.size() != n) throw InvalidInputError("basis_state: |S0| != n");
  StateVector v(l, n);
  v.set_amp(S0, 1.0);
  return v;
}

// ---------------------------------------------------------------------------
// State file (JSON): {"l", "n", "amplitudes": [{"modes": [..], "re", "im"}]}
// Modes ascending, 1-based; unlisted basis states are zero.
// ---------------------------------------------------------------------------

inline nlohmann::json state_to_json(const StateVector& v) {
  nlohmann::json amps = nlohmann::json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) {
    cplx a = v.amps()[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    amps.push_back({{"modes", v.basis().subset(i).modes()}, {"re", a.real()}, {"im", a.imag()}});
  }
  return {{"l", v.l()}, {"n", v.n()}, {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const nlohmann::json& j) {
  try {
    int l = j.at("l").get<int>();
    int n = j.at("n").get<int>();
    StateVector v(l, n);
    for (const auto& entry : j.at("amplitudes")) {
      std::vector<int> modes = entry.at("modes").get<std::vector<int>>();
      for (std::size_t i = 1; i < modes.size(); ++i)
        if (modes[i] <= modes[i - 1]) throw InvalidInputError("state JSON: modes not ascending");
      ModeSet S(modes);
      if (S.size() != n) throw InvalidInputError("state JSON: entry has wrong particle count");
      if (v.amp(S) != 0.0) throw InvalidInputError("state JSON: duplicate basis entry " + S.str());
      v.set_amp(S, cplx(entry.at("re").get<double>(), entry.at("im").get<double>()));
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("state JSON: ") + e.what());
  }
}

inline StateVector load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open state file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
  }
  return state_from_json(j);
}

inline void save_state(const StateVector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write state file: " + path);
  out << state_to_json(v).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Operator application
// ---------------------------------------------------------------------------

// w = Psi^dag_Q Psi_P v. Output particle number n - |P| + |Q| must be in
// [0, l]. Basis states with P not inside S, or Q colliding with S\P, drop out.
inline StateVector apply_monomial(const StateVector& v, ModeSet Q, ModeSet P) {
  int l = v.l(), n = v.n();
  if ((P.bits() >> l) != 0 || (Q.bits() >> l) != 0)
    throw InvalidInputError("apply_monomial: mode set outside 1..l");
  int n_out = n - P.size() + Q.size();
  if (n_out < 0 || n_out > l)
    throw InvalidInputError("apply_monomial: resulting particle number out of range");
  StateVector w(l, n_out);
  for (std::size_t i = 0; i < v.dim(); ++i) {
    cplx a = v.amps()[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    ModeSet S = v.basis().subset(i);
    if (!P.subset_of(S)) continue;
    ModeSet T = S - P;
    if (!T.disjoint(Q)) continue;
    int sgn = sign_concat(T, P) * sign_concat(T, Q);
    w.amps()[static_cast<Eigen::Index>(w.basis().rank(T | Q))] += static_cast<double>(sgn) * a;
  }
  return w;
}

// Omega^k |v> (x) |v> / k!, stored as the C(l,n-k) x C(l,n+k) matrix
// M[A,B] = sum_{|R|=k} (Psi_R v)(A) (Psi^dag_R v)(B). The 1/k! of the power
// is absorbed by summing over unordered subsets R (the tensor pairing makes
// every ordering of R contribute identically). |M|_F^2 is the twisted purity.
struct TensorState {
  int l = 0, n = 0, k = 0;
  Eigen::MatrixXcd m;  // 0x0 when k > min(n, l-n)

  bool zero() const { return m.size() == 0; }
  double norm2() const { return zero() ? 0.0 : m.squaredNorm(); }
  FockBasis left_basis() const {
    if (zero()) throw InvalidInputError("TensorState: zero state has no basis");
    return FockBasis(l, n - k);
  }
  FockBasis right_basis() const {
    if (zero()) throw InvalidInputError("TensorState: zero state has no basis");
    return FockBasis(l, n + k);
  }
};

inline TensorState omega_power_apply(const StateVector& v, int k) {
  int l = v.l(), n = v.n();
  if (k < 0) throw InvalidInputError("omega_power_apply: negative k");
  TensorState out;
  out.l = l;
  out.n = n;
  out.k = k;
  if (k > n || n + k > l) return out;  // Omega^k annihilates: zero TensorState
  FockBasis basis_r(l, k), basis_a(l, n - k), basis_b(l, n + k);
  const auto dr = static_cast<Eigen::Index>(basis_r.dim());
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dr, static_cast<Eigen::Index>(basis_a.dim()));
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(dr, static_cast<Eigen::Index>(basis_b.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) {
    cplx a = v.amps()[static_cast<Eigen::Index>(i)];
    if (a == 0.0) continue;
    ModeSet S = v.basis().subset(i);
    // (Psi_R v)(S\R) = sigma(S\R, R) v(S)
    for_each_subset(S, k, [&](ModeSet r) {
      ModeSet A = S - r;
      L(static_cast<Eigen::Index>(basis_r.rank(r)), static_cast<Eigen::Index>(basis_a.rank(A))) =
          static_cast<double>(sign_concat(A, r)) * a;
    });
    // (Psi^dag_R v)(S u R) = sigma(S, R) v(S)
    for_each_subset(S.complement(l), k, [&](ModeSet r) {
      R(static_cast<Eigen::Index>(basis_r.rank(r)), static_cast<Eigen::Index>(basis_b.rank(S | r))) =
          static_cast<double>(sign_concat(S, r)) * a;
    });
  }
  out.m = L.transpose() * R;
  return out;
}

// Many-body matrix of the one-body operator K = sum_pq theta[p][q] psi^dag_p psi_q
// on the (l, n) sector. O(dim * l^2); intended for tests and small problems.
inline Eigen::MatrixXcd one_body_lift(const Eigen::MatrixXcd& theta, const FockBasis& basis) {
  int l = basis.l();
  if (theta.rows() != l || theta.cols() != l)
    throw InvalidInputError("one_body_lift: generator must be l x l");
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    ModeSet S = basis.subset(static_cast<std::size_t>(i));
    for (int q : S.modes()) {
      ModeSet T = S - ModeSet{q};
      int s1 = sign_concat(T, ModeSet{q});
      for (int p = 1; p <= l; ++p) {
        if (theta(p - 1, q - 1) == 0.0 || T.contains(p)) continue;
        int s2 = sign_concat(T, ModeSet{p});
        K(static_cast<Eigen::Index>(basis.rank(T | ModeSet{p})), i) +=
            theta(p - 1, q - 1) * static_cast<double>(s1 * s2);
      }
    }
  }
  return K;
}

namespace detail {

// Exact lift of a 2-mode unitary g acting on modes i < j (identity elsewhere).
// On a pair |A u {i}>, |A u {j}> the action is g conjugated by the parity
// (-1)^m, m = #(A between i and j); with both modes occupied it is det(g).
inline void apply_two_mode(StateVector& v, int i, int j, const Eigen::Matrix2cd& g) {
  std::uint32_t bi = 1u << (i - 1), bj = 1u << (j - 1);
  std::uint32_t between = 0;
  for (int m = i + 1; m < j; ++m) between |= 1u << (m - 1);
  cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const FockBasis& basis = v.basis();
  for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
    std::uint32_t s = basis.subset(idx).bits();
    bool has_i = s & bi, has_j = s & bj;
    if (has_i && has_j) {
      v.amps()[static_cast<Eigen::Index>(idx)] *= det;
    } else if (has_i && !has_j) {
      std::size_t partner = basis.rank(ModeSet::from_bits((s & ~bi) | bj));
      double par = (std::popcount(s & between) & 1) ? -1.0 : 1.0;
      cplx x = v.amps()[static_cast<Eigen::Index>(idx)];
      cplx y = v.amps()[static_cast<Eigen::Index>(partner)];
      v.amps()[static_cast<Eigen::Index>(idx)] = g(0, 0) * x + par * g(0, 1) * y;
      v.amps()[static_cast<Eigen::Index>(partner)] = par * g(1, 0) * x + g(1, 1) * y;
    }
  }
}

}  // namespace detail

// Applies the many-body image of u = exp(i theta) for an l x l Hermitian
// generator theta. u is decomposed into two-mode Givens rotations and a
// diagonal phase layer, each lifted exactly; this avoids exponentiating a
// C(l,n)-dimensional matrix. The decomposition is verified by rebuilding u.
inline StateVector single_particle_rotate(const StateVector& v, const Eigen::MatrixXcd& theta) {
  int l = v.l();
  if (theta.rows() != l || theta.cols() != l)
    throw InvalidInputError("single_particle_rotate: generator must be l x l");
  if ((theta - theta.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInputError("single_particle_rotate: generator is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(theta);
  Eigen::VectorXcd phases(l);
  for (int a = 0; a < l; ++a) phases[a] = std::exp(cplx(0.0, es.eigenvalues()[a]));
  Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  // QR by Givens: W := G_M ... G_1 u becomes diagonal, so u = G_1^+ ... G_M^+ W.
  struct Rotation {
    int i, j;  // 1-based mode pair, i < j
    Eigen::Matrix2cd g;
  };
  std::vector<Rotation> rots;
  Eigen::MatrixXcd w = u;
  for (int col = 0; col < l - 1; ++col) {
    for (int row = l - 1; row > col; --row) {
      cplx a = w(row - 1, col), b = w(row, col);
      double r = std::sqrt(std::norm(a) + std::norm(b));
      if (std::abs(b) < 1e-300) continue;
      Eigen::Matrix2cd g;
      g << std::conj(a) / r, std::conj(b) / r, -b / r, a / r;
      w.block(row - 1, 0, 2, l) = g * w.block(row - 1, 0, 2, l);
      rots.push_back({row, row + 1, g});  // acts on modes row, row+1
    }
  }
  // w is now unitary upper-triangular, hence diagonal with unit-modulus entries.
  Eigen::MatrixXcd rebuilt = w;
  for (auto it = rots.rbegin(); it != rots.rend(); ++it)
    rebuilt.block(it->i - 1, 0, 2, l) = it->g.adjoint() * rebuilt.block(it->i - 1, 0, 2, l);
  if ((rebuilt - u).cwiseAbs().maxCoeff() > 1e-10)
    throw InvariantError("single_particle_rotate: Givens decomposition failed to rebuild u");

  StateVector out = v;
  // Rightmost factor first: the diagonal phase layer, then G_M^+ ... G_1^+.
  for (std::size_t idx = 0; idx < out.dim(); ++idx) {
    cplx phase = 1.0;
    for (int m : out.basis().subset(idx).modes()) phase *= w(m - 1, m - 1);
    out.amps()[static_cast<Eigen::Index>(idx)] *= phase;
  }
  for (auto it = rots.rbegin(); it != rots.rend(); ++it)
    detail::apply_two_mode(out, it->i, it->j, it->g.adjoint());
  return out;
}

}  // namespace twistlab
