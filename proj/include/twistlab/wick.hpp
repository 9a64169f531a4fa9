// SPDX-License-Identifier: Apache-2.0
//
// Connected amplitudes and their resummation.
//
// Fix a reference determinant |G| with v(G) != 0 and form the excitation
// ratios t(P,Q) = v(G u Q \ P) / v(G).  This module extracts the connected
// (cumulant-like) part v^(c) of the ratio table, extrapolates high-order
// ratios from low-order data through a recursive Wick-type sum, and evaluates
// the closed-form resummation over matched partition pairs weighted by the
// rational coefficients nu(m).
//
// All recursion formulas are stated for the canonical frame G = {1..n}.  For
// a general G the state is relabeled by the order-preserving permutation that
// sends G to {1..n} and its complement to {n+1..l}; each basis amplitude picks
// up the sort sign tau(S) of the relabeled mode sequence.  Public entry points
// accept and return original-label mode sets, transporting values by tau at
// the boundary, so order-1 table entries always equal the literal ratios
// v(G u {q} \ {p}) / v(G) of the input state.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "twistlab/combi.hpp"
#include "twistlab/common.hpp"
#include "twistlab/fock.hpp"

namespace twistlab {

using rational = boost::multiprecision::cpp_rational;

// m[i] counts blocks of size i+1; the weight is sum (i+1) * m[i].
using PartitionVector = std::vector<int>;

inline int partition_weight(const PartitionVector& m) {
  int w = 0;
  for (std::size_t i = 0; i < m.size(); ++i) w += static_cast<int>(i + 1) * m[i];
  return w;
}

inline int partition_blocks(const PartitionVector& m) {
  return std::accumulate(m.begin(), m.end(), 0);
}

namespace detail {

inline PartitionVector trim_partition(PartitionVector m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
  return m;
}

}  // namespace detail

// Resummation coefficient nu(m), defined by nu(m) = 1 for at most one block
// and otherwise by the convolution recursion
//
//   nu(m) = sum_{0 < m' < m} (-1)^(w - w' + 1) (w'/w)
//           nu(m') nu(m - m') prod_i C(m_i, m'_i),
//
// where w = partition_weight(m), w' = partition_weight(m'), and m' runs over
// componentwise subvectors.  Values are exact rationals; the denominator
// growth rules out machine-integer arithmetic at the depths reached by the
// high-order resummation, hence the multiprecision representation.
inline rational nu(const PartitionVector& m_in) {
  PartitionVector m = detail::trim_partition(m_in);
  for (int c : m)
    if (c < 0) throw InvalidInputError("nu: negative block count");
  if (partition_blocks(m) <= 1) return rational(1);

  static std::map<PartitionVector, rational> memo;
  static std::mutex memo_mutex;
  {
    std::lock_guard<std::mutex> lock(memo_mutex);
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
  }

  const int w = partition_weight(m);
  rational acc(0);
  PartitionVector mp(m.size(), 0);
  for (;;) {
    // Mixed-radix increment over 0 <= mp <= m componentwise.
    std::size_t i = 0;
    while (i < mp.size() && mp[i] == m[i]) mp[i++] = 0;
    if (i == mp.size()) break;
    ++mp[i];
    if (mp == m) continue;

    PartitionVector rest(m.size());
    std::uint64_t binoms = 1;
    for (std::size_t j = 0; j < m.size(); ++j) {
      rest[j] = m[j] - mp[j];
      binoms *= binomial(m[j], mp[j]);
    }
    const int wp = partition_weight(mp);
    rational term = nu(mp) * nu(rest) * rational(binoms) * rational(wp, w);
    if (((w - wp) & 1) == 0) term = -term;
    acc += term;
  }

  std::lock_guard<std::mutex> lock(memo_mutex);
  return memo.emplace(std::move(m), std::move(acc)).first->second;
}

inline double nu_double(const PartitionVector& m) {
  return nu(m).convert_to<double>();
}

namespace detail {

// Order-preserving relabeling sending G to {1..n} and its complement to
// {n+1..l}.  tau(S) is the sort sign of the relabeled mode sequence of S.
struct CanonicalFrame {
  int l = 0;
  int n = 0;
  std::vector<int> perm;  // perm[mode], 1-based
  std::vector<int> inv;

  CanonicalFrame() = default;
  CanonicalFrame(int l_, ModeSet G) : l(l_), n(G.size()) {
    perm.assign(l + 1, 0);
    inv.assign(l + 1, 0);
    int next = 1;
    for (int g : G.modes()) perm[g] = next++;
    for (int m = 1; m <= l; ++m)
      if (!G.contains(m)) perm[m] = next++;
    for (int m = 1; m <= l; ++m) inv[perm[m]] = m;
  }

  ModeSet map(ModeSet S) const {
    ModeSet out;
    for (int m : S.modes()) out = out | ModeSet{perm[m]};
    return out;
  }
  ModeSet unmap(ModeSet S) const {
    ModeSet out;
    for (int m : S.modes()) out = out | ModeSet{inv[m]};
    return out;
  }
  int tau(ModeSet S) const {
    std::vector<int> seq;
    seq.reserve(S.size());
    for (int m : S.modes()) seq.push_back(perm[m]);
    return sign_sort(seq);
  }
};

using BitKey = std::pair<std::uint32_t, std::uint32_t>;

inline BitKey bit_key(ModeSet P, ModeSet Q) { return {P.bits(), Q.bits()}; }

// Recursive Wick-type sum over proper splittings of (P,Q):
//
//   sum_{0 < P' < P} sum_{Q' c Q, |Q'| = |P'|}
//     (-1)^(|P\P'|+1) (|P'|/|P|) sigma(P\P', P') sigma(Q', Q\Q')
//     get(P',Q') get(P\P', Q\Q')
//
// where get supplies excitation ratios in the canonical frame.
template <typename Get>
cplx wick_sum(ModeSet P, ModeSet Q, Get&& get) {
  const int j = P.size();
  cplx acc(0.0, 0.0);
  for (int jp = 1; jp < j; ++jp) {
    for_each_subset(P, jp, [&](ModeSet Pp) {
      const ModeSet Pbar = P - Pp;
      const int sp = sign_concat(Pbar, Pp);
      for_each_subset(Q, jp, [&](ModeSet Qp) {
        const ModeSet Qbar = Q - Qp;
        double coef = static_cast<double>(jp) / static_cast<double>(j);
        if (((j - jp) & 1) == 0) coef = -coef;
        coef *= sp * sign_concat(Qp, Qbar);
        acc += coef * get(Pp, Qp) * get(Pbar, Qbar);
      });
    });
  }
  return acc;
}

}  // namespace detail

// Hole/particle excitation label relative to the reference G: P lists holes
// (P subset of G) and Q particles (Q disjoint from G), with |P| = |Q|.
struct ExcitationKey {
  ModeSet P;
  ModeSet Q;
  friend bool operator<(const ExcitationKey& a, const ExcitationKey& b) {
    return detail::bit_key(a.P, a.Q) < detail::bit_key(b.P, b.Q);
  }
  friend bool operator==(const ExcitationKey& a, const ExcitationKey& b) {
    return a.P == b.P && a.Q == b.Q;
  }
};

// Connected amplitudes of a state relative to reference G, complete through
// excitation order k.  Tables are stored in the canonical frame; accessors
// speak original labels and transport values by tau.
class ConnectedAmplitudes {
 public:
  int l = 0;
  int n = 0;
  int k = 0;
  ModeSet G;
  cplx vG{0.0, 0.0};

  // Canonical-frame internals, exposed for the reconstruction routines.
  detail::CanonicalFrame frame;
  std::map<detail::BitKey, cplx> canon_ratio;      // t'(P',Q'), |P'| <= k
  std::map<detail::BitKey, cplx> canon_connected;  // v'^(c)(P',Q'), |P'| <= k

  // Largest excitation order the tables can hold.
  int order_cap() const { return std::min({k, n, l - n}); }

  void validate_key(ModeSet P, ModeSet Q) const {
    if (P.size() != Q.size())
      throw InvalidInputError("excitation key: |P| != |Q|");
    if (P.empty()) throw InvalidInputError("excitation key: empty");
    if (!P.subset_of(G)) throw InvalidInputError("excitation key: P not in G");
    if (!(Q & G).empty())
      throw InvalidInputError("excitation key: Q overlaps G");
    for (int m : Q.modes())
      if (m > l) throw InvalidInputError("excitation key: mode beyond l");
  }

  // Connected amplitude for original-label holes P and particles Q.
  cplx connected(ModeSet P, ModeSet Q) const {
    validate_key(P, Q);
    if (P.size() > order_cap())
      throw InvalidInputError("connected: order beyond table");
    const auto it =
        canon_connected.find(detail::bit_key(frame.map(P), frame.map(Q)));
    if (it == canon_connected.end())
      throw InvalidInputError("connected: key not tabulated");
    return static_cast<double>(frame.tau((G - P) | Q)) * it->second;
  }

  // True excitation ratio v(G u Q \ P)/v(G) for original-label (P,Q).
  cplx ratio(ModeSet P, ModeSet Q) const {
    validate_key(P, Q);
    if (P.size() > order_cap())
      throw InvalidInputError("ratio: order beyond table");
    const auto it =
        canon_ratio.find(detail::bit_key(frame.map(P), frame.map(Q)));
    if (it == canon_ratio.end())
      throw InvalidInputError("ratio: key not tabulated");
    return static_cast<double>(frame.tau((G - P) | Q)) * it->second;
  }

  // Visit every tabulated entry as (P, Q, connected value), original labels.
  template <typename F>
  void for_each_connected(F&& visit) const {
    for (const auto& [key, val] : canon_connected) {
      const ModeSet P = frame.unmap(ModeSet::from_bits(key.first));
      const ModeSet Q = frame.unmap(ModeSet::from_bits(key.second));
      visit(P, Q, static_cast<double>(frame.tau((G - P) | Q)) * val);
    }
  }
};

// Extract connected amplitudes of v relative to reference G through order k.
inline ConnectedAmplitudes connected_amplitudes(const StateVector& v, ModeSet G,
                                                int k) {
  const int l = v.l();
  const int n = v.n();
  if (G.size() != n) throw InvalidInputError("connected_amplitudes: |G| != n");
  for (int m : G.modes())
    if (m > l)
      throw InvalidInputError("connected_amplitudes: G mode beyond l");
  if (k < 1) throw InvalidInputError("connected_amplitudes: k < 1");

  ConnectedAmplitudes ca;
  ca.l = l;
  ca.n = n;
  ca.k = k;
  ca.G = G;
  ca.vG = v.amp(G);
  if (std::abs(ca.vG) <= 1e-12)
    throw ReferenceAmplitudeError(
        "connected_amplitudes: reference amplitude v(G) vanishes");
  ca.frame = detail::CanonicalFrame(l, G);

  const ModeSet comp = G.complement(l);
  const int jmax = ca.order_cap();
  for (int j = 1; j <= jmax; ++j) {
    for_each_subset(G, j, [&](ModeSet P) {
      for_each_subset(comp, j, [&](ModeSet Q) {
        const ModeSet S = (G - P) | Q;
        const cplx t = static_cast<double>(ca.frame.tau(S)) * v.amp(S) / ca.vG;
        ca.canon_ratio[detail::bit_key(ca.frame.map(P), ca.frame.map(Q))] = t;
      });
    });
  }
  // Second pass: subtract the Wick sum of each entry, which only reads
  // ratios of strictly lower order (all tabulated above).
  const ModeSet Gc = ModeSet::from_bits((1u << n) - 1u);
  const ModeSet compc = Gc.complement(l);
  for (int j = 1; j <= jmax; ++j) {
    for_each_subset(Gc, j, [&](ModeSet Pc) {
      for_each_subset(compc, j, [&](ModeSet Qc) {
        const auto key = detail::bit_key(Pc, Qc);
        const cplx t = ca.canon_ratio.at(key);
        const cplx w = detail::wick_sum(Pc, Qc, [&](ModeSet A, ModeSet B) {
          return ca.canon_ratio.at(detail::bit_key(A, B));
        });
        ca.canon_connected[key] = t - w;
      });
    });
  }
  return ca;
}

// Memoized recursive extrapolation of excitation ratios beyond the tabulated
// order: ratios with |P| <= k are read off the table, higher orders are
// rebuilt through the Wick-type sum over proper splittings.
class WickExtrapolator {
 public:
  explicit WickExtrapolator(const ConnectedAmplitudes& ca) : ca_(ca) {}

  // Predicted ratio v(G u Q \ P)/v(G) in original labels.
  cplx predict(ModeSet P, ModeSet Q) {
    ca_.validate_key(P, Q);
    const ModeSet S = (ca_.G - P) | Q;
    return static_cast<double>(ca_.frame.tau(S)) *
           canonical(ca_.frame.map(P), ca_.frame.map(Q));
  }

  cplx canonical(ModeSet P, ModeSet Q) {
    const auto key = detail::bit_key(P, Q);
    if (P.size() <= ca_.order_cap()) return ca_.canon_ratio.at(key);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const cplx val = detail::wick_sum(
        P, Q, [&](ModeSet A, ModeSet B) { return canonical(A, B); });
    return memo_.emplace(key, val).first->second;
  }

 private:
  const ConnectedAmplitudes& ca_;
  std::map<detail::BitKey, cplx> memo_;
};

// One-shot recursive reconstruction of the ratio for an excitation of order
// beyond the table.  For bulk extrapolation construct a WickExtrapolator so
// the memo is shared across keys.
inline cplx wick_reconstruct_recursive(const ConnectedAmplitudes& low,
                                       ModeSet P, ModeSet Q) {
  low.validate_key(P, Q);
  if (P.size() <= low.order_cap())
    throw InvalidInputError(
        "wick_reconstruct_recursive: order already tabulated");
  WickExtrapolator ex(low);
  return ex.predict(P, Q);
}

namespace detail {

// Enumerate matched partition pairs of (P,Q) with block size <= kmax.  Blocks
// are canonical: each P-block absorbs the lowest remaining hole, so every
// pair is produced exactly once.  visit receives parallel block lists.
template <typename F>
void for_each_partition_rec(ModeSet P, ModeSet Q, int kmax,
                            std::vector<std::pair<ModeSet, ModeSet>>& blocks,
                            F&& visit) {
  if (P.empty()) {
    visit(blocks);
    return;
  }
  const int head = P.modes().front();
  const ModeSet rest = P - ModeSet{head};
  const int bmax = std::min(kmax, P.size());
  for (int bsz = 1; bsz <= bmax; ++bsz) {
    for_each_subset(rest, bsz - 1, [&](ModeSet Pextra) {
      const ModeSet Pb = Pextra | ModeSet{head};
      for_each_subset(Q, bsz, [&](ModeSet Qb) {
        blocks.emplace_back(Pb, Qb);
        for_each_partition_rec(P - Pb, Q - Qb, kmax, blocks, visit);
        blocks.pop_back();
      });
    });
  }
}

template <typename F>
void for_each_partition(ModeSet P, ModeSet Q, int kmax, F&& visit) {
  std::vector<std::pair<ModeSet, ModeSet>> blocks;
  for_each_partition_rec(P, Q, kmax, blocks, visit);
}

}  // namespace detail

// Closed-form resummation: the predicted ratio for (P,Q) is
//
//   sum over matched partition pairs {(P_a,Q_a)} with blocks of size <= k:
//     nu(m) sigma_P sigma_Q prod_a v^(c)(P_a, Q_a),
//
// where m records the block-size multiplicities, sigma_P is the sort sign of
// the P-blocks concatenated in reverse block order, and sigma_Q of the
// Q-blocks concatenated in forward order.  Agrees with the iterated
// recursive reconstruction for every input table.
inline cplx cumulant_reconstruct(const ConnectedAmplitudes& ca, ModeSet P,
                                 ModeSet Q) {
  ca.validate_key(P, Q);
  const ModeSet Pc = ca.frame.map(P);
  const ModeSet Qc = ca.frame.map(Q);
  const int kmax = ca.order_cap();

  cplx acc(0.0, 0.0);
  detail::for_each_partition(
      Pc, Qc, kmax,
      [&](const std::vector<std::pair<ModeSet, ModeSet>>& blocks) {
        PartitionVector m(kmax, 0);
        for (const auto& b : blocks) ++m[b.first.size() - 1];
        const double w = nu_double(m);
        if (w == 0.0) return;

        std::vector<int> pseq, qseq;
        pseq.reserve(Pc.size());
        qseq.reserve(Qc.size());
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
          for (int mode : it->first.modes()) pseq.push_back(mode);
        for (const auto& b : blocks)
          for (int mode : b.second.modes()) qseq.push_back(mode);
        const int sp = sign_sort(pseq);
        const int sq = sign_sort(qseq);

        cplx prod(1.0, 0.0);
        for (const auto& b : blocks)
          prod *= ca.canon_connected.at(detail::bit_key(b.first, b.second));
        acc += w * static_cast<double>(sp * sq) * prod;
      });
  return static_cast<double>(ca.frame.tau((ca.G - P) | Q)) * acc;
}

}  // namespace twistlab
