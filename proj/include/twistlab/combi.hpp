// SPDX-License-Identifier: Apache-2.0
//
// Mode sets, binomial tables, colexicographic subset ranking, and the
// fermionic sign algebra (inversion-count signs for sorting and for
// concatenating disjoint ascending sequences).
//
// Modes are 1-based: mode m occupies bit m-1 of a ModeSet bitmask. For a
// fixed popcount, increasing bitmask value is exactly colexicographic order,
// which is what the rank formula rank(S) = sum_i C(s_i - 1, i) enumerates.

#pragma once

#include <twistlab/common.hpp>

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace twistlab {

// Binomial coefficients through a = 66 fit in unsigned 64-bit.
inline std::uint64_t binomial(int a, int b) {
  static const auto table = [] {
    constexpr int kMax = 66;
    std::vector<std::vector<std::uint64_t>> t(kMax + 1);
    for (int i = 0; i <= kMax; ++i) {
      t[i].assign(i + 1, 1);
      for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
    }
    return t;
  }();
  if (b < 0 || b > a) return 0;
  if (a > 66) throw InvalidInputError("binomial: argument out of table range");
  return table[a][b];
}

// Set of 1-based modes held as a bitmask.
class ModeSet {
 public:
  ModeSet() = default;
  static ModeSet from_bits(std::uint32_t bits) {
    ModeSet s;
    s.bits_ = bits;
    return s;
  }
  ModeSet(std::initializer_list<int> modes) { *this = ModeSet(std::vector<int>(modes)); }
  explicit ModeSet(const std::vector<int>& modes) {
    for (int m : modes) {
      if (m < 1 || m > 32) throw InvalidInputError("ModeSet: mode out of range: " + std::to_string(m));
      std::uint32_t bit = 1u << (m - 1);
      if (bits_ & bit) throw InvalidInputError("ModeSet: repeated mode " + std::to_string(m));
      bits_ |= bit;
    }
  }

  std::uint32_t bits() const { return bits_; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool contains(int mode) const { return bits_ & (1u << (mode - 1)); }
  bool subset_of(ModeSet other) const { return (bits_ & ~other.bits_) == 0; }
  bool disjoint(ModeSet other) const { return (bits_ & other.bits_) == 0; }

  ModeSet operator|(ModeSet o) const { return from_bits(bits_ | o.bits_); }
  ModeSet operator&(ModeSet o) const { return from_bits(bits_ & o.bits_); }
  ModeSet operator-(ModeSet o) const { return from_bits(bits_ & ~o.bits_); }
  ModeSet operator^(ModeSet o) const { return from_bits(bits_ ^ o.bits_); }
  bool operator==(ModeSet o) const { return bits_ == o.bits_; }
  bool operator!=(ModeSet o) const { return bits_ != o.bits_; }

  // Ascending 1-based mode list.
  std::vector<int> modes() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::uint32_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
    return out;
  }

  // Complement within modes 1..l.
  ModeSet complement(int l) const { return from_bits(~bits_ & ((l >= 32 ? ~0u : (1u << l) - 1))); }

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (int m : modes()) {
      if (!first) s += ",";
      s += std::to_string(m);
      first = false;
    }
    return s + "}";
  }

 private:
  std::uint32_t bits_ = 0;
};

// Sign of the permutation that sorts seq ascending; rejects repeats.
inline int sign_sort(const std::vector<int>& seq) {
  int inversions = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j) {
      if (seq[i] == seq[j]) throw InvalidInputError("sign_sort: repeated element");
      if (seq[i] > seq[j]) ++inversions;
    }
  return (inversions & 1) ? -1 : 1;
}

// sigma(A,B): sign of sorting (sorted A, sorted B); A and B disjoint.
// Inversions are exactly the pairs a in A, b in B with a > b.
inline int sign_concat(ModeSet A, ModeSet B) {
  if (!A.disjoint(B)) throw InvalidInputError("sign_concat: sets overlap");
  int inversions = 0;
  for (std::uint32_t b = B.bits(); b; b &= b - 1) {
    int mode = std::countr_zero(b) + 1;
    inversions += std::popcount(A.bits() >> mode);
  }
  return (inversions & 1) ? -1 : 1;
}

// sigma(A1,...,Aj) = prod_{i<i'} sigma(Ai, Ai').
inline int sign_concat_multi(const std::vector<ModeSet>& sets) {
  int s = 1;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j) s *= sign_concat(sets[i], sets[j]);
  return s;
}

// Fixed-(l,n) subset basis in colexicographic order with O(n) rank/unrank.
class FockBasis {
 public:
  FockBasis(int l, int n) : l_(l), n_(n) {
    if (l < 0 || l > 28 || n < 0 || n > l)
      throw InvalidInputError("FockBasis: need 0 <= n <= l <= 28");
    dim_ = binomial(l, n);
    subsets_.reserve(dim_);
    if (n == 0) {
      subsets_.push_back(0);
    } else {
      std::uint32_t s = (1u << n) - 1;  // lowest n modes
      for (std::size_t i = 0; i < dim_; ++i) {
        subsets_.push_back(s);
        // Gosper: next larger bitmask with the same popcount.
        std::uint32_t c = s & -s;
        std::uint32_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
      }
    }
  }

  int l() const { return l_; }
  int n() const { return n_; }
  std::size_t dim() const { return dim_; }

  ModeSet subset(std::size_t idx) const { return ModeSet::from_bits(subsets_[idx]); }

  std::size_t rank(ModeSet S) const {
    if (S.size() != n_ || (S.bits() >> l_) != 0)
      throw InvalidInputError("FockBasis::rank: subset not in basis");
    std::size_t r = 0;
    int i = 1;
    for (std::uint32_t b = S.bits(); b; b &= b - 1, ++i)
      r += binomial(std::countr_zero(b), i);
    return r;
  }

 private:
  int l_, n_;
  std::size_t dim_;
  std::vector<std::uint32_t> subsets_;
};

// Visit all k-subsets of the set `pool` (lexicographic in the element indices).
template <typename F>
void for_each_subset(ModeSet pool, int k, F&& visit) {
  std::vector<int> elems = pool.modes();
  int m = static_cast<int>(elems.size());
  if (k < 0 || k > m) return;
  if (k == 0) {
    visit(ModeSet{});
    return;
  }
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::uint32_t bits = 0;
    for (int i = 0; i < k; ++i) bits |= 1u << (elems[idx[i]] - 1);
    visit(ModeSet::from_bits(bits));
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace twistlab
