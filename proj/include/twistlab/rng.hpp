// SPDX-License-Identifier: Apache-2.0
//
// Seedable Gaussian source with a pinned algorithm: mt19937_64 plus an
// explicit Box-Muller transform. std::normal_distribution is
// implementation-defined, which would break byte-identical artifacts across
// toolchains; this generator is part of the output contract.

#pragma once

#include <twistlab/common.hpp>

#include <cmath>
#include <cstdint>
#include <random>

namespace twistlab {

class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on (0, 1] with 53-bit resolution (never 0, so log is safe).
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1p-53;
  }

  // Standard normal; Box-Muller pairs, second variate cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cplx complex_normal() {
    double re = normal(), im = normal();
    return {re, im};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace twistlab
