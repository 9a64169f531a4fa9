// SPDX-License-Identifier: Apache-2.0
//
// Shared error hierarchy and the process-wide worker-thread cap.
//
// Error types carry the standardized CLI exit codes (2 = parse / bad input,
// 3 = normalization, 4 = dimension, 5 = invariant failure) so front ends can
// translate exceptions into the documented exit-code contract.

#pragma once

#include <atomic>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace twistlab {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  Error(int exit_code, const std::string& msg)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

// Malformed files, bad precondition arguments, overlapping mode sets, ...
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& msg) : Error(2, msg) {}
};

// The reference amplitude v(G) vanishes, so excitation ratios are undefined.
class ReferenceAmplitudeError : public InvalidInputError {
 public:
  explicit ReferenceAmplitudeError(const std::string& msg)
      : InvalidInputError(msg) {}
};

// A state that must be normalized is not.
class NormalizationError : public Error {
 public:
  explicit NormalizationError(const std::string& msg) : Error(3, msg) {}
};

// Problem size exceeds a hard cap (eigensolver, basis ceiling).
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(4, msg) {}
};

// An internal consistency check (cross-method agreement, residuals) failed.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& msg) : Error(5, msg) {}
};

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};  // 0 = unset, resolve from env on first use
  return cap;
}
}  // namespace detail

// Worker cap for parallel loops. Resolution order: set_threads() > the
// TWISTLAB_THREADS environment variable > hardware concurrency.
inline void set_threads(int n) { detail::thread_cap().store(n > 0 ? n : 0); }

inline int threads() {
  int cap = detail::thread_cap().load();
  if (cap > 0) return cap;
  if (const char* env = std::getenv("TWISTLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) {
      detail::thread_cap().store(n);
      return n;
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Chunked parallel loop over [0, count). The body must only touch state that
// is private to its index range; chunk boundaries are deterministic for a
// fixed thread count, so any per-chunk accumulation order is reproducible.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  int workers = threads();
  if (workers <= 1 || count < 2048) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::size_t nchunk = static_cast<std::size_t>(workers);
  if (nchunk > count) nchunk = count;
  std::vector<std::thread> pool;
  pool.reserve(nchunk);
  std::size_t per = (count + nchunk - 1) / nchunk;
  for (std::size_t c = 0; c < nchunk; ++c) {
    std::size_t lo = c * per;
    std::size_t hi = std::min(count, lo + per);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace twistlab
