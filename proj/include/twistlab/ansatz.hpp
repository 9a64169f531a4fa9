// SPDX-License-Identifier: Apache-2.0
//
// Exponential-family ansatz built from connected excitation amplitudes.
//
// A state with vanishing order-(> k) connected amplitudes is reproduced
// exactly by the resummed series
//
//   v = v(G) sum_m nu(m) / prod_i m_i!  T_k^{m_k} ... T_1^{m_1} |G>,
//
// where T_j = sum_{|P|=|Q|=j} theta_{P,Q} Psi^dag_Q Psi_P and the parameters
// are theta_{P,Q} = v^(c)_{P,Q} sigma(G\P, P).  fit extracts the parameters
// from a state, build_state evaluates the series (truncated by operator
// nilpotency), and f_scalar evaluates the scalar model of the resummation
// factor in closed form.

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "twistlab/combi.hpp"
#include "twistlab/common.hpp"
#include "twistlab/fock.hpp"
#include "twistlab/wick.hpp"

namespace twistlab {

// Ansatz parameter set: reference determinant G, order cap k, reference
// amplitude vG, and excitation coefficients theta keyed by (holes, particles)
// in original mode labels.
struct AnsatzParams {
  int l = 0;
  int n = 0;
  int k = 0;
  ModeSet G;
  cplx vG{0.0, 0.0};
  std::map<ExcitationKey, cplx> theta;

  void validate() const {
    if (l < 1 || l > 28 || n < 0 || n > l)
      throw InvalidInputError("AnsatzParams: need 0 <= n <= l <= 28");
    if (k < 1) throw InvalidInputError("AnsatzParams: k < 1");
    if (G.size() != n) throw InvalidInputError("AnsatzParams: |G| != n");
    for (int m : G.modes())
      if (m > l) throw InvalidInputError("AnsatzParams: G mode beyond l");
    for (const auto& [key, val] : theta) {
      (void)val;
      if (key.P.size() != key.Q.size() || key.P.empty())
        throw InvalidInputError("AnsatzParams: theta key needs |P| = |Q| >= 1");
      if (key.P.size() > k)
        throw InvalidInputError("AnsatzParams: theta key order beyond k");
      if (!key.P.subset_of(G))
        throw InvalidInputError("AnsatzParams: theta holes not inside G");
      if (!(key.Q & G).empty())
        throw InvalidInputError("AnsatzParams: theta particles overlap G");
      for (int m : key.Q.modes())
        if (m > l) throw InvalidInputError("AnsatzParams: theta mode beyond l");
    }
  }
};

// Number of independent theta parameters at order cap k.
inline std::uint64_t parameter_count(int l, int n, int k) {
  if (l < 1 || n < 0 || n > l)
    throw InvalidInputError("parameter_count: need 0 <= n <= l");
  if (k < 1) throw InvalidInputError("parameter_count: k < 1");
  std::uint64_t count = 0;
  const int jmax = std::min({k, n, l - n});
  for (int j = 1; j <= jmax; ++j)
    count += binomial(n, j) * binomial(l - n, j);
  return count;
}

// ---------------------------------------------------------------------------
// Parameter file (JSON): {"l", "n", "G": [..], "k", "vG": {"re","im"},
//                         "theta": [{"P": [..], "Q": [..], "re", "im"}]}
// ---------------------------------------------------------------------------

inline nlohmann::json ansatz_to_json(const AnsatzParams& p) {
  p.validate();
  nlohmann::json th = nlohmann::json::array();
  for (const auto& [key, val] : p.theta)
    th.push_back({{"P", key.P.modes()},
                  {"Q", key.Q.modes()},
                  {"re", val.real()},
                  {"im", val.imag()}});
  return nlohmann::json{{"l", p.l},
                        {"n", p.n},
                        {"G", p.G.modes()},
                        {"k", p.k},
                        {"vG", {{"re", p.vG.real()}, {"im", p.vG.imag()}}},
                        {"theta", th}};
}

inline AnsatzParams ansatz_from_json(const nlohmann::json& j) {
  try {
    AnsatzParams p;
    p.l = j.at("l").get<int>();
    p.n = j.at("n").get<int>();
    p.k = j.at("k").get<int>();
    p.G = ModeSet(j.at("G").get<std::vector<int>>());
    p.vG = cplx(j.at("vG").at("re").get<double>(),
                j.at("vG").at("im").get<double>());
    for (const auto& entry : j.at("theta")) {
      ExcitationKey key{ModeSet(entry.at("P").get<std::vector<int>>()),
                        ModeSet(entry.at("Q").get<std::vector<int>>())};
      const cplx val(entry.at("re").get<double>(), entry.at("im").get<double>());
      if (!p.theta.emplace(key, val).second)
        throw InvalidInputError("ansatz JSON: duplicate theta key " +
                                key.P.str() + "->" + key.Q.str());
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("ansatz JSON: ") + e.what());
  }
}

inline AnsatzParams load_ansatz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open ansatz file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("malformed JSON in " + path + ": " + e.what());
  }
  return ansatz_from_json(j);
}

inline void save_ansatz(const AnsatzParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write ansatz file: " + path);
  out << ansatz_to_json(p).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Fit and build
// ---------------------------------------------------------------------------

// Extract ansatz parameters of order <= k from a state with v(G) != 0.
inline AnsatzParams fit(const StateVector& v, ModeSet G, int k) {
  if (G.size() != v.n()) throw InvalidInputError("fit: |G| != n");
  if (std::abs(v.amp(G)) <= 1e-9)
    throw ReferenceAmplitudeError("fit: reference amplitude v(G) vanishes");
  const ConnectedAmplitudes ca = connected_amplitudes(v, G, k);
  AnsatzParams p;
  p.l = v.l();
  p.n = v.n();
  p.k = k;
  p.G = G;
  p.vG = ca.vG;
  ca.for_each_connected([&](ModeSet P, ModeSet Q, cplx vc) {
    p.theta[ExcitationKey{P, Q}] = vc * static_cast<double>(sign_concat(G - P, P));
  });
  return p;
}

// Evaluate the resummed series.  The sum over block multiplicities is walked
// recursively, size by size; powers of T_j are reused across the branch, and
// a power that annihilates the current vector prunes the remaining ones
// (operator nilpotency caps the total excitation weight at min(n, l-n)).
inline StateVector build_state(const AnsatzParams& p) {
  p.validate();
  const int cap = std::min(p.n, p.l - p.n);
  const int kmax = std::min(p.k, cap);

  // The series is stated in the canonical frame; with original-label
  // operators each coefficient picks up the transport sign of its excitation.
  const detail::CanonicalFrame frame(p.l, p.G);
  std::vector<std::vector<std::pair<ExcitationKey, cplx>>> by_order(kmax + 1);
  for (const auto& [key, th] : p.theta) {
    const int j = key.P.size();
    if (j > kmax) continue;
    const double tau = frame.tau((p.G - key.P) | key.Q);
    by_order[j].emplace_back(key, tau * th);
  }

  auto T_apply = [&](const StateVector& w, int order) {
    StateVector out(p.l, p.n);
    for (const auto& [key, c] : by_order[order])
      out.amps() += c * apply_monomial(w, key.Q, key.P).amps();
    return out;
  };

  StateVector total(p.l, p.n);
  PartitionVector m(kmax, 0);
  std::function<void(int, const StateVector&)> rec = [&](int order,
                                                         const StateVector& w) {
    if (order > kmax) {
      double fact = 1.0;
      for (int c : m)
        for (int i = 2; i <= c; ++i) fact *= i;
      const double wgt = nu_double(m) / fact;
      if (wgt != 0.0) total.amps() += wgt * w.amps();
      return;
    }
    const int budget = cap - partition_weight(m);
    const int mmax = budget / order;
    StateVector cur = w;
    for (int mo = 0;; ++mo) {
      m[order - 1] = mo;
      rec(order + 1, cur);
      if (mo == mmax) break;
      cur = T_apply(cur, order);
      if (cur.amps().squaredNorm() == 0.0) break;
    }
    m[order - 1] = 0;
  };
  rec(1, basis_state(p.l, p.n, p.G));
  total.amps() *= p.vG;
  return total;
}

// ---------------------------------------------------------------------------
// Scalar resummation factor
// ---------------------------------------------------------------------------

// Closed form for the scalar model: with a'(mu) = sum_{odd o} o x_o mu^(o-1)
// and 2s(mu) = 1 + sum_{even o} 2 x_o mu^o,
//
//   F(x) = sqrt(2s(1)) exp( int_0^1 a'(mu) / 2s(mu) dmu ).
//
// Requires 2s(mu) > 0 on [0,1]; otherwise the integrand hits a pole and the
// input is rejected as singular.
inline double f_scalar(const std::vector<double>& x) {
  auto two_s = [&](double mu) {
    double s = 1.0;
    double pw = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      pw *= mu;
      if ((i + 1) % 2 == 0) s += 2.0 * x[i] * pw;
    }
    return s;
  };
  auto a_prime = [&](double mu) {
    double a = 0.0;
    double pw = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if ((i + 1) % 2 == 1) a += static_cast<double>(i + 1) * x[i] * pw;
      pw *= mu;
    }
    return a;
  };
  constexpr int kGrid = 4096;
  for (int g = 0; g <= kGrid; ++g)
    if (two_s(static_cast<double>(g) / kGrid) <= 0.0)
      throw InvalidInputError("f_scalar: singular input, 2s(mu) <= 0 on [0,1]");
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          [&](double mu) { return a_prime(mu) / two_s(mu); }, 0.0, 1.0, 12,
          1e-11);
  return std::sqrt(two_s(1.0)) * std::exp(integral);
}

}  // namespace twistlab
