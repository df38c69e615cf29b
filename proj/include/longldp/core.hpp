// SPDX-License-Identifier: Apache-2.0
//
// One-shot frequency-oracle building blocks: generalized randomized response
// (GRR), unary encoding (UE, symmetric and optimized flavors), a seeded
// universal hash family for local hashing, and the pure (unbiased, unclipped)
// frequency estimator.
//
// Domain convention: categorical values live in {1..k} after ingestion.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "longldp/rng.hpp"

namespace longldp {

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

inline void check_eps(double eps, const char* who) {
  detail::require(std::isfinite(eps) && eps > 0.0,
                  std::string(who) + ": privacy budget must be finite and > 0");
}

inline void check_domain(int k, const char* who) {
  detail::require(k >= 2, std::string(who) + ": domain size must be >= 2");
}

inline void check_value(int v, int k, const char* who) {
  detail::require(v >= 1 && v <= k,
                  std::string(who) + ": value out of domain [1, k]");
}

// ---------------------------------------------------------------------------
// Generalized randomized response.
// ---------------------------------------------------------------------------

struct GrrParams {
  int domain_size;
  double p;  // probability of reporting the true value
  double q;  // probability of reporting any specific other value
};

// p = e^eps / (e^eps + k - 1), q = (1 - p) / (k - 1).
inline GrrParams grr_params(double eps, int k) {
  check_eps(eps, "grr_params");
  check_domain(k, "grr_params");
  const double a = std::exp(eps);
  const double p = a / (a + k - 1);
  return GrrParams{k, p, (1.0 - p) / (k - 1)};
}

// GRR with an explicit keep-probability (the chained longitudinal rounds
// need keep-probabilities that do not come from a single budget).
inline int grr_perturb_keep(int v, int k, double keep, Rng& rng) {
  check_domain(k, "grr_perturb_keep");
  check_value(v, k, "grr_perturb_keep");
  detail::require(keep > 0.0 && keep <= 1.0,
                  "grr_perturb_keep: keep probability out of (0, 1]");
  if (rng.bernoulli(keep)) return v;
  // Uniform over the k-1 values other than v.
  const int r = static_cast<int>(rng.uniform_int(1, k - 1));
  return r < v ? r : r + 1;
}

inline int grr_perturb(int v, const GrrParams& params, Rng& rng) {
  return grr_perturb_keep(v, params.domain_size, params.p, rng);
}

// ---------------------------------------------------------------------------
// Unary encoding.
// ---------------------------------------------------------------------------

enum class UeFlavor {
  kSymmetric,  // SUE: p = e^{eps/2}/(e^{eps/2}+1), q = 1-p
  kOptimized,  // OUE: p = 1/2, q = 1/(e^eps+1)
};

struct UeParams {
  int domain_size;
  double p;  // probability a set bit stays set
  double q;  // probability a clear bit flips to set
  UeFlavor flavor;
};

inline UeParams ue_params(double eps, int k, UeFlavor flavor) {
  check_eps(eps, "ue_params");
  check_domain(k, "ue_params");
  if (flavor == UeFlavor::kSymmetric) {
    const double s = std::exp(eps / 2.0);
    const double p = s / (s + 1.0);
    return UeParams{k, p, 1.0 - p, flavor};
  }
  return UeParams{k, 0.5, 1.0 / (std::exp(eps) + 1.0), flavor};
}

using Bits = std::vector<std::uint8_t>;

inline Bits ue_encode(int v, int k) {
  check_domain(k, "ue_encode");
  check_value(v, k, "ue_encode");
  Bits bits(static_cast<std::size_t>(k), 0);
  bits[static_cast<std::size_t>(v - 1)] = 1;
  return bits;
}

// Independent per-bit perturbation with explicit (p, q).
inline Bits ue_perturb_pq(const Bits& bits, double p, double q, Rng& rng) {
  Bits out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i] = rng.bernoulli(bits[i] ? p : q) ? 1 : 0;
  }
  return out;
}

inline Bits ue_perturb(const Bits& bits, const UeParams& params, Rng& rng) {
  detail::require(bits.size() == static_cast<std::size_t>(params.domain_size),
                  "ue_perturb: bit-vector length != domain size");
  return ue_perturb_pq(bits, params.p, params.q, rng);
}

// ---------------------------------------------------------------------------
// Seeded universal hash family (multiply-add over the prime 2^61 - 1).
//
// H(v) = 1 + (((a*v + b) mod P) mod g), with (a, b) derived deterministically
// from a single opaque 64-bit seed. Distinct inputs collide with probability
// ~ 1/g over the seed draw, which is all local hashing requires.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kHashPrime = (1ull << 61) - 1;

struct SeededHash {
  std::uint64_t seed;
  int k;  // input domain {1..k}
  int g;  // output range {1..g}
};

inline SeededHash hash_sample(int k, int g, Rng& rng) {
  check_domain(k, "hash_sample");
  detail::require(g >= 2, "hash_sample: hash range must be >= 2");
  return SeededHash{rng.next_u64(), k, g};
}

inline int hash_eval(const SeededHash& h, int v) {
  check_value(v, h.k, "hash_eval");
  const std::uint64_t a = 1 + seed_combine(h.seed, 1) % (kHashPrime - 1);
  const std::uint64_t b = seed_combine(h.seed, 2) % kHashPrime;
  const unsigned __int128 t =
      static_cast<unsigned __int128>(a) * static_cast<std::uint64_t>(v) + b;
  const std::uint64_t m = static_cast<std::uint64_t>(t % kHashPrime);
  return 1 + static_cast<int>(m % static_cast<std::uint64_t>(h.g));
}

// ---------------------------------------------------------------------------
// Pure frequency estimator.
// ---------------------------------------------------------------------------

struct CountVector {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;  // number of reports aggregated
};

// f_hat(v) = (C(v) - n*q) / (n*(p - q)), unclipped. The real-valued overload
// exists so algebraic (expected-count) identities can be tested exactly.
inline std::vector<double> estimate_pure(const std::vector<double>& counts,
                                         double n, double p, double q) {
  detail::require(n > 0, "estimate_pure: n must be positive");
  detail::require(p > q, "estimate_pure: requires p > q");
  std::vector<double> f(counts.size());
  const double denom = n * (p - q);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[i] = (counts[i] - n * q) / denom;
  }
  return f;
}

inline std::vector<double> estimate_pure(const CountVector& cv, double p,
                                         double q) {
  std::vector<double> counts(cv.counts.begin(), cv.counts.end());
  return estimate_pure(counts, static_cast<double>(cv.n), p, q);
}

}  // namespace longldp
