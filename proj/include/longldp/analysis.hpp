// SPDX-License-Identifier: Apache-2.0
//
// Closed-form utility analysis: estimator variance, variance-optimal hash
// range, asymptotic error bound, and the protocol comparison table.
//
// Variance model: counts are treated as Binomial(n, gamma) with
//   gamma = f*(2*p1*p2 - 2*p1*q2 + 2*q2 - 1) + p2*q1 + q2*(1 - q1),
// giving V = gamma*(1 - gamma) / (n*(p1 - q1)^2*(p2 - q2)^2). At f = 0 this is
// exact; at f > 0 it is the standard approximation the protocols are tuned by.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "longldp/longitudinal.hpp"

namespace longldp {

struct VarianceInput {
  double p1, q1, p2, q2;
  std::int64_t n;
  double f;  // population frequency of the value under study
};

inline double exact_variance(const VarianceInput& in) {
  if (!(in.p1 > in.q1 && in.p2 > in.q2 && in.p1 > 0.0 && in.p1 <= 1.0 &&
        in.q1 >= 0.0 && in.p2 > 0.0 && in.p2 <= 1.0 && in.q2 >= 0.0)) {
    throw std::domain_error("exact_variance: degenerate channel");
  }
  detail::require(in.n >= 1, "exact_variance: n must be >= 1");
  detail::require(in.f >= 0.0 && in.f <= 1.0,
                  "exact_variance: f must lie in [0, 1]");
  const double gamma =
      in.f * (2.0 * in.p1 * in.p2 - 2.0 * in.p1 * in.q2 + 2.0 * in.q2 - 1.0) +
      in.p2 * in.q1 + in.q2 * (1.0 - in.q1);
  const double d1 = in.p1 - in.q1;
  const double d2 = in.p2 - in.q2;
  return gamma * (1.0 - gamma) /
         (static_cast<double>(in.n) * d1 * d1 * d2 * d2);
}

// Approximate (f = 0) variance, evaluated through the identical code path so
// the two agree bit-for-bit.
inline double approx_variance(double p1, double q1, double p2, double q2,
                              std::int64_t n) {
  return exact_variance(VarianceInput{p1, q1, p2, q2, n, 0.0});
}

inline double approx_variance(const LongitudinalParams& lp, std::int64_t n) {
  return approx_variance(lp.p1, lp.q1, lp.p2, lp.q2, n);
}

// Variance-optimal hash range (closed form, rounded to nearest integer):
//   g = 1 + max(1, round((1 - a^2 + sqrt(a^4 - 14a^2 + 12ab(1-ab) + 12a^3 b + 1))
//                        / (6(a - b))))
// with a = e^{eps_inf}, b = e^{alpha*eps_inf}. Rounding to nearest can land on
// the worse neighbor of the continuous argmin when it falls near half-integers;
// optimal_g_bruteforce is the exact oracle and cmd optimal-g reports both.
inline int optimal_g(double eps_inf, double alpha) {
  check_eps(eps_inf, "optimal_g");
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("optimal_g: alpha must lie in (0, 1)");
  }
  const double a = std::exp(eps_inf);
  const double b = std::exp(alpha * eps_inf);
  if (!(a > b)) {
    throw std::domain_error("optimal_g: requires e^{eps_inf} > e^{alpha*eps_inf}");
  }
  const double disc = a * a * a * a - 14.0 * a * a +
                      12.0 * a * b * (1.0 - a * b) + 12.0 * a * a * a * b + 1.0;
  if (!(disc >= 0.0)) {
    throw std::domain_error("optimal_g: negative discriminant");
  }
  const double x = (1.0 - a * a + std::sqrt(disc)) / (6.0 * (a - b));
  const long long rounded = std::llround(x);
  return 1 + static_cast<int>(rounded > 1 ? rounded : 1);
}

// Exact integer argmin of approx_variance over g; smallest g among ties.
// Search cap: max(500, 2*floor(e^{eps_inf})) unless overridden.
inline int optimal_g_bruteforce(double eps_inf, double alpha, int g_max = 0) {
  const PrivacyBudget budget = budget_from_alpha(eps_inf, alpha);
  if (g_max <= 0) {
    const double cap = 2.0 * std::floor(std::exp(eps_inf));
    g_max = static_cast<int>(std::max(500.0, cap));
  }
  int best_g = 2;
  double best_v = approx_variance(loloha_server_params(budget, 2), 1);
  for (int g = 3; g <= g_max; ++g) {
    const double v = approx_variance(loloha_server_params(budget, g), 1);
    if (v < best_v) {
      best_v = v;
      best_g = g;
    }
  }
  return best_g;
}

// Asymptotic max-error bound: with probability at least 1 - beta, the largest
// absolute estimation error over all k values is at most
//   sqrt(k / (4*n*beta*(p1 - q1')*(p2 - q2))).
inline double utility_bound(std::int64_t n, int k, double beta, double p1,
                            double q1_prime, double p2, double q2) {
  detail::require(n >= 1, "utility_bound: n must be >= 1");
  check_domain(k, "utility_bound");
  detail::require(beta > 0.0 && beta < 1.0,
                  "utility_bound: beta must lie in (0, 1)");
  if (!(p1 > q1_prime && p2 > q2)) {
    throw std::domain_error("utility_bound: degenerate channel");
  }
  return std::sqrt(static_cast<double>(k) /
                   (4.0 * static_cast<double>(n) * beta * (p1 - q1_prime) *
                    (p2 - q2)));
}

// dBitFlip approximate variance: b / (2*d*n*sinh(eps_inf/2)).
inline double dbit_approx_variance(int b, int d, std::int64_t n,
                                   double eps_inf) {
  detail::require(b >= 2 && d >= 1 && d <= b,
                  "dbit_approx_variance: requires 2 <= b, 1 <= d <= b");
  detail::require(n >= 1, "dbit_approx_variance: n must be >= 1");
  check_eps(eps_inf, "dbit_approx_variance");
  return static_cast<double>(b) /
         (2.0 * d * static_cast<double>(n) * std::sinh(eps_inf / 2.0));
}

// ---------------------------------------------------------------------------
// Protocol comparison table.
// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::string protocol;
  int comm_bits;                 // bits per user per time step
  std::string server_time;       // aggregation complexity
  int privacy_cap_multiplier;    // worst-case ledger, in units of eps_inf
};

inline int ceil_log2(int x) {
  detail::require(x >= 1, "ceil_log2: requires x >= 1");
  return x == 1 ? 0 : static_cast<int>(std::bit_width(
                          static_cast<unsigned>(x - 1)));
}

inline std::vector<ComparisonRow> comparison_table(int k, int g, int b, int d) {
  check_domain(k, "comparison_table");
  detail::require(g >= 2, "comparison_table: g must be >= 2");
  detail::require(b >= 2 && b <= k && d >= 1 && d <= b,
                  "comparison_table: requires 2 <= b <= k, 1 <= d <= b");
  return {
      {"LOLOHA", ceil_log2(g), "n*k", g},
      {"L-GRR", ceil_log2(k), "n", k},
      {"RAPPOR", k, "n*k", k},
      {"L-OSUE", k, "n*k", k},
      {"dBitFlipPM", d, "n*b", std::min(d + 1, b)},
  };
}

}  // namespace longldp
