// SPDX-License-Identifier: Apache-2.0
//
// Server-side aggregation and estimation for the longitudinal protocols.
//
// The longitudinal estimator inverts the two-round channel:
//   f_hat(v) = (C(v) - n*q1*(p2 - q2) - n*q2) / (n*(p1 - q1)*(p2 - q2)),
// applied per time step to per-step counts (support counts for local hashing,
// bit counts for unary encoding, value counts for GRR). Estimates are
// unclipped; clipping to [0, 1] is optional post-processing (clip01).

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "longldp/core.hpp"
#include "longldp/longitudinal.hpp"

namespace longldp {

struct EstimateMatrix {
  int tau = 0;
  int k = 0;
  // values[t][v-1] for t in 0..tau-1.
  std::vector<std::vector<double>> values;
};

inline void check_channel(const LongitudinalParams& lp, const char* who) {
  if (!(lp.p1 > lp.q1 && lp.p2 > lp.q2)) {
    throw std::domain_error(std::string(who) + ": degenerate channel (requires p1 > q1, p2 > q2)");
  }
}

// Real-valued overload so expected-count algebra can be verified exactly.
inline std::vector<double> estimate_longitudinal(
    const std::vector<double>& counts, double n,
    const LongitudinalParams& lp) {
  check_channel(lp, "estimate_longitudinal");
  detail::require(n > 0, "estimate_longitudinal: n must be positive");
  const double offset = lp.q1 * (lp.p2 - lp.q2) + lp.q2;
  const double denom = (lp.p1 - lp.q1) * (lp.p2 - lp.q2);
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[i] = (counts[i] - n * offset) / (n * denom);
  }
  return f;
}

inline std::vector<double> estimate_longitudinal(const CountVector& cv,
                                                 const LongitudinalParams& lp) {
  std::vector<double> counts(cv.counts.begin(), cv.counts.end());
  return estimate_longitudinal(counts, static_cast<double>(cv.n), lp);
}

// ---------------------------------------------------------------------------
// Report batches (one per protocol family) and their estimators.
// reports[t][u] indexes time step t (0-based) and user u.
// ---------------------------------------------------------------------------

struct LolohaBatch {
  int k = 0;
  int g = 0;
  PrivacyBudget budget{1.0, 0.5};
  std::vector<std::uint64_t> hash_seeds;       // one per user
  std::vector<std::vector<int>> reports;       // [t][u], values in {1..g}
};

struct UeBatch {
  int k = 0;
  UeLongFlavor flavor = UeLongFlavor::kLsue;
  PrivacyBudget budget{1.0, 0.5};
  std::vector<std::vector<Bits>> reports;      // [t][u], k bits each
};

struct LgrrBatch {
  int k = 0;
  PrivacyBudget budget{1.0, 0.5};
  std::vector<std::vector<int>> reports;       // [t][u], values in {1..k}
};

struct DbitBatch {
  int k = 0;
  int b = 0;
  int d = 0;
  double eps_inf = 1.0;
  std::vector<std::vector<int>> sampled;       // [u], d sorted bucket indices
  std::vector<std::vector<Bits>> reports;      // [t][u], d bits each
};

using ReportBatch = std::variant<LolohaBatch, UeBatch, LgrrBatch, DbitBatch>;

// Support counting: C(v) = #{users u : H_u(v) == report_u}. Hashes are
// recomputed from the per-user seeds; the server stores no lookup tables.
inline CountVector loloha_support_counts(
    const std::vector<std::uint64_t>& hash_seeds, int k, int g,
    const std::vector<int>& reports_at_t) {
  detail::require(hash_seeds.size() == reports_at_t.size(),
                  "loloha_support_counts: seeds/reports size mismatch");
  CountVector cv;
  cv.counts.assign(static_cast<std::size_t>(k), 0);
  cv.n = static_cast<std::int64_t>(reports_at_t.size());
  for (std::size_t u = 0; u < reports_at_t.size(); ++u) {
    const SeededHash h{hash_seeds[u], k, g};
    const int r = reports_at_t[u];
    detail::require(r >= 1 && r <= g,
                    "loloha_support_counts: report out of {1..g}");
    for (int v = 1; v <= k; ++v) {
      if (hash_eval(h, v) == r) ++cv.counts[static_cast<std::size_t>(v - 1)];
    }
  }
  return cv;
}

inline EstimateMatrix loloha_estimate(const LolohaBatch& batch) {
  const LongitudinalParams lp = loloha_server_params(batch.budget, batch.g);
  EstimateMatrix est;
  est.tau = static_cast<int>(batch.reports.size());
  est.k = batch.k;
  est.values.reserve(batch.reports.size());
  for (const auto& step : batch.reports) {
    const CountVector cv =
        loloha_support_counts(batch.hash_seeds, batch.k, batch.g, step);
    est.values.push_back(estimate_longitudinal(cv, lp));
  }
  return est;
}

inline EstimateMatrix ue_longitudinal_estimate(const UeBatch& batch) {
  const LongitudinalParams lp = batch.flavor == UeLongFlavor::kLsue
                                    ? lsue_params(batch.budget)
                                    : losue_params(batch.budget);
  EstimateMatrix est;
  est.tau = static_cast<int>(batch.reports.size());
  est.k = batch.k;
  est.values.reserve(batch.reports.size());
  for (const auto& step : batch.reports) {
    CountVector cv;
    cv.counts.assign(static_cast<std::size_t>(batch.k), 0);
    cv.n = static_cast<std::int64_t>(step.size());
    for (const Bits& bits : step) {
      detail::require(bits.size() == static_cast<std::size_t>(batch.k),
                      "ue_longitudinal_estimate: report length != k");
      for (int v = 0; v < batch.k; ++v) {
        cv.counts[static_cast<std::size_t>(v)] += bits[static_cast<std::size_t>(v)];
      }
    }
    est.values.push_back(estimate_longitudinal(cv, lp));
  }
  return est;
}

inline EstimateMatrix lgrr_estimate(const LgrrBatch& batch) {
  const LongitudinalParams lp = lgrr_params(batch.budget, batch.k);
  EstimateMatrix est;
  est.tau = static_cast<int>(batch.reports.size());
  est.k = batch.k;
  est.values.reserve(batch.reports.size());
  for (const auto& step : batch.reports) {
    CountVector cv;
    cv.counts.assign(static_cast<std::size_t>(batch.k), 0);
    cv.n = static_cast<std::int64_t>(step.size());
    for (const int r : step) {
      detail::require(r >= 1 && r <= batch.k,
                      "lgrr_estimate: report out of {1..k}");
      ++cv.counts[static_cast<std::size_t>(r - 1)];
    }
    est.values.push_back(estimate_longitudinal(cv, lp));
  }
  return est;
}

// dBitFlip estimator over b buckets: each bucket is observed by the users that
// sampled it (n*d/b in expectation), so the pure estimator runs with the
// effective report count n_eff = n*d/b and SUE(eps_inf) bit parameters.
inline EstimateMatrix dbit_estimate(const DbitBatch& batch) {
  const UeParams sue = ue_params(batch.eps_inf, batch.b, UeFlavor::kSymmetric);
  EstimateMatrix est;
  est.tau = static_cast<int>(batch.reports.size());
  est.k = batch.b;
  est.values.reserve(batch.reports.size());
  for (const auto& step : batch.reports) {
    detail::require(step.size() == batch.sampled.size(),
                    "dbit_estimate: reports/sampled size mismatch");
    std::vector<double> counts(static_cast<std::size_t>(batch.b), 0.0);
    for (std::size_t u = 0; u < step.size(); ++u) {
      const auto& sampled = batch.sampled[u];
      const Bits& bits = step[u];
      detail::require(bits.size() == sampled.size() &&
                          static_cast<int>(bits.size()) == batch.d,
                      "dbit_estimate: report length != d");
      for (std::size_t l = 0; l < sampled.size(); ++l) {
        if (bits[l]) counts[static_cast<std::size_t>(sampled[l] - 1)] += 1.0;
      }
    }
    const double n_eff = static_cast<double>(step.size()) * batch.d / batch.b;
    est.values.push_back(estimate_pure(counts, n_eff, sue.p, sue.q));
  }
  return est;
}

inline EstimateMatrix estimate_batch(const ReportBatch& batch) {
  return std::visit(
      [](const auto& b) -> EstimateMatrix {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, LolohaBatch>) return loloha_estimate(b);
        if constexpr (std::is_same_v<T, UeBatch>) return ue_longitudinal_estimate(b);
        if constexpr (std::is_same_v<T, LgrrBatch>) return lgrr_estimate(b);
        if constexpr (std::is_same_v<T, DbitBatch>) return dbit_estimate(b);
      },
      batch);
}

// Post-processing only: clamp each entry to [0, 1], then renormalize each
// step to sum to 1 (when the clamped sum is positive). Never applied by the
// estimators themselves.
inline void clip01(EstimateMatrix& est) {
  for (auto& row : est.values) {
    double sum = 0.0;
    for (double& x : row) {
      if (x < 0.0) x = 0.0;
      if (x > 1.0) x = 1.0;
      sum += x;
    }
    if (sum > 0.0) {
      for (double& x : row) x /= sum;
    }
  }
}

}  // namespace longldp
