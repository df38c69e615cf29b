// SPDX-License-Identifier: Apache-2.0
//
// Longitudinal (memoizing) clients. Each client chains a permanent
// randomized-response round (PRR, memoized once per input class, longitudinal
// budget eps_inf) with an instantaneous round (IRR, fresh per report) tuned so
// the first report satisfies the eps_1 guarantee. dBitFlip is the exception:
// it is single-round, emitting memoized bits directly.
//
// Longitudinal privacy accounting: every client owns a PrivacyLedger that
// records the distinct memoized input classes; the accumulated loss is
// (number of distinct classes) * eps_inf.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "longldp/core.hpp"
#include "longldp/rng.hpp"

namespace longldp {

// ---------------------------------------------------------------------------
// Budgets.
// ---------------------------------------------------------------------------

struct PrivacyBudget {
  double eps_inf;  // longitudinal cap per memoized class
  double eps_1;    // first-report guarantee, 0 < eps_1 < eps_inf

  double alpha() const { return eps_1 / eps_inf; }
};

inline void check_budget(const PrivacyBudget& b, const char* who) {
  check_eps(b.eps_inf, who);
  if (!(std::isfinite(b.eps_1) && b.eps_1 > 0.0 && b.eps_1 < b.eps_inf)) {
    throw std::domain_error(std::string(who) +
                            ": infeasible budget, requires 0 < eps_1 < eps_inf");
  }
}

inline PrivacyBudget make_budget(double eps_inf, double eps_1) {
  PrivacyBudget b{eps_inf, eps_1};
  check_budget(b, "make_budget");
  return b;
}

inline PrivacyBudget budget_from_alpha(double eps_inf, double alpha) {
  check_eps(eps_inf, "budget_from_alpha");
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("budget_from_alpha: alpha must lie in (0, 1)");
  }
  return make_budget(eps_inf, alpha * eps_inf);
}

// IRR budget for a GRR/hashing chain:
//   eps_irr = ln((e^{eps_inf + eps_1} - 1) / (e^{eps_inf} - e^{eps_1})).
inline double derive_eps_irr(double eps_inf, double eps_1) {
  check_budget(PrivacyBudget{eps_inf, eps_1}, "derive_eps_irr");
  const double num = std::exp(eps_inf + eps_1) - 1.0;
  const double den = std::exp(eps_inf) - std::exp(eps_1);
  return std::log(num / den);
}

// ---------------------------------------------------------------------------
// Two-round channel parameters (server-side view).
//
// p1/q1 describe the permanent round, p2/q2 the instantaneous round. The
// estimator inverts the composition; see estimate_longitudinal.
// ---------------------------------------------------------------------------

struct LongitudinalParams {
  double p1, q1, p2, q2;
};

// Local-hashing protocol, server parameterization: the server treats the
// permanent round as GRR over the hash range with p1 = a/(a+g-1) and
// q1' = 1/g (a non-matching value supports a report with probability exactly
// 1/g over the hash draw, regardless of the permanent perturbation).
inline LongitudinalParams loloha_server_params(const PrivacyBudget& b, int g) {
  detail::require(g >= 2, "loloha_server_params: g must be >= 2");
  check_budget(b, "loloha_server_params");
  const double a = std::exp(b.eps_inf);
  const double r = std::exp(derive_eps_irr(b.eps_inf, b.eps_1));
  return LongitudinalParams{a / (a + g - 1), 1.0 / g, r / (r + g - 1),
                            1.0 / (r + g - 1)};
}

struct IrrParams {
  double p2, q2;
};

// Symmetric-UE chain (both rounds SUE-style):
//   p1 = e^{eps_inf/2}/(e^{eps_inf/2}+1), and p2 solves
//   p_s = p1*p2 + (1-p1)*(1-p2) with p_s = e^{eps_1/2}/(e^{eps_1/2}+1).
inline IrrParams lsue_derive_irr(double eps_inf, double eps_1) {
  check_budget(PrivacyBudget{eps_inf, eps_1}, "lsue_derive_irr");
  const double s1 = std::exp(eps_inf / 2.0);
  const double p1 = s1 / (s1 + 1.0);
  const double q1 = 1.0 - p1;
  const double s2 = std::exp(eps_1 / 2.0);
  const double ps = s2 / (s2 + 1.0);
  const double p2 = (ps - q1) / (p1 - q1);
  if (!(p2 > 0.5 && p2 <= 1.0)) {
    throw std::domain_error("lsue_derive_irr: infeasible budget (p2 out of (0.5, 1])");
  }
  return IrrParams{p2, 1.0 - p2};
}

inline LongitudinalParams lsue_params(const PrivacyBudget& b) {
  const double s1 = std::exp(b.eps_inf / 2.0);
  const double p1 = s1 / (s1 + 1.0);
  const IrrParams irr = lsue_derive_irr(b.eps_inf, b.eps_1);
  return LongitudinalParams{p1, 1.0 - p1, irr.p2, irr.q2};
}

// Optimized-then-symmetric UE chain (OUE permanent round, symmetric
// instantaneous round): p2 = (a*c - 1) / ((a - 1)*(c + 1)) with a = e^{eps_inf},
// c = e^{eps_1}.
inline IrrParams losue_derive_irr(double eps_inf, double eps_1) {
  check_budget(PrivacyBudget{eps_inf, eps_1}, "losue_derive_irr");
  const double a = std::exp(eps_inf);
  const double c = std::exp(eps_1);
  const double p2 = (a * c - 1.0) / ((a - 1.0) * (c + 1.0));
  if (!(p2 > 0.5 && p2 <= 1.0)) {
    throw std::domain_error("losue_derive_irr: infeasible budget (p2 out of (0.5, 1])");
  }
  return IrrParams{p2, 1.0 - p2};
}

inline LongitudinalParams losue_params(const PrivacyBudget& b) {
  const double a = std::exp(b.eps_inf);
  const IrrParams irr = losue_derive_irr(b.eps_inf, b.eps_1);
  return LongitudinalParams{0.5, 1.0 / (a + 1.0), irr.p2, irr.q2};
}

// GRR chain over the full k-ary domain:
//   p2 = (a*c - 1) / (-k*c + (k-1)*a + c + a*c - 1), q2 = (1-p2)/(k-1).
inline IrrParams lgrr_derive_irr(double eps_inf, double eps_1, int k) {
  check_budget(PrivacyBudget{eps_inf, eps_1}, "lgrr_derive_irr");
  check_domain(k, "lgrr_derive_irr");
  const double a = std::exp(eps_inf);
  const double c = std::exp(eps_1);
  const double den = -k * c + (k - 1.0) * a + c + a * c - 1.0;
  if (!(den > 0.0)) {
    throw std::domain_error("lgrr_derive_irr: infeasible budget (degenerate chain)");
  }
  const double p2 = (a * c - 1.0) / den;
  if (!(p2 > 1.0 / k && p2 <= 1.0)) {
    throw std::domain_error("lgrr_derive_irr: infeasible budget (p2 out of (1/k, 1])");
  }
  return IrrParams{p2, (1.0 - p2) / (k - 1.0)};
}

inline LongitudinalParams lgrr_params(const PrivacyBudget& b, int k) {
  const GrrParams prr = grr_params(b.eps_inf, k);
  const IrrParams irr = lgrr_derive_irr(b.eps_inf, b.eps_1, k);
  return LongitudinalParams{prr.p, prr.q, irr.p2, irr.q2};
}

// ---------------------------------------------------------------------------
// Privacy ledger.
// ---------------------------------------------------------------------------

class PrivacyLedger {
 public:
  PrivacyLedger() = default;
  explicit PrivacyLedger(double eps_inf) : eps_inf_(eps_inf) {}

  void record(int memo_class) { classes_.insert(memo_class); }

  int distinct() const { return static_cast<int>(classes_.size()); }

  // Accumulated longitudinal loss: one eps_inf per distinct memoized class.
  double accumulated() const { return distinct() * eps_inf_; }

  double eps_inf() const { return eps_inf_; }
  const std::set<int>& classes() const { return classes_; }

  void restore(double eps_inf, const std::set<int>& classes) {
    eps_inf_ = eps_inf;
    classes_ = classes;
  }

 private:
  double eps_inf_ = 0.0;
  std::set<int> classes_;
};

// ---------------------------------------------------------------------------
// Local-hashing client. Memo key: hash cell x in {1..g}.
// ---------------------------------------------------------------------------

class LolohaClient {
 public:
  static LolohaClient init(const PrivacyBudget& budget, int k, int g,
                           Rng& rng) {
    check_budget(budget, "LolohaClient::init");
    check_domain(k, "LolohaClient::init");
    detail::require(g >= 2, "LolohaClient::init: g must be >= 2");
    LolohaClient c;
    c.budget_ = budget;
    c.k_ = k;
    c.g_ = g;
    c.hash_ = hash_sample(k, g, rng);
    const double a = std::exp(budget.eps_inf);
    c.prr_keep_ = a / (a + g - 1);
    const double r = std::exp(derive_eps_irr(budget.eps_inf, budget.eps_1));
    c.irr_keep_ = r / (r + g - 1);
    c.ledger_ = PrivacyLedger(budget.eps_inf);
    return c;
  }

  // Hash, memoize the permanent perturbation of the hash cell, then apply the
  // fresh instantaneous round. Output lies in {1..g}.
  int report(int v, Rng& rng) {
    const int x = hash_eval(hash_, v);
    auto it = memo_.find(x);
    if (it == memo_.end()) {
      const int xp = grr_perturb_keep(x, g_, prr_keep_, rng);
      it = memo_.emplace(x, xp).first;
      ledger_.record(x);
    }
    return grr_perturb_keep(it->second, g_, irr_keep_, rng);
  }

  const PrivacyBudget& budget() const { return budget_; }
  int k() const { return k_; }
  int g() const { return g_; }
  const SeededHash& hash() const { return hash_; }
  double prr_keep() const { return prr_keep_; }
  double irr_keep() const { return irr_keep_; }
  const std::map<int, int>& memo() const { return memo_; }
  const PrivacyLedger& ledger() const { return ledger_; }

  // For deserialization.
  void restore(const PrivacyBudget& budget, int k, int g, SeededHash hash,
               const std::map<int, int>& memo, const std::set<int>& classes) {
    *this = init_restored(budget, k, g, hash);
    memo_ = memo;
    ledger_.restore(budget.eps_inf, classes);
  }

 private:
  static LolohaClient init_restored(const PrivacyBudget& budget, int k, int g,
                                    SeededHash hash) {
    LolohaClient c;
    c.budget_ = budget;
    c.k_ = k;
    c.g_ = g;
    c.hash_ = hash;
    const double a = std::exp(budget.eps_inf);
    c.prr_keep_ = a / (a + g - 1);
    const double r = std::exp(derive_eps_irr(budget.eps_inf, budget.eps_1));
    c.irr_keep_ = r / (r + g - 1);
    c.ledger_ = PrivacyLedger(budget.eps_inf);
    return c;
  }

  PrivacyBudget budget_{1.0, 0.5};
  int k_ = 2;
  int g_ = 2;
  SeededHash hash_{0, 2, 2};
  double prr_keep_ = 0.0;
  double irr_keep_ = 0.0;
  std::map<int, int> memo_;
  PrivacyLedger ledger_;
};

inline LolohaClient loloha_init(const PrivacyBudget& budget, int k, int g,
                                Rng& rng) {
  return LolohaClient::init(budget, k, g, rng);
}

inline int loloha_report(LolohaClient& client, int v, Rng& rng) {
  return client.report(v, rng);
}

// ---------------------------------------------------------------------------
// Unary-encoding client (symmetric or optimized permanent round).
// Memo key: the value v itself.
// ---------------------------------------------------------------------------

enum class UeLongFlavor { kLsue, kLosue };

inline const char* to_string(UeLongFlavor f) {
  return f == UeLongFlavor::kLsue ? "lsue" : "losue";
}

class UeLongClient {
 public:
  static UeLongClient init(const PrivacyBudget& budget, int k,
                           UeLongFlavor flavor) {
    check_budget(budget, "UeLongClient::init");
    check_domain(k, "UeLongClient::init");
    UeLongClient c;
    c.budget_ = budget;
    c.k_ = k;
    c.flavor_ = flavor;
    if (flavor == UeLongFlavor::kLsue) {
      c.round1_ = ue_params(budget.eps_inf, k, UeFlavor::kSymmetric);
      c.round2_ = lsue_derive_irr(budget.eps_inf, budget.eps_1);
    } else {
      c.round1_ = ue_params(budget.eps_inf, k, UeFlavor::kOptimized);
      c.round2_ = losue_derive_irr(budget.eps_inf, budget.eps_1);
    }
    c.ledger_ = PrivacyLedger(budget.eps_inf);
    return c;
  }

  Bits report(int v, Rng& rng) {
    auto it = memo_.find(v);
    if (it == memo_.end()) {
      const Bits permanent = ue_perturb(ue_encode(v, k_), round1_, rng);
      it = memo_.emplace(v, permanent).first;
      ledger_.record(v);
    }
    return ue_perturb_pq(it->second, round2_.p2, round2_.q2, rng);
  }

  const PrivacyBudget& budget() const { return budget_; }
  int k() const { return k_; }
  UeLongFlavor flavor() const { return flavor_; }
  const UeParams& round1() const { return round1_; }
  const IrrParams& round2() const { return round2_; }
  const std::map<int, Bits>& memo() const { return memo_; }
  const PrivacyLedger& ledger() const { return ledger_; }

  void restore(const PrivacyBudget& budget, int k, UeLongFlavor flavor,
               const std::map<int, Bits>& memo, const std::set<int>& classes) {
    *this = init(budget, k, flavor);
    memo_ = memo;
    ledger_.restore(budget.eps_inf, classes);
  }

 private:
  PrivacyBudget budget_{1.0, 0.5};
  int k_ = 2;
  UeLongFlavor flavor_ = UeLongFlavor::kLsue;
  UeParams round1_{2, 0.0, 0.0, UeFlavor::kSymmetric};
  IrrParams round2_{0.0, 0.0};
  std::map<int, Bits> memo_;
  PrivacyLedger ledger_;
};

inline Bits ue_long_report(UeLongClient& client, int v, Rng& rng) {
  return client.report(v, rng);
}

// ---------------------------------------------------------------------------
// GRR chain client. Memo key: the value v itself.
// ---------------------------------------------------------------------------

class LgrrClient {
 public:
  static LgrrClient init(const PrivacyBudget& budget, int k) {
    check_budget(budget, "LgrrClient::init");
    check_domain(k, "LgrrClient::init");
    LgrrClient c;
    c.budget_ = budget;
    c.k_ = k;
    c.prr_ = grr_params(budget.eps_inf, k);
    c.irr_ = lgrr_derive_irr(budget.eps_inf, budget.eps_1, k);
    c.ledger_ = PrivacyLedger(budget.eps_inf);
    return c;
  }

  int report(int v, Rng& rng) {
    auto it = memo_.find(v);
    if (it == memo_.end()) {
      const int vp = grr_perturb(v, prr_, rng);
      it = memo_.emplace(v, vp).first;
      ledger_.record(v);
    }
    return grr_perturb_keep(it->second, k_, irr_.p2, rng);
  }

  const PrivacyBudget& budget() const { return budget_; }
  int k() const { return k_; }
  const GrrParams& prr() const { return prr_; }
  const IrrParams& irr() const { return irr_; }
  const std::map<int, int>& memo() const { return memo_; }
  const PrivacyLedger& ledger() const { return ledger_; }

  void restore(const PrivacyBudget& budget, int k,
               const std::map<int, int>& memo, const std::set<int>& classes) {
    *this = init(budget, k);
    memo_ = memo;
    ledger_.restore(budget.eps_inf, classes);
  }

 private:
  PrivacyBudget budget_{1.0, 0.5};
  int k_ = 2;
  GrrParams prr_{2, 0.0, 0.0};
  IrrParams irr_{0.0, 0.0};
  std::map<int, int> memo_;
  PrivacyLedger ledger_;
};

inline int lgrr_report(LgrrClient& client, int v, Rng& rng) {
  return client.report(v, rng);
}

// ---------------------------------------------------------------------------
// dBitFlip client: single-round, bucketized, d-of-b sampled memoized bits.
//
// Memo classes collapse: each sampled bucket is its own class; all unsampled
// buckets share one class (id 0), because their encodings restricted to the
// sampled positions are identical (all zeros). Ledger capacity is therefore
// min(d + 1, b).
// ---------------------------------------------------------------------------

inline int bucketize(int v, int k, int b) {
  check_domain(k, "bucketize");
  detail::require(b >= 1 && b <= k, "bucketize: requires 1 <= b <= k");
  check_value(v, k, "bucketize");
  return 1 + static_cast<int>((static_cast<std::int64_t>(v - 1) * b) / k);
}

class DBitClient {
 public:
  static DBitClient init(int k, int b, int d, double eps_inf, Rng& rng) {
    check_domain(k, "DBitClient::init");
    detail::require(b >= 2 && b <= k, "DBitClient::init: requires 2 <= b <= k");
    detail::require(d >= 1 && d <= b, "DBitClient::init: requires 1 <= d <= b");
    check_eps(eps_inf, "DBitClient::init");
    DBitClient c;
    c.k_ = k;
    c.b_ = b;
    c.d_ = d;
    c.eps_inf_ = eps_inf;
    c.bit_params_ = ue_params(eps_inf, b, UeFlavor::kSymmetric);
    // d distinct bucket indices via partial Fisher-Yates, then sorted.
    std::vector<int> pool(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
    for (int i = 0; i < d; ++i) {
      const int j = i + static_cast<int>(rng.uniform_int(0, b - 1 - i));
      std::swap(pool[static_cast<std::size_t>(i)],
                pool[static_cast<std::size_t>(j)]);
    }
    c.sampled_.assign(pool.begin(), pool.begin() + d);
    std::sort(c.sampled_.begin(), c.sampled_.end());
    c.ledger_ = PrivacyLedger(eps_inf);
    return c;
  }

  // Memo class for a value: its bucket if sampled, else the shared class 0.
  int memo_class(int v) const {
    const int j = bucketize(v, k_, b_);
    return std::binary_search(sampled_.begin(), sampled_.end(), j) ? j : 0;
  }

  // Single round: first visit to a class draws its d memoized bits
  // (SUE-perturbed one-hot restricted to the sampled positions); every
  // subsequent report of that class re-emits the identical vector.
  const Bits& report(int v, Rng& rng) {
    const int cls = memo_class(v);
    auto it = memo_.find(cls);
    if (it == memo_.end()) {
      Bits bits(static_cast<std::size_t>(d_));
      for (int l = 0; l < d_; ++l) {
        const bool truth = sampled_[static_cast<std::size_t>(l)] == cls;
        bits[static_cast<std::size_t>(l)] =
            rng.bernoulli(truth ? bit_params_.p : bit_params_.q) ? 1 : 0;
      }
      it = memo_.emplace(cls, std::move(bits)).first;
      ledger_.record(cls);
    }
    return it->second;
  }

  int k() const { return k_; }
  int b() const { return b_; }
  int d() const { return d_; }
  double eps_inf() const { return eps_inf_; }
  const UeParams& bit_params() const { return bit_params_; }
  const std::vector<int>& sampled_indices() const { return sampled_; }
  const std::map<int, Bits>& memo() const { return memo_; }
  const PrivacyLedger& ledger() const { return ledger_; }

  void restore(int k, int b, int d, double eps_inf,
               const std::vector<int>& sampled, const std::map<int, Bits>& memo,
               const std::set<int>& classes) {
    k_ = k;
    b_ = b;
    d_ = d;
    eps_inf_ = eps_inf;
    bit_params_ = ue_params(eps_inf, b, UeFlavor::kSymmetric);
    sampled_ = sampled;
    memo_ = memo;
    ledger_ = PrivacyLedger(eps_inf);
    ledger_.restore(eps_inf, classes);
  }

 private:
  int k_ = 2;
  int b_ = 2;
  int d_ = 1;
  double eps_inf_ = 1.0;
  UeParams bit_params_{2, 0.0, 0.0, UeFlavor::kSymmetric};
  std::vector<int> sampled_;
  std::map<int, Bits> memo_;
  PrivacyLedger ledger_;
};

inline DBitClient dbit_init(int k, int b, int d, double eps_inf, Rng& rng) {
  return DBitClient::init(k, b, d, eps_inf, rng);
}

inline const Bits& dbit_report(DBitClient& client, int v, Rng& rng) {
  return client.report(v, rng);
}

}  // namespace longldp
