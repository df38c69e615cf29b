// SPDX-License-Identifier: Apache-2.0
//
// Tests for the memoizing clients: budget handling, derived instantaneous
// round parameters, composite-channel privacy properties, memoization
// behavior, the privacy ledger, and the bucketized d-bit client.

#include "longldp/longitudinal.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "longldp/core.hpp"
#include "longldp/rng.hpp"

namespace longldp {
namespace {

constexpr double kTight = 1e-12;

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}

// Full two-round channel on the hash-cell domain {1..g}: permanent round with
// keep probability a/(a+g-1), instantaneous round with keep r/(r+g-1); the
// table below is max_{y, x != x'} P(y|x) / P(y|x').
double loloha_composite_max_ratio(const PrivacyBudget& b, int g) {
  const double a = std::exp(b.eps_inf);
  const double k1 = a / (a + g - 1);
  const double o1 = 1.0 / (a + g - 1);
  const double r = std::exp(derive_eps_irr(b.eps_inf, b.eps_1));
  const double k2 = r / (r + g - 1);
  const double o2 = 1.0 / (r + g - 1);
  std::vector<std::vector<double>> ch(g, std::vector<double>(g));
  for (int x = 0; x < g; ++x) {
    for (int y = 0; y < g; ++y) {
      double p = 0;
      for (int m = 0; m < g; ++m) {
        p += (m == x ? k1 : o1) * (y == m ? k2 : o2);
      }
      ch[x][y] = p;
    }
  }
  double best = 0;
  for (int y = 0; y < g; ++y) {
    for (int x1 = 0; x1 < g; ++x1) {
      for (int x2 = 0; x2 < g; ++x2) {
        if (x1 != x2) best = std::max(best, ch[x1][y] / ch[x2][y]);
      }
    }
  }
  return best;
}

// Same enumeration for the GRR chain on {1..k}.
double lgrr_composite_max_ratio(const PrivacyBudget& b, int k) {
  const GrrParams prr = grr_params(b.eps_inf, k);
  const IrrParams irr = lgrr_derive_irr(b.eps_inf, b.eps_1, k);
  std::vector<std::vector<double>> ch(k, std::vector<double>(k));
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < k; ++y) {
      double p = 0;
      for (int m = 0; m < k; ++m) {
        p += (m == x ? prr.p : prr.q) * (y == m ? irr.p2 : irr.q2);
      }
      ch[x][y] = p;
    }
  }
  double best = 0;
  for (int y = 0; y < k; ++y) {
    for (int x1 = 0; x1 < k; ++x1) {
      for (int x2 = 0; x2 < k; ++x2) {
        if (x1 != x2) best = std::max(best, ch[x1][y] / ch[x2][y]);
      }
    }
  }
  return best;
}

TEST(Budget, ValidationAndAlpha) {
  const PrivacyBudget b = make_budget(2.0, 1.0);
  EXPECT_EQ(b.eps_inf, 2.0);
  EXPECT_EQ(b.eps_1, 1.0);
  EXPECT_NEAR(b.alpha(), 0.5, kTight);

  EXPECT_THROW(make_budget(1.0, 1.0), std::domain_error);  // strict eps_1 < eps_inf
  EXPECT_THROW(make_budget(1.0, 0.0), std::domain_error);
  EXPECT_THROW(make_budget(1.0, -0.5), std::domain_error);
  EXPECT_THROW(make_budget(0.0, 0.0), std::invalid_argument);

  EXPECT_NEAR(budget_from_alpha(2.0, 0.5).eps_1, 1.0, kTight);
  EXPECT_THROW(budget_from_alpha(2.0, 0.0), std::domain_error);
  EXPECT_THROW(budget_from_alpha(2.0, 1.0), std::domain_error);
}

TEST(DeriveEpsIrr, KnownValues) {
  EXPECT_LT(rel_err(derive_eps_irr(2.0, 1.0), 1.4076059644443803), kTight);
  EXPECT_LT(rel_err(derive_eps_irr(1.0, 0.5), 1.1802696706417346), kTight);
  EXPECT_LT(rel_err(derive_eps_irr(3.0, 1.5), 1.7413112966571571), kTight);
  EXPECT_LT(rel_err(derive_eps_irr(5.0, 3.0), 3.1450779389607822), kTight);
}

TEST(DeriveEpsIrr, DominatesTargetAndGrowsWithIt) {
  for (double eps_inf : {0.5, 1.0, 2.0, 4.0}) {
    double prev = 0.0;
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double e1 = frac * eps_inf;
      const double r = derive_eps_irr(eps_inf, e1);
      EXPECT_GT(r, e1);    // the fresh round must spend more than the target
      EXPECT_GT(r, prev);  // strictly increasing in eps_1
      prev = r;
    }
  }
  EXPECT_THROW(derive_eps_irr(1.0, 1.0), std::domain_error);
  EXPECT_THROW(derive_eps_irr(1.0, 2.0), std::domain_error);
}

TEST(LolohaServerParams, KnownValuesAndSupportRate) {
  const PrivacyBudget b = make_budget(2.0, 1.0);
  {
    const LongitudinalParams lp = loloha_server_params(b, 2);
    EXPECT_LT(rel_err(lp.p1, 0.88079707797788244), kTight);
    EXPECT_EQ(lp.q1, 0.5);  // non-matching value supports with rate exactly 1/g
    EXPECT_LT(rel_err(lp.p2, 0.80338806675851815), kTight);
    EXPECT_LT(rel_err(lp.q2, 0.19661193324148185), kTight);
  }
  {
    const LongitudinalParams lp = loloha_server_params(b, 3);
    EXPECT_LT(rel_err(lp.p1, 0.78698604216159850), kTight);
    EXPECT_EQ(lp.q1, 1.0 / 3.0);
    EXPECT_LT(rel_err(lp.p2, 0.67138563843520579), kTight);
    EXPECT_LT(rel_err(lp.q2, 0.16430718078239710), kTight);
  }
  EXPECT_THROW(loloha_server_params(b, 1), std::invalid_argument);
}

TEST(LsueParams, KnownValueAndBudgetRecovery) {
  const PrivacyBudget b = make_budget(2.0, 1.0);
  const LongitudinalParams lp = lsue_params(b);
  EXPECT_LT(rel_err(lp.p2, 0.76499628779840551), kTight);
  EXPECT_NEAR(lp.q2, 1.0 - lp.p2, kTight);  // symmetric fresh round

  // Composite per-bit keep rate corresponds exactly to the one-shot
  // symmetric channel at eps_1.
  for (double eps_inf : {1.0, 2.0, 4.0}) {
    for (double e1 : {0.3 * eps_inf, 0.5 * eps_inf, 0.9 * eps_inf}) {
      const LongitudinalParams p = lsue_params(make_budget(eps_inf, e1));
      const double ps = p.p1 * p.p2 + (1 - p.p1) * (1 - p.p2);
      const double recovered = 2.0 * std::log(ps / (1.0 - ps));
      EXPECT_NEAR(recovered, e1, 1e-10);
    }
  }
}

TEST(LosueParams, KnownValueAndBudgetRecovery) {
  const PrivacyBudget b = make_budget(2.0, 1.0);
  const LongitudinalParams lp = losue_params(b);
  EXPECT_LT(rel_err(lp.p2, 0.80338806675851815), kTight);
  EXPECT_EQ(lp.p1, 0.5);
  EXPECT_NEAR(lp.q1, 1.0 / (std::exp(2.0) + 1.0), kTight);
  EXPECT_NEAR(lp.q2, 1.0 - lp.p2, kTight);

  for (double eps_inf : {1.0, 2.0, 4.0}) {
    for (double e1 : {0.3 * eps_inf, 0.5 * eps_inf, 0.9 * eps_inf}) {
      const LongitudinalParams p = losue_params(make_budget(eps_inf, e1));
      const double ps = p.p1 * p.p2 + (1 - p.p1) * p.q2;
      const double qs = p.q1 * p.p2 + (1 - p.q1) * p.q2;
      const double recovered = std::log(ps * (1 - qs) / ((1 - ps) * qs));
      EXPECT_NEAR(recovered, e1, 1e-10);
    }
  }
}

TEST(LgrrParams, KnownValueAndTwoPathIdentity) {
  const IrrParams irr = lgrr_derive_irr(3.0, 1.5, 10);
  EXPECT_LT(rel_err(irr.p2, 0.38795575389727224), kTight);
  EXPECT_NEAR(irr.q2, (1.0 - irr.p2) / 9.0, kTight);

  // For any k, the keep-keep vs. keep-flip likelihood ratio through the
  // chain equals e^{eps_1} exactly.
  for (const PrivacyBudget& b : {make_budget(3.0, 1.5), make_budget(2.0, 1.0)}) {
    for (int k : {2, 3, 10}) {
      const LongitudinalParams p = lgrr_params(b, k);
      const double num = p.p1 * p.p2 + p.q1 * p.q2;
      const double den = p.p1 * p.q2 + p.q1 * p.p2;
      EXPECT_LT(rel_err(num / den, std::exp(b.eps_1)), kTight)
          << "k=" << k << " eps_inf=" << b.eps_inf;
    }
  }
}

TEST(DerivedIrr, LimitBehavior) {
  // eps_1 -> eps_inf: the fresh round degenerates to (nearly) the identity.
  const PrivacyBudget nearly = make_budget(2.0, 2.0 - 1e-9);
  EXPECT_GT(lsue_derive_irr(nearly.eps_inf, nearly.eps_1).p2, 1.0 - 1e-6);
  EXPECT_GT(losue_derive_irr(nearly.eps_inf, nearly.eps_1).p2, 1.0 - 1e-6);
  EXPECT_GT(loloha_server_params(nearly, 2).p2, 1.0 - 1e-6);
  EXPECT_GT(lgrr_derive_irr(nearly.eps_inf, nearly.eps_1, 5).p2, 1.0 - 1e-6);

  // eps_1 -> 0: the symmetric fresh round approaches a fair coin per bit.
  const PrivacyBudget tiny = make_budget(2.0, 1e-9);
  EXPECT_NEAR(losue_derive_irr(tiny.eps_inf, tiny.eps_1).p2, 0.5, 1e-8);
  EXPECT_NEAR(lsue_derive_irr(tiny.eps_inf, tiny.eps_1).p2, 0.5, 1e-8);
}

TEST(CompositeChannel, HashChainRatioAtPairDomain) {
  const PrivacyBudget b = make_budget(1.0, 0.5);
  // g = 2: the chained channel spends exactly eps_1.
  EXPECT_LT(rel_err(loloha_composite_max_ratio(b, 2), std::exp(0.5)), 1e-9);
}

TEST(CompositeChannel, HashChainRatioForLargerRanges) {
  const PrivacyBudget b = make_budget(1.0, 0.5);
  const double cap = std::exp(0.5);
  const struct {
    int g;
    double want;
  } rows[] = {
      {3, 1.5556950815209594},
      {4, 1.4860026341913596},
      {5, 1.4318430748415253},
  };
  for (const auto& r : rows) {
    const double got = loloha_composite_max_ratio(b, r.g);
    EXPECT_LT(rel_err(got, r.want), 1e-9) << "g=" << r.g;
    EXPECT_LT(got, cap) << "g=" << r.g;
  }
}

TEST(CompositeChannel, PermanentRoundAloneSpendsEpsInf) {
  for (int g : {2, 3, 4, 5}) {
    for (double eps_inf : {0.5, 1.0, 3.0}) {
      const double a = std::exp(eps_inf);
      const double keep = a / (a + g - 1);
      const double off = 1.0 / (a + g - 1);
      EXPECT_LT(rel_err(keep / off, a), kTight) << "g=" << g;
    }
  }
}

TEST(CompositeChannel, GrrChainRatios) {
  const PrivacyBudget b = make_budget(3.0, 1.5);
  const double cap = std::exp(1.5);
  EXPECT_LT(rel_err(lgrr_composite_max_ratio(b, 2), cap), 1e-9);
  EXPECT_LT(rel_err(lgrr_composite_max_ratio(b, 3), 4.3517285334058013), 1e-9);
  EXPECT_LT(rel_err(lgrr_composite_max_ratio(b, 10), 3.6573854602775389), 1e-9);
  EXPECT_LE(lgrr_composite_max_ratio(b, 3), cap);
  EXPECT_LE(lgrr_composite_max_ratio(b, 10), cap);
}

TEST(Ledger, CountsDistinctClasses) {
  PrivacyLedger l(0.7);
  EXPECT_EQ(l.distinct(), 0);
  EXPECT_EQ(l.accumulated(), 0.0);
  l.record(3);
  EXPECT_EQ(l.distinct(), 1);
  EXPECT_NEAR(l.accumulated(), 0.7, kTight);
  l.record(3);  // repeat is free
  EXPECT_EQ(l.distinct(), 1);
  l.record(5);
  EXPECT_EQ(l.distinct(), 2);
  EXPECT_NEAR(l.accumulated(), 1.4, kTight);
  EXPECT_EQ(l.classes(), (std::set<int>{3, 5}));
}

TEST(LolohaClient, MemoizesPermanentRoundPerHashCell) {
  Rng rng(31);
  const PrivacyBudget b = make_budget(1.0, 0.5);
  LolohaClient c = LolohaClient::init(b, 10, 2, rng);

  (void)c.report(4, rng);
  ASSERT_EQ(c.memo().size(), 1u);
  const std::map<int, int> snapshot = c.memo();
  for (int i = 0; i < 50; ++i) (void)c.report(4, rng);
  EXPECT_EQ(c.memo(), snapshot);  // permanent round never redrawn

  // Reporting the whole domain memoizes exactly the touched hash cells,
  // and the ledger records those cells.
  std::set<int> cells;
  for (int v = 1; v <= 10; ++v) cells.insert(hash_eval(c.hash(), v));
  for (int v = 1; v <= 10; ++v) (void)c.report(v, rng);
  EXPECT_EQ(c.memo().size(), cells.size());
  EXPECT_EQ(c.ledger().classes(), cells);
  EXPECT_NEAR(c.ledger().accumulated(),
              static_cast<double>(cells.size()) * b.eps_inf, kTight);
  EXPECT_LE(c.ledger().distinct(), 2);  // capped by g, not k
}

TEST(LolohaClient, ReportsStayInHashRange) {
  Rng rng(32);
  const PrivacyBudget b = make_budget(2.0, 1.0);
  LolohaClient c = LolohaClient::init(b, 100, 5, rng);
  for (int t = 0; t < 500; ++t) {
    const int y = c.report(1 + (t % 100), rng);
    EXPECT_GE(y, 1);
    EXPECT_LE(y, 5);
  }
}

TEST(LolohaClient, SameSeedSameHash) {
  Rng a(77), b2(77);
  const PrivacyBudget b = make_budget(1.0, 0.5);
  const LolohaClient c1 = LolohaClient::init(b, 50, 4, a);
  const LolohaClient c2 = LolohaClient::init(b, 50, 4, b2);
  EXPECT_EQ(c1.hash().seed, c2.hash().seed);
  EXPECT_EQ(c1.prr_keep(), c2.prr_keep());
  EXPECT_EQ(c1.irr_keep(), c2.irr_keep());
}

TEST(UeLongClient, MemoAndLedgerTrackDistinctValues) {
  Rng rng(41);
  const PrivacyBudget b = make_budget(2.0, 1.0);
  for (UeLongFlavor flavor : {UeLongFlavor::kLsue, UeLongFlavor::kLosue}) {
    UeLongClient c = UeLongClient::init(b, 6, flavor);
    (void)c.report(2, rng);
    const Bits permanent = c.memo().at(2);
    for (int i = 0; i < 20; ++i) (void)c.report(2, rng);
    EXPECT_EQ(c.memo().at(2), permanent);
    EXPECT_EQ(c.ledger().distinct(), 1);

    (void)c.report(5, rng);
    EXPECT_EQ(c.ledger().distinct(), 2);
    EXPECT_NEAR(c.ledger().accumulated(), 2 * b.eps_inf, kTight);
    EXPECT_EQ(c.ledger().classes(), (std::set<int>{2, 5}));
  }
}

TEST(LgrrClient, MemoAndLedgerTrackDistinctValues) {
  Rng rng(43);
  const PrivacyBudget b = make_budget(3.0, 1.5);
  LgrrClient c = LgrrClient::init(b, 10);
  (void)c.report(7, rng);
  const int memoized = c.memo().at(7);
  for (int i = 0; i < 30; ++i) {
    const int y = c.report(7, rng);
    EXPECT_GE(y, 1);
    EXPECT_LE(y, 10);
  }
  EXPECT_EQ(c.memo().at(7), memoized);
  (void)c.report(1, rng);
  (void)c.report(2, rng);
  EXPECT_EQ(c.ledger().distinct(), 3);
  EXPECT_NEAR(c.ledger().accumulated(), 3 * b.eps_inf, kTight);
}

TEST(Bucketize, IdentityAndCoarsening) {
  for (int v = 1; v <= 7; ++v) EXPECT_EQ(bucketize(v, 7, 7), v);

  EXPECT_EQ(bucketize(1, 360, 90), 1);
  EXPECT_EQ(bucketize(4, 360, 90), 1);
  EXPECT_EQ(bucketize(5, 360, 90), 2);
  EXPECT_EQ(bucketize(360, 360, 90), 90);

  std::vector<int> fill(90, 0);
  int prev = 1;
  for (int v = 1; v <= 360; ++v) {
    const int j = bucketize(v, 360, 90);
    EXPECT_GE(j, prev);            // monotone
    EXPECT_LE(j - prev, 1);        // no bucket skipped
    ++fill[static_cast<std::size_t>(j - 1)];
    prev = j;
  }
  for (int j = 0; j < 90; ++j) EXPECT_EQ(fill[static_cast<std::size_t>(j)], 4);

  EXPECT_THROW(bucketize(1, 10, 0), std::invalid_argument);
  EXPECT_THROW(bucketize(1, 10, 11), std::invalid_argument);
  EXPECT_THROW(bucketize(0, 10, 5), std::invalid_argument);
  EXPECT_THROW(bucketize(11, 10, 5), std::invalid_argument);
}

TEST(DBitClient, SamplingAndValidation) {
  {
    Rng rng(9);
    const DBitClient c = DBitClient::init(100, 30, 30, 3.0, rng);
    std::vector<int> all(30);
    for (int i = 0; i < 30; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    EXPECT_EQ(c.sampled_indices(), all);  // d = b samples everything
  }
  {
    Rng a(9), b(9);
    const DBitClient c1 = DBitClient::init(100, 30, 3, 3.0, a);
    const DBitClient c2 = DBitClient::init(100, 30, 3, 3.0, b);
    EXPECT_EQ(c1.sampled_indices(), c2.sampled_indices());
    EXPECT_EQ(c1.sampled_indices().size(), 3u);
  }
  {
    Rng rng(10);
    const DBitClient c = DBitClient::init(50, 10, 1, 1.0, rng);
    ASSERT_EQ(c.sampled_indices().size(), 1u);
    EXPECT_GE(c.sampled_indices()[0], 1);
    EXPECT_LE(c.sampled_indices()[0], 10);
  }
  Rng rng(11);
  EXPECT_THROW(DBitClient::init(10, 1, 1, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(DBitClient::init(10, 11, 1, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(DBitClient::init(10, 5, 0, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(DBitClient::init(10, 5, 6, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(DBitClient::init(10, 5, 2, 0.0, rng), std::invalid_argument);
}

TEST(DBitClient, SameBucketSameReportForever) {
  Rng rng(21);
  DBitClient c = DBitClient::init(100, 10, 10, 2.0, rng);
  // v = 11..20 all land in bucket 2.
  const Bits first = c.report(11, rng);
  EXPECT_EQ(c.report(15, rng), first);
  EXPECT_EQ(c.report(20, rng), first);
  EXPECT_EQ(c.memo().size(), 1u);
  EXPECT_EQ(c.ledger().distinct(), 1);
}

TEST(DBitClient, MemoizedReportConsumesNoRandomness) {
  Rng r1(55), r2(55);
  DBitClient c1 = DBitClient::init(60, 12, 4, 1.5, r1);
  DBitClient c2 = DBitClient::init(60, 12, 4, 1.5, r2);
  (void)c1.report(7, r1);
  (void)c2.report(7, r2);
  (void)c2.report(7, r2);  // repeat of a memoized class
  EXPECT_EQ(r1.next_u64(), r2.next_u64());
}

TEST(DBitClient, UnsampledBucketsShareOneClass) {
  Rng rng(22);
  DBitClient c = DBitClient::init(100, 10, 3, 2.0, rng);
  for (int v = 1; v <= 100; ++v) (void)c.report(v, rng);
  // At most d sampled classes plus the shared class 0.
  EXPECT_LE(c.ledger().distinct(), 4);
  EXPECT_EQ(c.ledger().classes().count(0), 1u);
  EXPECT_NEAR(c.ledger().accumulated(), c.ledger().distinct() * 2.0, kTight);

  // All unsampled buckets produce the identical report vector.
  std::vector<int> unsampled;
  for (int j = 1; j <= 10; ++j) {
    if (!std::binary_search(c.sampled_indices().begin(),
                            c.sampled_indices().end(), j)) {
      unsampled.push_back(j);
    }
  }
  ASSERT_GE(unsampled.size(), 2u);
  const int va = (unsampled[0] - 1) * 10 + 1;  // a value in that bucket
  const int vb = (unsampled[1] - 1) * 10 + 1;
  EXPECT_EQ(c.report(va, rng), c.report(vb, rng));
}

TEST(DBitClient, ConstantUserSpendsOneClass) {
  Rng rng(23);
  DBitClient c = DBitClient::init(360, 36, 6, 0.5, rng);
  for (int t = 0; t < 100; ++t) (void)c.report(42, rng);
  EXPECT_EQ(c.ledger().distinct(), 1);
  EXPECT_NEAR(c.ledger().accumulated(), 0.5, kTight);
}

}  // namespace
}  // namespace longldp
