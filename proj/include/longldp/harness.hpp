// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: dataset generation and ingestion, end-to-end protocol
// simulation over tau collections, and the evaluation metrics (averaged MSE,
// averaged longitudinal privacy loss, change-detection attack rate).
//
// Determinism contract: every result depends only on (config, master seed).
// Datasets are generated once per experiment from a dedicated sub-stream of
// the master seed; user u in run r draws from an Rng seeded with
// user_seed(master, r, u); runs are dispatched to a worker pool and reduced
// in run order with integer accumulators, so output is invariant to the
// worker count and to scheduling.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "longldp/analysis.hpp"
#include "longldp/core.hpp"
#include "longldp/csv.hpp"
#include "longldp/longitudinal.hpp"
#include "longldp/rng.hpp"
#include "longldp/server.hpp"

namespace longldp {

// ---------------------------------------------------------------------------
// Protocols.
// ---------------------------------------------------------------------------

enum class Protocol {
  kBiloloha,  // local hashing, g = 2
  kOloloha,   // local hashing, variance-optimal g
  kLoloha,    // local hashing, explicit g
  kLsue,      // symmetric UE chain (a.k.a. RAPPOR-style baseline)
  kLosue,     // optimized-then-symmetric UE chain
  kLgrr,      // GRR chain
  kDbit,      // dBitFlip (single round, bucketized, d-of-b sampled)
};

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::kBiloloha: return "biloloha";
    case Protocol::kOloloha: return "ololoha";
    case Protocol::kLoloha: return "loloha";
    case Protocol::kLsue: return "rappor";
    case Protocol::kLosue: return "losue";
    case Protocol::kLgrr: return "lgrr";
    case Protocol::kDbit: return "dbitflip";
  }
  return "unknown";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "biloloha") return Protocol::kBiloloha;
  if (s == "ololoha") return Protocol::kOloloha;
  if (s == "loloha") return Protocol::kLoloha;
  if (s == "rappor" || s == "lsue") return Protocol::kLsue;
  if (s == "losue") return Protocol::kLosue;
  if (s == "lgrr") return Protocol::kLgrr;
  if (s == "dbitflip" || s == "dbit") return Protocol::kDbit;
  throw std::invalid_argument("unknown protocol: " + s);
}

// ---------------------------------------------------------------------------
// User sequences.
// ---------------------------------------------------------------------------

struct UserSequences {
  int n = 0;
  int k = 0;
  int tau = 0;
  // values[u*tau + (t-1)] in {1..k}.
  std::vector<std::int32_t> values;
  // External labels: labels[v-1] names domain index v. Empty for generated
  // data (labels are the integers themselves).
  std::vector<std::string> labels;

  std::int32_t at(int u, int t) const {
    return values[static_cast<std::size_t>(u) * static_cast<std::size_t>(tau) +
                  static_cast<std::size_t>(t - 1)];
  }
};

// Synthetic generator: first value uniform; each later step resamples
// uniformly with probability p_ch (the fresh draw may repeat the old value),
// otherwise carries the previous value forward.
inline UserSequences gen_syn(int n, int k, int tau, double p_ch, Rng& rng) {
  detail::require(n >= 1, "gen_syn: n must be >= 1");
  check_domain(k, "gen_syn");
  detail::require(tau >= 1, "gen_syn: tau must be >= 1");
  detail::require(p_ch >= 0.0 && p_ch <= 1.0, "gen_syn: p_ch must lie in [0, 1]");
  UserSequences seq;
  seq.n = n;
  seq.k = k;
  seq.tau = tau;
  seq.values.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(tau));
  for (int u = 0; u < n; ++u) {
    std::int32_t v = static_cast<std::int32_t>(rng.uniform_int(1, k));
    for (int t = 1; t <= tau; ++t) {
      if (t > 1 && rng.bernoulli(p_ch)) {
        v = static_cast<std::int32_t>(rng.uniform_int(1, k));
      }
      seq.values[static_cast<std::size_t>(u) * static_cast<std::size_t>(tau) +
                 static_cast<std::size_t>(t - 1)] = v;
    }
  }
  return seq;
}

inline UserSequences gen_syn(int n, int k, int tau, double p_ch,
                             std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::kDataset));
  return gen_syn(n, k, tau, p_ch, rng);
}

// Permuted generator: each time step is an independent uniform permutation of
// the base multiset, so per-step marginals are constant over time.
inline UserSequences gen_permuted(const std::vector<int>& base, int k, int tau,
                                  Rng& rng) {
  detail::require(!base.empty(), "gen_permuted: base multiset must be non-empty");
  check_domain(k, "gen_permuted");
  detail::require(tau >= 1, "gen_permuted: tau must be >= 1");
  for (int v : base) check_value(v, k, "gen_permuted");
  const int n = static_cast<int>(base.size());
  UserSequences seq;
  seq.n = n;
  seq.k = k;
  seq.tau = tau;
  seq.values.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(tau));
  std::vector<int> work(base.size());
  for (int t = 1; t <= tau; ++t) {
    work = base;
    for (int i = n - 1; i >= 1; --i) {
      const int j = static_cast<int>(rng.uniform_int(0, i));
      std::swap(work[static_cast<std::size_t>(i)], work[static_cast<std::size_t>(j)]);
    }
    for (int u = 0; u < n; ++u) {
      seq.values[static_cast<std::size_t>(u) * static_cast<std::size_t>(tau) +
                 static_cast<std::size_t>(t - 1)] =
          static_cast<std::int32_t>(work[static_cast<std::size_t>(u)]);
    }
  }
  return seq;
}

inline UserSequences gen_permuted(const std::vector<int>& base, int k, int tau,
                                  std::uint64_t seed) {
  Rng rng(stream_seed(seed, Stream::kDataset));
  return gen_permuted(base, k, tau, rng);
}

// Near-uniform base multiset for the permuted generator: value v appears
// floor(n/k) times, plus one extra for the first n mod k values.
inline std::vector<int> uniform_base(int n, int k) {
  detail::require(n >= 1, "uniform_base: n must be >= 1");
  check_domain(k, "uniform_base");
  std::vector<int> base;
  base.reserve(static_cast<std::size_t>(n));
  const int rep = n / k;
  const int extra = n % k;
  for (int v = 1; v <= k; ++v) {
    const int c = rep + (v <= extra ? 1 : 0);
    for (int i = 0; i < c; ++i) base.push_back(v);
  }
  return base;
}

// ---------------------------------------------------------------------------
// Sequence file I/O. Long format CSV, header `user_id,t,value`, one row per
// (user, t); t must cover 1..tau for every user. On load, the value dictionary
// is built from the sorted distinct labels (numeric sort when every label
// parses as an integer, lexicographic otherwise); user order likewise.
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_i64(const std::string& s, std::int64_t* out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  std::int64_t val = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    val = val * 10 + (s[i] - '0');
    if (val < 0) return false;  // overflow guard for the sizes used here
  }
  *out = (s[0] == '-') ? -val : val;
  return true;
}

inline void sort_labels(std::vector<std::string>& labels) {
  bool all_numeric = true;
  for (const auto& s : labels) {
    std::int64_t v;
    if (!parse_i64(s, &v)) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) {
                std::int64_t x = 0, y = 0;
                parse_i64(a, &x);
                parse_i64(b, &y);
                return x < y;
              });
  } else {
    std::sort(labels.begin(), labels.end());
  }
}

}  // namespace detail

inline void save_sequences(const std::string& path, const UserSequences& seq) {
  CsvWriter w(path);
  w.row({"user_id", "t", "value"});
  const bool labeled = seq.labels.size() == static_cast<std::size_t>(seq.k);
  for (int u = 0; u < seq.n; ++u) {
    for (int t = 1; t <= seq.tau; ++t) {
      const int v = seq.at(u, t);
      w.row({std::to_string(u + 1), std::to_string(t),
             labeled ? seq.labels[static_cast<std::size_t>(v - 1)]
                     : std::to_string(v)});
    }
  }
  w.close();
}

inline UserSequences load_sequences(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": parse error at line 1: empty file");
  }
  if (strip_cr(line) != "user_id,t,value") {
    throw std::runtime_error(path +
                             ": parse error at line 1: expected header "
                             "'user_id,t,value'");
  }
  struct Row {
    std::string user;
    int t;
    std::string label;
  };
  std::vector<Row> rows;
  std::set<std::string> user_set;
  std::set<std::string> label_set;
  int tau = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ": parse error at line " +
                               std::to_string(line_no) + ": expected 3 fields");
    }
    std::int64_t t64;
    if (!detail::parse_i64(fields[1], &t64) || t64 < 1 || t64 > 1000000) {
      throw std::runtime_error(path + ": parse error at line " +
                               std::to_string(line_no) +
                               ": t must be a positive integer");
    }
    rows.push_back(Row{fields[0], static_cast<int>(t64), fields[2]});
    user_set.insert(fields[0]);
    label_set.insert(fields[2]);
    tau = std::max(tau, static_cast<int>(t64));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": parse error: no data rows");
  }
  std::vector<std::string> users(user_set.begin(), user_set.end());
  detail::sort_labels(users);
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  detail::sort_labels(labels);
  if (labels.size() < 2) {
    throw std::runtime_error(path + ": domain must contain at least 2 distinct values");
  }
  std::map<std::string, int> user_index;
  for (std::size_t i = 0; i < users.size(); ++i) {
    user_index[users[i]] = static_cast<int>(i);
  }
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    label_index[labels[i]] = static_cast<int>(i) + 1;
  }
  UserSequences seq;
  seq.n = static_cast<int>(users.size());
  seq.k = static_cast<int>(labels.size());
  seq.tau = tau;
  seq.labels = labels;
  seq.values.assign(
      static_cast<std::size_t>(seq.n) * static_cast<std::size_t>(tau), 0);
  for (const auto& r : rows) {
    const int u = user_index[r.user];
    const std::size_t idx =
        static_cast<std::size_t>(u) * static_cast<std::size_t>(tau) +
        static_cast<std::size_t>(r.t - 1);
    if (seq.values[idx] != 0) {
      throw std::runtime_error(path + ": duplicate row for user " + r.user +
                               " at t=" + std::to_string(r.t));
    }
    seq.values[idx] = static_cast<std::int32_t>(label_index[r.label]);
  }
  for (int u = 0; u < seq.n; ++u) {
    for (int t = 1; t <= tau; ++t) {
      if (seq.at(u, t) == 0) {
        throw std::runtime_error(path + ": user " + users[static_cast<std::size_t>(u)] +
                                 " missing time step t=" + std::to_string(t));
      }
    }
  }
  return seq;
}

// Ground-truth per-step frequency histograms, recomputed from the sequences.
// With bucket_b > 0, truth is tallied over b buckets via bucketize.
inline std::vector<std::vector<double>> truth_histograms(
    const UserSequences& seq, int bucket_b = 0) {
  const int bins = bucket_b > 0 ? bucket_b : seq.k;
  std::vector<std::vector<double>> truth(
      static_cast<std::size_t>(seq.tau),
      std::vector<double>(static_cast<std::size_t>(bins), 0.0));
  for (int u = 0; u < seq.n; ++u) {
    for (int t = 1; t <= seq.tau; ++t) {
      int v = seq.at(u, t);
      if (bucket_b > 0) v = bucketize(v, seq.k, bucket_b);
      truth[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(v - 1)] +=
          1.0;
    }
  }
  for (auto& row : truth) {
    for (double& x : row) x /= seq.n;
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Metrics.
// ---------------------------------------------------------------------------

// Mean over all (t, v) of (f_true - f_hat)^2.
inline double mse_avg(const std::vector<std::vector<double>>& truth,
                      const EstimateMatrix& est) {
  detail::require(truth.size() == static_cast<std::size_t>(est.tau),
                  "mse_avg: step-count mismatch");
  double sum = 0.0;
  std::int64_t cells = 0;
  for (int t = 0; t < est.tau; ++t) {
    const auto& tr = truth[static_cast<std::size_t>(t)];
    const auto& er = est.values[static_cast<std::size_t>(t)];
    detail::require(tr.size() == er.size(), "mse_avg: bin-count mismatch");
    for (std::size_t v = 0; v < tr.size(); ++v) {
      const double d = tr[v] - er[v];
      sum += d * d;
      ++cells;
    }
  }
  detail::require(cells > 0, "mse_avg: empty estimate matrix");
  return sum / static_cast<double>(cells);
}

// Mean accumulated longitudinal loss over users (in user-index order).
inline double eps_avg(const std::vector<PrivacyLedger>& ledgers) {
  detail::require(!ledgers.empty(), "eps_avg: no ledgers");
  double sum = 0.0;
  for (const auto& l : ledgers) sum += l.accumulated();
  return sum / static_cast<double>(ledgers.size());
}

// Change-detection attack on single-round streams: a user is fully attacked
// iff every time step whose true bucket differs from the previous step's
// bucket produced a report different from the previous report. Users with no
// bucket changes are excluded from the denominator.
inline double change_detection_attack(
    const std::vector<std::vector<Bits>>& streams, const UserSequences& truth,
    int b) {
  detail::require(streams.size() == static_cast<std::size_t>(truth.n),
                  "change_detection_attack: stream/user count mismatch");
  std::int64_t eligible = 0;
  std::int64_t attacked = 0;
  for (int u = 0; u < truth.n; ++u) {
    const auto& stream = streams[static_cast<std::size_t>(u)];
    detail::require(stream.size() == static_cast<std::size_t>(truth.tau),
                    "change_detection_attack: stream length mismatch");
    bool any_change = false;
    bool all_detected = true;
    for (int t = 2; t <= truth.tau; ++t) {
      const int prev_bucket = bucketize(truth.at(u, t - 1), truth.k, b);
      const int cur_bucket = bucketize(truth.at(u, t), truth.k, b);
      if (prev_bucket == cur_bucket) continue;
      any_change = true;
      if (stream[static_cast<std::size_t>(t - 1)] ==
          stream[static_cast<std::size_t>(t - 2)]) {
        all_detected = false;
      }
    }
    if (any_change) {
      ++eligible;
      if (all_detected) ++attacked;
    }
  }
  return eligible > 0
             ? static_cast<double>(attacked) / static_cast<double>(eligible)
             : 0.0;
}

// ---------------------------------------------------------------------------
// Experiment configuration and execution.
// ---------------------------------------------------------------------------

struct DatasetSpec {
  enum class Kind { kSyn, kPermuted, kFile };
  Kind kind = Kind::kSyn;
  int n = 0;
  int k = 0;
  int tau = 0;
  double p_ch = 0.25;  // kSyn only
  std::string path;    // kFile only
};

struct ExperimentConfig {
  Protocol protocol = Protocol::kLsue;
  double eps_inf = 1.0;
  double alpha = 0.5;  // eps_1 = alpha * eps_inf; ignored by dbitflip
  int g = 2;           // explicit hash range for Protocol::kLoloha
  int b = 0;           // dbitflip bucket count; 0 -> b = k
  int d = 0;           // dbitflip sampled bits; 0 -> d = b
  std::uint64_t seed = 1;
  int runs = 1;
  int workers = 1;
  bool clip = false;           // clamp estimates to [0, 1] before metrics
  bool keep_estimates = true;  // retain per-run estimate matrices
  DatasetSpec dataset;         // used by the one-argument run_experiment
};

struct Metrics {
  double mse_avg = 0.0;
  double eps_avg = 0.0;
  double attack_rate = 0.0;   // dbitflip only
  bool has_attack = false;
  bool bucket_mse = false;    // true when MSE is over b < k buckets
  std::int64_t fp_violations = 0;  // same-class-different-report events (must be 0)
  std::vector<double> per_run_mse;
  std::vector<double> per_run_eps;
  std::vector<double> per_run_attack;
};

struct ExperimentResult {
  std::vector<EstimateMatrix> estimates;  // one per run (if keep_estimates)
  Metrics metrics;
  int resolved_g = 0;  // hash protocols: the g actually used
  int resolved_b = 0;
  int resolved_d = 0;
};

namespace detail {

// Bounded pool executing fn(0..total-1); results must be written to
// task-indexed slots by fn. Rethrows the first exception after joining.
inline void parallel_tasks(int total, int workers,
                           const std::function<void(int)>& fn) {
  if (total <= 0) return;
  workers = std::max(1, std::min(workers, total));
  if (workers == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunOutput {
  double mse = 0.0;
  std::int64_t ledger_classes = 0;
  std::int64_t attacked = 0;
  std::int64_t eligible = 0;
  std::int64_t fp_violations = 0;
  EstimateMatrix estimates;
};

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const UserSequences& data) {
  const int n = data.n;
  const int k = data.k;
  const int tau = data.tau;
  detail::require(n >= 1 && k >= 2 && tau >= 1,
                  "run_experiment: dataset is empty or degenerate");
  detail::require(config.runs >= 1, "run_experiment: runs must be >= 1");

  ExperimentResult result;
  const Protocol proto = config.protocol;

  // Resolve protocol parameters up front so infeasible budgets fail before
  // any simulation starts (sweeps catch and record these).
  int g = 0, b = 0, d = 0;
  PrivacyBudget budget{1.0, 0.5};
  LongitudinalParams lp{0, 0, 0, 0};
  UeParams dbit_sue{2, 0, 0, UeFlavor::kSymmetric};
  const bool is_hash = proto == Protocol::kBiloloha ||
                       proto == Protocol::kOloloha || proto == Protocol::kLoloha;
  if (proto == Protocol::kDbit) {
    b = config.b > 0 ? config.b : k;
    d = config.d > 0 ? config.d : b;
    detail::require(b >= 2 && b <= k, "run_experiment: requires 2 <= b <= k");
    detail::require(d >= 1 && d <= b, "run_experiment: requires 1 <= d <= b");
    check_eps(config.eps_inf, "run_experiment");
    dbit_sue = ue_params(config.eps_inf, b, UeFlavor::kSymmetric);
  } else {
    budget = budget_from_alpha(config.eps_inf, config.alpha);
    if (proto == Protocol::kBiloloha) {
      g = 2;
    } else if (proto == Protocol::kOloloha) {
      g = optimal_g(config.eps_inf, config.alpha);
    } else if (proto == Protocol::kLoloha) {
      detail::require(config.g >= 2, "run_experiment: g must be >= 2");
      g = config.g;
    }
    if (is_hash) {
      lp = loloha_server_params(budget, g);
    } else if (proto == Protocol::kLsue) {
      lp = lsue_params(budget);
    } else if (proto == Protocol::kLosue) {
      lp = losue_params(budget);
    } else {
      lp = lgrr_params(budget, k);
    }
  }
  result.resolved_g = g;
  result.resolved_b = b;
  result.resolved_d = d;

  const int bins = proto == Protocol::kDbit ? b : k;
  const auto truth =
      truth_histograms(data, proto == Protocol::kDbit ? b : 0);

  std::vector<detail::RunOutput> outputs(static_cast<std::size_t>(config.runs));

  const auto simulate_run = [&](int run) {
    detail::RunOutput out;
    std::vector<std::vector<std::int64_t>> counts(
        static_cast<std::size_t>(tau),
        std::vector<std::int64_t>(static_cast<std::size_t>(bins), 0));

    for (int u = 0; u < n; ++u) {
      Rng rng(user_seed(config.seed, static_cast<std::uint64_t>(run),
                        static_cast<std::uint64_t>(u)));
      if (is_hash) {
        LolohaClient client = LolohaClient::init(budget, k, g, rng);
        // Support lists per hash cell, built once per user: the server-side
        // support count C(v) increments for every v hashing to the report.
        std::vector<std::vector<std::int32_t>> cells(
            static_cast<std::size_t>(g));
        for (int v = 1; v <= k; ++v) {
          cells[static_cast<std::size_t>(hash_eval(client.hash(), v) - 1)]
              .push_back(static_cast<std::int32_t>(v));
        }
        for (int t = 1; t <= tau; ++t) {
          const int r = client.report(data.at(u, t), rng);
          auto& row = counts[static_cast<std::size_t>(t - 1)];
          for (const std::int32_t v : cells[static_cast<std::size_t>(r - 1)]) {
            ++row[static_cast<std::size_t>(v - 1)];
          }
        }
        out.ledger_classes += client.ledger().distinct();
      } else if (proto == Protocol::kLsue || proto == Protocol::kLosue) {
        UeLongClient client = UeLongClient::init(
            budget, k,
            proto == Protocol::kLsue ? UeLongFlavor::kLsue : UeLongFlavor::kLosue);
        for (int t = 1; t <= tau; ++t) {
          const Bits bits = client.report(data.at(u, t), rng);
          auto& row = counts[static_cast<std::size_t>(t - 1)];
          for (int v = 0; v < k; ++v) {
            row[static_cast<std::size_t>(v)] += bits[static_cast<std::size_t>(v)];
          }
        }
        out.ledger_classes += client.ledger().distinct();
      } else if (proto == Protocol::kLgrr) {
        LgrrClient client = LgrrClient::init(budget, k);
        for (int t = 1; t <= tau; ++t) {
          const int r = client.report(data.at(u, t), rng);
          ++counts[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(r - 1)];
        }
        out.ledger_classes += client.ledger().distinct();
      } else {
        DBitClient client = DBitClient::init(k, b, d, config.eps_inf, rng);
        const auto& sampled = client.sampled_indices();
        Bits prev_bits;
        int prev_class = 0;
        int prev_bucket = 0;
        bool any_change = false;
        bool all_detected = true;
        for (int t = 1; t <= tau; ++t) {
          const int v = data.at(u, t);
          const int cls = client.memo_class(v);
          const Bits& bits = client.report(v, rng);
          auto& row = counts[static_cast<std::size_t>(t - 1)];
          for (std::size_t l = 0; l < bits.size(); ++l) {
            if (bits[l]) ++row[static_cast<std::size_t>(sampled[l] - 1)];
          }
          const int bucket = bucketize(v, k, b);
          if (t > 1) {
            if (cls == prev_class && bits != prev_bits) ++out.fp_violations;
            if (bucket != prev_bucket) {
              any_change = true;
              if (bits == prev_bits) all_detected = false;
            }
          }
          prev_bits = bits;
          prev_class = cls;
          prev_bucket = bucket;
        }
        if (any_change) {
          ++out.eligible;
          if (all_detected) ++out.attacked;
        }
        out.ledger_classes += client.ledger().distinct();
      }
    }

    // Per-step estimation from the merged counts.
    EstimateMatrix est;
    est.tau = tau;
    est.k = bins;
    est.values.reserve(static_cast<std::size_t>(tau));
    for (int t = 0; t < tau; ++t) {
      const auto& row = counts[static_cast<std::size_t>(t)];
      std::vector<double> c(row.begin(), row.end());
      if (proto == Protocol::kDbit) {
        const double n_eff = static_cast<double>(n) * d / b;
        est.values.push_back(estimate_pure(c, n_eff, dbit_sue.p, dbit_sue.q));
      } else {
        est.values.push_back(
            estimate_longitudinal(c, static_cast<double>(n), lp));
      }
    }
    if (config.clip) clip01(est);
    out.mse = mse_avg(truth, est);
    if (config.keep_estimates) out.estimates = std::move(est);
    outputs[static_cast<std::size_t>(run)] = std::move(out);
  };

  detail::parallel_tasks(config.runs, config.workers, simulate_run);

  // Reduce in run order with integer accumulators: results are identical for
  // any worker count.
  Metrics& m = result.metrics;
  m.has_attack = proto == Protocol::kDbit;
  m.bucket_mse = proto == Protocol::kDbit && b < k;
  const double eps_unit =
      proto == Protocol::kDbit ? config.eps_inf : budget.eps_inf;
  for (int run = 0; run < config.runs; ++run) {
    auto& out = outputs[static_cast<std::size_t>(run)];
    m.per_run_mse.push_back(out.mse);
    m.per_run_eps.push_back(eps_unit * static_cast<double>(out.ledger_classes) /
                            static_cast<double>(n));
    if (m.has_attack) {
      m.per_run_attack.push_back(
          out.eligible > 0
              ? static_cast<double>(out.attacked) / static_cast<double>(out.eligible)
              : 0.0);
    }
    m.fp_violations += out.fp_violations;
    if (config.keep_estimates) {
      result.estimates.push_back(std::move(out.estimates));
    }
  }
  double mse_sum = 0.0, eps_sum = 0.0, att_sum = 0.0;
  for (double x : m.per_run_mse) mse_sum += x;
  for (double x : m.per_run_eps) eps_sum += x;
  for (double x : m.per_run_attack) att_sum += x;
  m.mse_avg = mse_sum / config.runs;
  m.eps_avg = eps_sum / config.runs;
  m.attack_rate = m.per_run_attack.empty()
                      ? 0.0
                      : att_sum / static_cast<double>(m.per_run_attack.size());
  return result;
}

// Convenience overload: materializes the dataset named by config.dataset.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  const DatasetSpec& ds = config.dataset;
  UserSequences data;
  if (ds.kind == DatasetSpec::Kind::kSyn) {
    data = gen_syn(ds.n, ds.k, ds.tau, ds.p_ch, config.seed);
  } else if (ds.kind == DatasetSpec::Kind::kPermuted) {
    data = gen_permuted(uniform_base(ds.n, ds.k), ds.k, ds.tau, config.seed);
  } else {
    data = load_sequences(ds.path);
  }
  return run_experiment(config, data);
}

// Estimates export, schema: run,t,value,f_true,f_hat.
inline void write_estimates_csv(const std::string& path,
                                const std::vector<EstimateMatrix>& per_run,
                                const std::vector<std::vector<double>>& truth) {
  CsvWriter w(path);
  w.row({"run", "t", "value", "f_true", "f_hat"});
  for (std::size_t run = 0; run < per_run.size(); ++run) {
    const auto& est = per_run[run];
    for (int t = 0; t < est.tau; ++t) {
      for (int v = 1; v <= est.k; ++v) {
        w.row({std::to_string(run + 1), std::to_string(t + 1),
               std::to_string(v),
               fmt_double(truth[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(v - 1)]),
               fmt_double(est.values[static_cast<std::size_t>(t)]
                                    [static_cast<std::size_t>(v - 1)])});
      }
    }
  }
  w.close();
}

}  // namespace longldp
