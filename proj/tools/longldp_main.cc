// SPDX-License-Identifier: Apache-2.0
//
// longldp CLI: data generation, experiment sweeps, analytic sweeps, and the
// change-detection attack evaluation. Every subcommand is deterministic under
// --seed; --workers changes scheduling only, never output bytes.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "longldp/longldp.hpp"

namespace {

using nlohmann::json;

// Keep free-text notes CSV-safe (our CSV dialect has no quoting).
std::string sanitize_note(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

double empirical_change_rate(const longldp::UserSequences& seq) {
  if (seq.tau < 2) return 0.0;
  std::int64_t changed = 0;
  std::int64_t steps = 0;
  for (int u = 0; u < seq.n; ++u) {
    for (int t = 2; t <= seq.tau; ++t) {
      ++steps;
      if (seq.at(u, t) != seq.at(u, t - 1)) ++changed;
    }
  }
  return steps > 0 ? static_cast<double>(changed) / static_cast<double>(steps)
                   : 0.0;
}

std::vector<longldp::Protocol> parse_protocols(
    const std::vector<std::string>& names) {
  std::vector<longldp::Protocol> out;
  for (const auto& name : names) {
    if (name == "none") continue;  // explicit empty-grid token
    out.push_back(longldp::protocol_from_string(name));
  }
  return out;
}

const std::vector<std::string> kProtocolTokens = {
    "biloloha", "ololoha", "loloha", "rappor", "lsue",
    "losue",    "lgrr",    "dbitflip", "dbit", "none"};

struct DataFlags {
  bool syn = false;
  bool permuted = false;
  std::string path;
  int n = 0;
  int k = 0;
  int tau = 0;
  double p_ch = 0.25;
};

// Resolve the dataset for `run`/`attack`: a file, or an inline generator spec
// seeded from the master seed's dataset stream.
longldp::UserSequences materialize(const DataFlags& df, std::uint64_t seed) {
  if (!df.path.empty()) return longldp::load_sequences(df.path);
  if (!df.syn && !df.permuted) {
    throw CLI::ValidationError(
        "dataset", "give --data FILE or an inline generator (--syn/--permuted)");
  }
  if (df.n < 1 || df.k < 2 || df.tau < 1) {
    throw CLI::ValidationError(
        "dataset", "inline generation requires --n >= 1, --k >= 2, --tau >= 1");
  }
  if (df.syn) return longldp::gen_syn(df.n, df.k, df.tau, df.p_ch, seed);
  return longldp::gen_permuted(longldp::uniform_base(df.n, df.k), df.k, df.tau,
                               seed);
}

json dataset_echo(const DataFlags& df, const longldp::UserSequences& data) {
  json j;
  if (!df.path.empty()) {
    j["kind"] = "file";
    j["path"] = df.path;
  } else {
    j["kind"] = df.syn ? "syn" : "permuted";
    if (df.syn) j["p_ch"] = df.p_ch;
  }
  j["n"] = data.n;
  j["k"] = data.k;
  j["tau"] = data.tau;
  return j;
}

void add_dataset_flags(CLI::App* cmd, DataFlags* df) {
  auto* data = cmd->add_option("--data", df->path,
                               "Input sequence CSV (header user_id,t,value)");
  auto* syn = cmd->add_flag("--syn", df->syn,
                            "Generate inline: uniform start, each later step "
                            "resamples uniformly w.p. --p-ch");
  auto* perm = cmd->add_flag(
      "--permuted", df->permuted,
      "Generate inline: per-step uniform permutation of a near-uniform base");
  data->excludes(syn);
  data->excludes(perm);
  syn->excludes(perm);
  cmd->add_option("--n", df->n, "Users (inline generation)");
  cmd->add_option("--k", df->k, "Domain size (inline generation)");
  cmd->add_option("--tau", df->tau, "Time steps (inline generation)");
  cmd->add_option("--p-ch", df->p_ch, "Per-step change probability (--syn)")
      ->check(CLI::Range(0.0, 1.0));
}

// ---------------------------------------------------------------------------
// gen-data
// ---------------------------------------------------------------------------

void setup_gen_data(CLI::App& app, std::uint64_t* seed, int* workers) {
  auto* cmd = app.add_subcommand(
      "gen-data",
      "Generate a user-sequence dataset and write it as long-format CSV "
      "(schema: user_id,t,value; one row per user per time step)");
  cmd->fallthrough();
  auto df = std::make_shared<DataFlags>();
  auto out = std::make_shared<std::string>();
  auto* syn = cmd->add_flag("--syn", df->syn,
                            "Evolving values: uniform start, each later step "
                            "resamples uniformly w.p. --p-ch (default mode)");
  auto* perm = cmd->add_flag(
      "--permuted", df->permuted,
      "Constant per-step marginals: each step is an independent uniform "
      "permutation of a near-uniform base multiset");
  syn->excludes(perm);
  cmd->add_option("--n", df->n, "Number of users")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k", df->k, "Domain size (values are 1..k)")
      ->required()
      ->check(CLI::Range(2, 1000000000));
  cmd->add_option("--tau", df->tau, "Number of time steps")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--p-ch", df->p_ch,
                  "Per-step change probability for --syn (default 0.25)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--out", *out, "Output CSV path")->required();
  cmd->callback([seed, workers, df, out]() {
    (void)workers;  // accepted for interface uniformity; generation is serial
    longldp::UserSequences data;
    if (df->permuted) {
      data = longldp::gen_permuted(longldp::uniform_base(df->n, df->k), df->k,
                                   df->tau, *seed);
    } else {
      data = longldp::gen_syn(df->n, df->k, df->tau, df->p_ch, *seed);
    }
    longldp::save_sequences(*out, data);
    std::cout << "wrote " << *out << ": n=" << data.n << " k=" << data.k
              << " tau=" << data.tau << " rows="
              << static_cast<long long>(data.n) * data.tau
              << " change_rate=" << longldp::fmt_double(empirical_change_rate(data))
              << "\n";
  });
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunFlags {
  std::vector<std::string> protocols;
  std::vector<double> eps_list{1.0};
  std::vector<double> alpha_list;
  std::vector<double> eps1_list;
  DataFlags data;
  int g = 2;
  int b = 0;
  int d = 0;
  int runs = 1;
  bool clip = false;
  std::string out;
  std::string json_out;
  std::string estimates_out;
};

void setup_run(CLI::App& app, std::uint64_t* seed, int* workers) {
  auto* cmd = app.add_subcommand(
      "run",
      "Run a protocol sweep over (protocol x eps-inf x alpha) on one dataset. "
      "Metrics CSV schema: protocol,eps_inf,alpha,g,b,d,n,k,tau,runs,mse_avg,"
      "eps_avg,attack_rate,bucket_mse,status (columns not applicable to a "
      "protocol are left empty; infeasible grid points get status != ok and "
      "empty metrics)");
  cmd->fallthrough();
  auto rf = std::make_shared<RunFlags>();
  cmd->add_option("--protocol", rf->protocols,
                  "Protocols to run (repeatable or comma-separated): biloloha, "
                  "ololoha, loloha, rappor (alias lsue), losue, lgrr, dbitflip")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(kProtocolTokens));
  cmd->add_option("--eps-inf", rf->eps_list,
                  "Longitudinal budget grid (default 1.0)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  auto* alpha_opt =
      cmd->add_option("--alpha", rf->alpha_list,
                      "eps_1/eps_inf grid (default 0.5; ignored by dbitflip)")
          ->delimiter(',');
  auto* eps1_opt =
      cmd->add_option("--eps-1", rf->eps1_list,
                      "First-report budget grid (alternative to --alpha)")
          ->delimiter(',')
          ->check(CLI::PositiveNumber);
  alpha_opt->excludes(eps1_opt);
  add_dataset_flags(cmd, &rf->data);
  cmd->add_option("--g", rf->g,
                  "Hash range for --protocol loloha (biloloha forces 2, "
                  "ololoha derives the optimum)")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--b", rf->b, "dbitflip bucket count (default: k)");
  cmd->add_option("--d", rf->d, "dbitflip sampled buckets (default: b)");
  cmd->add_option("--runs", rf->runs, "Independent repetitions per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--clip", rf->clip,
                "Post-process estimates: clamp to [0,1] and renormalize");
  cmd->add_option("--out", rf->out, "Metrics CSV path")->required();
  cmd->add_option("--json", rf->json_out,
                  "Also write a structured metrics document (per-run arrays, "
                  "config echo, seed)");
  cmd->add_option("--estimates", rf->estimates_out,
                  "Write per-run estimates CSV (run,t,value,f_true,f_hat); "
                  "single grid point only");
  cmd->callback([seed, workers, rf]() {
    const auto protocols = parse_protocols(rf->protocols);
    std::vector<double> alphas = rf->alpha_list;
    const bool use_eps1 = !rf->eps1_list.empty();
    if (!use_eps1 && alphas.empty()) alphas = {0.5};
    const std::vector<double>& second_axis =
        use_eps1 ? rf->eps1_list : alphas;

    struct GridPoint {
      longldp::Protocol proto;
      double eps_inf;
      double alpha;  // derived from eps_1 when --eps-1 is used
      bool alpha_used;
    };
    std::vector<GridPoint> grid;
    for (const auto proto : protocols) {
      const bool is_dbit = proto == longldp::Protocol::kDbit;
      for (const double eps : rf->eps_list) {
        if (is_dbit) {
          // alpha is meaningless for the single-round protocol: one grid
          // point per eps, alpha column left empty.
          grid.push_back({proto, eps, 0.5, false});
          continue;
        }
        for (const double second : second_axis) {
          grid.push_back({proto, eps, use_eps1 ? second / eps : second, true});
        }
      }
    }
    if (!rf->estimates_out.empty() && grid.size() != 1) {
      throw CLI::ValidationError("--estimates",
                                 "requires exactly one grid point (one "
                                 "protocol, one eps-inf, one alpha)");
    }

    const longldp::UserSequences data = materialize(rf->data, *seed);

    longldp::CsvWriter csv(rf->out);
    csv.row({"protocol", "eps_inf", "alpha", "g", "b", "d", "n", "k", "tau",
             "runs", "mse_avg", "eps_avg", "attack_rate", "bucket_mse",
             "status"});
    json doc;
    doc["seed"] = *seed;
    doc["runs"] = rf->runs;
    doc["clip"] = rf->clip;
    doc["dataset"] = dataset_echo(rf->data, data);
    doc["grid"] = json::array();

    for (const auto& gp : grid) {
      longldp::ExperimentConfig cfg;
      cfg.protocol = gp.proto;
      cfg.eps_inf = gp.eps_inf;
      cfg.alpha = gp.alpha;
      cfg.g = rf->g;
      cfg.b = rf->b;
      cfg.d = rf->d;
      cfg.seed = *seed;
      cfg.runs = rf->runs;
      cfg.workers = *workers;
      cfg.clip = rf->clip;
      cfg.keep_estimates = !rf->estimates_out.empty();

      const std::string proto_name = longldp::to_string(gp.proto);
      const std::string alpha_str =
          gp.alpha_used ? longldp::fmt_double(gp.alpha) : "";
      json entry;
      entry["protocol"] = proto_name;
      entry["eps_inf"] = gp.eps_inf;
      if (gp.alpha_used) entry["alpha"] = gp.alpha;
      entry["n"] = data.n;
      entry["k"] = data.k;
      entry["tau"] = data.tau;

      try {
        const longldp::ExperimentResult res =
            longldp::run_experiment(cfg, data);
        const auto& m = res.metrics;
        const std::string g_str =
            res.resolved_g > 0 ? std::to_string(res.resolved_g) : "";
        const std::string b_str =
            res.resolved_b > 0 ? std::to_string(res.resolved_b) : "";
        const std::string d_str =
            res.resolved_d > 0 ? std::to_string(res.resolved_d) : "";
        csv.row({proto_name, longldp::fmt_double(gp.eps_inf), alpha_str, g_str,
                 b_str, d_str, std::to_string(data.n), std::to_string(data.k),
                 std::to_string(data.tau), std::to_string(rf->runs),
                 longldp::fmt_double(m.mse_avg), longldp::fmt_double(m.eps_avg),
                 m.has_attack ? longldp::fmt_double(m.attack_rate) : "",
                 m.bucket_mse ? "1" : "0", "ok"});
        if (res.resolved_g > 0) entry["g"] = res.resolved_g;
        if (res.resolved_b > 0) entry["b"] = res.resolved_b;
        if (res.resolved_d > 0) entry["d"] = res.resolved_d;
        entry["status"] = "ok";
        entry["metrics"] = {
            {"mse_avg", m.mse_avg},
            {"eps_avg", m.eps_avg},
            {"bucket_mse", m.bucket_mse},
            {"fp_violations", m.fp_violations},
            {"per_run_mse", m.per_run_mse},
            {"per_run_eps", m.per_run_eps},
        };
        if (m.has_attack) {
          entry["metrics"]["attack_rate"] = m.attack_rate;
          entry["metrics"]["per_run_attack"] = m.per_run_attack;
        }
        if (!rf->estimates_out.empty()) {
          const auto truth = longldp::truth_histograms(
              data, gp.proto == longldp::Protocol::kDbit ? res.resolved_b : 0);
          longldp::write_estimates_csv(rf->estimates_out, res.estimates, truth);
        }
      } catch (const std::domain_error& e) {
        const std::string note = "infeasible: " + sanitize_note(e.what());
        csv.row({proto_name, longldp::fmt_double(gp.eps_inf), alpha_str, "", "",
                 "", std::to_string(data.n), std::to_string(data.k),
                 std::to_string(data.tau), std::to_string(rf->runs), "", "", "",
                 "", note});
        entry["status"] = note;
      }
      doc["grid"].push_back(entry);
    }
    csv.close();
    if (!rf->json_out.empty()) {
      std::ofstream out(rf->json_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open for writing: " + rf->json_out);
      out << doc.dump(2) << "\n";
    }
    std::cout << "wrote " << rf->out << ": " << grid.size()
              << " grid point(s), runs=" << rf->runs << "\n";
  });
}

// ---------------------------------------------------------------------------
// variance
// ---------------------------------------------------------------------------

struct VarianceFlags {
  std::vector<std::string> protocols{"biloloha", "ololoha", "rappor", "losue"};
  std::vector<double> eps_list{1.0};
  std::vector<double> alpha_list{0.5};
  double n = 1e4;
  int g = 2;
  int k = 100;
  int b = 100;
  int d = 1;
  std::string out;
};

void setup_variance(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "variance",
      "Analytic variance sweep. CSV schema: protocol,eps_inf,alpha,n,g,"
      "variance. Values are the f=0 variance of the per-value estimator "
      "(dbitflip uses its closed-form approximation; its alpha column is "
      "empty). Rows whose parameters are infeasible are skipped with a note "
      "on stderr");
  cmd->fallthrough();
  auto vf = std::make_shared<VarianceFlags>();
  cmd->add_option("--protocol", vf->protocols,
                  "Protocols (default: biloloha,ololoha,rappor,losue)")
      ->delimiter(',')
      ->check(CLI::IsMember(kProtocolTokens));
  cmd->add_option("--eps-inf", vf->eps_list, "Budget grid (default 1.0)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", vf->alpha_list, "eps_1/eps_inf grid (default 0.5)")
      ->delimiter(',');
  cmd->add_option("--n", vf->n, "User count in the variance formulas")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--g", vf->g, "Hash range for --protocol loloha")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--k", vf->k, "Domain size (lgrr only)")
      ->check(CLI::Range(2, 1000000000));
  cmd->add_option("--b", vf->b, "Bucket count (dbitflip only)");
  cmd->add_option("--d", vf->d, "Sampled buckets (dbitflip only)");
  cmd->add_option("--out", vf->out, "Output CSV path")->required();
  cmd->callback([vf]() {
    const auto protocols = parse_protocols(vf->protocols);
    longldp::CsvWriter csv(vf->out);
    csv.row({"protocol", "eps_inf", "alpha", "n", "g", "variance"});
    for (const auto proto : protocols) {
      for (const double eps : vf->eps_list) {
        if (proto == longldp::Protocol::kDbit) {
          try {
            const double v =
                longldp::dbit_approx_variance(vf->b, vf->d, vf->n, eps);
            csv.row({longldp::to_string(proto), longldp::fmt_double(eps), "",
                     longldp::fmt_double(vf->n), "", longldp::fmt_double(v)});
          } catch (const std::exception& e) {
            std::cerr << "note: skipped dbitflip eps_inf=" << eps << ": "
                      << e.what() << "\n";
          }
          continue;
        }
        for (const double alpha : vf->alpha_list) {
          std::string g_str;
          try {
            const longldp::PrivacyBudget budget =
                longldp::budget_from_alpha(eps, alpha);
            double v = 0.0;
            if (proto == longldp::Protocol::kBiloloha ||
                proto == longldp::Protocol::kOloloha ||
                proto == longldp::Protocol::kLoloha) {
              int g = vf->g;
              if (proto == longldp::Protocol::kBiloloha) g = 2;
              if (proto == longldp::Protocol::kOloloha) {
                g = longldp::optimal_g(eps, alpha);
              }
              g_str = std::to_string(g);
              v = longldp::approx_variance(
                  longldp::loloha_server_params(budget, g), vf->n);
            } else if (proto == longldp::Protocol::kLsue) {
              v = longldp::approx_variance(longldp::lsue_params(budget), vf->n);
            } else if (proto == longldp::Protocol::kLosue) {
              v = longldp::approx_variance(longldp::losue_params(budget), vf->n);
            } else {
              v = longldp::approx_variance(
                  longldp::lgrr_params(budget, vf->k), vf->n);
            }
            csv.row({longldp::to_string(proto), longldp::fmt_double(eps),
                     longldp::fmt_double(alpha), longldp::fmt_double(vf->n),
                     g_str, longldp::fmt_double(v)});
          } catch (const std::exception& e) {
            std::cerr << "note: skipped " << longldp::to_string(proto)
                      << " eps_inf=" << eps << " alpha=" << alpha << ": "
                      << e.what() << "\n";
          }
        }
      }
    }
    csv.close();
  });
}

// ---------------------------------------------------------------------------
// optimal-g
// ---------------------------------------------------------------------------

struct OptgFlags {
  std::vector<double> eps_list{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  std::vector<double> alpha_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  int g_max = 0;
  std::string out;
};

void setup_optimal_g(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "optimal-g",
      "Closed-form vs brute-force optimal hash range over an (eps-inf x "
      "alpha) grid. CSV schema: eps_inf,alpha,g_formula,g_oracle,tie (tie=1 "
      "marks a rounding-boundary disagreement; both values are reported)");
  cmd->fallthrough();
  auto of = std::make_shared<OptgFlags>();
  cmd->add_option("--eps-inf", of->eps_list,
                  "Budget grid (default 0.5,1,...,5)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", of->alpha_list,
                  "eps_1/eps_inf grid (default 0.1,...,0.6)")
      ->delimiter(',');
  cmd->add_option("--g-max", of->g_max,
                  "Brute-force search cap (0 = automatic)");
  cmd->add_option("--out", of->out, "Output CSV path")->required();
  cmd->callback([of]() {
    longldp::CsvWriter csv(of->out);
    csv.row({"eps_inf", "alpha", "g_formula", "g_oracle", "tie"});
    for (const double eps : of->eps_list) {
      for (const double alpha : of->alpha_list) {
        try {
          const int gf = longldp::optimal_g(eps, alpha);
          const int go = longldp::optimal_g_bruteforce(eps, alpha, of->g_max);
          csv.row({longldp::fmt_double(eps), longldp::fmt_double(alpha),
                   std::to_string(gf), std::to_string(go),
                   gf == go ? "0" : "1"});
        } catch (const std::exception& e) {
          std::cerr << "note: skipped eps_inf=" << eps << " alpha=" << alpha
                    << ": " << e.what() << "\n";
        }
      }
    }
    csv.close();
  });
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

struct AttackFlags {
  std::vector<double> eps_list{0.5, 2.0, 5.0};
  std::vector<int> d_list;  // empty -> {1, b}
  int n = 2000;
  int k = 120;
  int tau = 60;
  double p_ch = 0.25;
  int b = 0;  // 0 -> k
  int runs = 1;
  std::string out;
};

void setup_attack(CLI::App& app, std::uint64_t* seed, int* workers) {
  auto* cmd = app.add_subcommand(
      "attack",
      "Change-detection attack on the single-round sampled-bit protocol over "
      "an evolving synthetic dataset. CSV schema: eps_inf,d,b,attack_rate "
      "(fraction of users with >= 1 bucket change whose every change step "
      "produced a changed report)");
  cmd->fallthrough();
  auto af = std::make_shared<AttackFlags>();
  cmd->add_option("--eps-inf", af->eps_list, "Budget grid (default 0.5,2,5)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--d", af->d_list,
                  "Sampled-bucket grid (default: 1 and b)")
      ->delimiter(',');
  cmd->add_option("--n", af->n, "Users")->check(CLI::PositiveNumber);
  cmd->add_option("--k", af->k, "Domain size")
      ->check(CLI::Range(2, 1000000000));
  cmd->add_option("--tau", af->tau, "Time steps")->check(CLI::PositiveNumber);
  cmd->add_option("--p-ch", af->p_ch, "Per-step change probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--b", af->b, "Bucket count (default: k)");
  cmd->add_option("--runs", af->runs, "Repetitions per grid point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", af->out, "Output CSV path")->required();
  cmd->callback([seed, workers, af]() {
    const longldp::UserSequences data =
        longldp::gen_syn(af->n, af->k, af->tau, af->p_ch, *seed);
    const int b = af->b > 0 ? af->b : af->k;
    std::vector<int> d_list = af->d_list;
    if (d_list.empty()) d_list = {1, b};
    longldp::CsvWriter csv(af->out);
    csv.row({"eps_inf", "d", "b", "attack_rate"});
    for (const double eps : af->eps_list) {
      for (const int d : d_list) {
        longldp::ExperimentConfig cfg;
        cfg.protocol = longldp::Protocol::kDbit;
        cfg.eps_inf = eps;
        cfg.b = b;
        cfg.d = d;
        cfg.seed = *seed;
        cfg.runs = af->runs;
        cfg.workers = *workers;
        cfg.keep_estimates = false;
        const longldp::ExperimentResult res =
            longldp::run_experiment(cfg, data);
        csv.row({longldp::fmt_double(eps), std::to_string(d),
                 std::to_string(b),
                 longldp::fmt_double(res.metrics.attack_rate)});
      }
    }
    csv.close();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "longldp: simulator for locally-differentially-private frequency "
      "estimation of evolving categorical data (local-hashing protocols with "
      "memoization, unary-encoding and randomized-response baselines, and a "
      "single-round sampled-bit baseline)"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file (TOML-style key=value with [subcommand] "
                 "sections); command-line flags override file values");

  std::uint64_t seed = 1;
  int workers = 1;
  app.add_option("--seed", seed, "Master seed (default 1)")->configurable(true);
  app.add_option("--workers", workers,
                 "Worker threads; affects scheduling only, never output")
      ->check(CLI::PositiveNumber)
      ->configurable(true);

  setup_gen_data(app, &seed, &workers);
  setup_run(app, &seed, &workers);
  setup_variance(app);
  setup_optimal_g(app);
  setup_attack(app, &seed, &workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
