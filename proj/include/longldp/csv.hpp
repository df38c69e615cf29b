// SPDX-License-Identifier: Apache-2.0
//
// Minimal CSV plumbing shared by the harness and the CLI. All numeric output
// is formatted with "%.12g" so files are byte-stable across runs and worker
// counts; fields never contain commas or quotes in the schemas used here.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "longldp/server.hpp"

namespace longldp {

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::string(buf);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Strips a trailing '\r' so CRLF files parse identically to LF files.
inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) {
      throw std::runtime_error("cannot open for writing: " + path);
    }
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("error while writing CSV");
  }

 private:
  std::ofstream out_;
};

// Estimate-matrix export, schema: t,value,f_hat[,f_true]. Row order: t-major,
// then value. `truth` (per-step frequencies, same shape) is optional.
inline void write_estimate_matrix(const std::string& path,
                                  const EstimateMatrix& est,
                                  const std::vector<std::vector<double>>* truth = nullptr) {
  CsvWriter w(path);
  if (truth) {
    w.row({"t", "value", "f_hat", "f_true"});
  } else {
    w.row({"t", "value", "f_hat"});
  }
  for (int t = 0; t < est.tau; ++t) {
    const auto& row = est.values[static_cast<std::size_t>(t)];
    for (int v = 1; v <= est.k; ++v) {
      std::vector<std::string> fields{std::to_string(t + 1), std::to_string(v),
                                      fmt_double(row[static_cast<std::size_t>(v - 1)])};
      if (truth) {
        fields.push_back(fmt_double(
            (*truth)[static_cast<std::size_t>(t)][static_cast<std::size_t>(v - 1)]));
      }
      w.row(fields);
    }
  }
  w.close();
}

}  // namespace longldp
