// Copyright 2026 The rcsf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Columnar feature text file. The first line is
//   #rcsf-features v1 fingerprint=<hex> <canonical config>
// followed by one line per clip: the label, then whitespace-separated reals
// printed in shortest round-trip form.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcsf/error.hpp"
#include "rcsf/features.hpp"
#include "rcsf/manifest.hpp"

namespace rcsf {

inline constexpr std::string_view kFeatureFileMagic = "#rcsf-features";

struct FeatureRow {
  Label label = Label::non_obscene;
  std::vector<double> values;
};

struct FeatureTable {
  FeatureConfig config;
  std::vector<FeatureRow> rows;

  std::string fingerprint() const { return config.fingerprint(); }
};

inline void append_real(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void write_features(std::ostream& out, const FeatureTable& table) {
  out << kFeatureFileMagic << " v1 fingerprint=" << table.fingerprint() << ' ' << table.config.canonical_string()
      << '\n';
  std::string line;
  for (const auto& row : table.rows) {
    line.assign(to_string(row.label));
    for (double v : row.values) {
      line.push_back(' ');
      append_real(line, v);
    }
    line.push_back('\n');
    out << line;
  }
}

inline FeatureTable read_features(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("feature file: empty");
  std::istringstream hs(header);
  std::string magic, version, fp;
  hs >> magic >> version >> fp;
  if (magic != kFeatureFileMagic || version != "v1" || fp.rfind("fingerprint=", 0) != 0) {
    throw FormatError("feature file: bad header line");
  }
  std::string rest;
  std::getline(hs, rest);
  FeatureTable table;
  table.config = FeatureConfig::parse(rest);
  if (table.fingerprint() != fp.substr(12)) {
    throw FormatError("feature file: header fingerprint does not match its configuration");
  }
  const std::size_t dim = table.config.vector_dim();

  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end && *p == ' ') ++p;
    const char* tok = p;
    while (p < end && *p != ' ' && *p != '\t') ++p;
    auto label = parse_label(std::string_view(tok, static_cast<std::size_t>(p - tok)));
    if (!label) throw FormatError("feature file line " + std::to_string(lineno) + ": bad label");
    FeatureRow row;
    row.label = *label;
    row.values.reserve(dim);
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      double v;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) throw FormatError("feature file line " + std::to_string(lineno) + ": bad number");
      row.values.push_back(v);
      p = res.ptr;
    }
    if (row.values.size() != dim) {
      throw FormatError("feature file line " + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                        " values, found " + std::to_string(row.values.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FeatureTable load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open feature file");
  return read_features(in);
}

inline void save_features(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  write_features(out, table);
}

}  // namespace rcsf
