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

// JSON Lines dataset manifest: one {"path", "label", "category", "split"}
// object per line.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rcsf/error.hpp"

namespace rcsf {

enum class Label { obscene, non_obscene };
enum class Split { train, test };

inline std::string_view to_string(Label l) { return l == Label::obscene ? "obscene" : "non_obscene"; }
inline std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "obscene") return Label::obscene;
  if (s == "non_obscene") return Label::non_obscene;
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  return std::nullopt;
}

/// +1 for the positive (obscene) class, -1 otherwise.
inline int to_sign(Label l) { return l == Label::obscene ? +1 : -1; }
inline Label from_sign(int s) { return s > 0 ? Label::obscene : Label::non_obscene; }

struct ManifestEntry {
  std::filesystem::path audio_path;
  Label label = Label::non_obscene;
  std::string category;  // FMSS, FMSM, MASS, MASM, BOSS, BOSM or a genre; may be empty
  Split split = Split::train;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> select(Split s) const {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(e);
    return out;
  }
};

/// Parses manifest lines. Relative paths are resolved against base_dir.
/// Blank lines are skipped.
inline DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {}) {
  DatasetManifest m;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] { return "manifest line " + std::to_string(lineno) + ": "; };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where() + e.what());
    }
    if (!j.is_object()) throw FormatError(where() + "expected a JSON object");
    if (!j.contains("path") || !j["path"].is_string()) throw FormatError(where() + "missing string field 'path'");
    if (!j.contains("label") || !j["label"].is_string()) throw FormatError(where() + "missing string field 'label'");
    if (!j.contains("split") || !j["split"].is_string()) throw FormatError(where() + "missing string field 'split'");

    ManifestEntry e;
    std::filesystem::path p = j["path"].get<std::string>();
    e.audio_path = (p.is_relative() && !base_dir.empty()) ? (base_dir / p).lexically_normal() : p.lexically_normal();
    auto label = parse_label(j["label"].get<std::string>());
    if (!label) throw FormatError(where() + "label must be \"obscene\" or \"non_obscene\"");
    e.label = *label;
    auto split = parse_split(j["split"].get<std::string>());
    if (!split) throw FormatError(where() + "split must be \"train\" or \"test\"");
    e.split = *split;
    if (j.contains("category") && !j["category"].is_null()) {
      if (!j["category"].is_string()) throw FormatError(where() + "category must be a string");
      e.category = j["category"].get<std::string>();
    }
    if (!seen.insert(e.audio_path.string()).second) {
      throw FormatError(where() + "duplicate path " + e.audio_path.string());
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open manifest");
  return parse_manifest(in, path.parent_path());
}

inline void write_manifest(std::ostream& out, const DatasetManifest& m) {
  for (const auto& e : m.entries) {
    nlohmann::json j;
    j["path"] = e.audio_path.string();
    j["label"] = std::string(to_string(e.label));
    if (!e.category.empty()) j["category"] = e.category;
    j["split"] = std::string(to_string(e.split));
    out << j.dump() << '\n';
  }
}

}  // namespace rcsf
