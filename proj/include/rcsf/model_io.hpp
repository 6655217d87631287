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

#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rcsf/error.hpp"
#include "rcsf/svm.hpp"

namespace rcsf {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const SvmModel& m) {
  nlohmann::json j;
  j["version"] = kModelFormatVersion;
  j["gamma"] = m.gamma;
  j["C"] = m.C;
  j["bias"] = m.bias;
  j["scaling"] = {{"mins", m.scaling.mins}, {"maxs", m.scaling.maxs}};
  auto svs = nlohmann::json::array();
  for (std::size_t r = 0; r < m.support_vectors.rows(); ++r) {
    auto row = m.support_vectors.row(r);
    svs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["support_vectors"] = std::move(svs);
  j["alphas"] = m.alphas;
  j["labels"] = m.labels;
  j["feature_fingerprint"] = m.feature_fingerprint;
  if (!m.feature_config.empty()) j["feature_config"] = m.feature_config;
  return j;
}

inline SvmModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw FormatError("model: unsupported version " + j.at("version").dump());
    }
    SvmModel m;
    m.gamma = j.at("gamma").get<double>();
    m.bias = j.at("bias").get<double>();
    m.C = j.value("C", 0.0);
    m.scaling.mins = j.at("scaling").at("mins").get<std::vector<double>>();
    m.scaling.maxs = j.at("scaling").at("maxs").get<std::vector<double>>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.feature_fingerprint = j.at("feature_fingerprint").get<std::string>();
    m.feature_config = j.value("feature_config", std::string{});
    const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.support_vectors = rows_to_matrix(rows);

    if (m.scaling.mins.size() != m.scaling.maxs.size()) throw FormatError("model: scaling mins/maxs differ in length");
    if (rows.size() != m.alphas.size() || rows.size() != m.labels.size()) {
      throw FormatError("model: support_vectors, alphas and labels differ in length");
    }
    if (rows.empty()) throw FormatError("model: no support vectors");
    if (!m.scaling.identity() && m.scaling.dim() != m.support_vectors.cols()) {
      throw FormatError("model: scaling dimension does not match support vectors");
    }
    if (!(m.gamma > 0.0)) throw FormatError("model: gamma must be positive");
    for (int l : m.labels)
      if (l != 1 && l != -1) throw FormatError("model: labels must be +1 or -1");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const SvmModel& m) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << model_to_json(m).dump(1) << '\n';
}

inline SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open model");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace rcsf
