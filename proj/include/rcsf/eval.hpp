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

// Clip-level detection metrics and the recording-level harmful-rate verdict.

#pragma once

#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcsf/error.hpp"

namespace rcsf {

inline constexpr double kDefaultThresholdPct = 20.0;

/// Obscene clips are the positive class.
struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }

  void add(int truth, int predicted) {
    if (truth > 0) {
      (predicted > 0 ? tp : fn) += 1;
    } else {
      (predicted > 0 ? fp : tn) += 1;
    }
  }

  bool operator==(const ConfusionCounts&) const = default;
};

/// Percentages; a quantity whose denominator is zero is absent.
struct Metrics {
  std::optional<double> precision_pct;
  std::optional<double> recall_pct;
  std::optional<double> f1_pct;
};

/// Harmonic mean of two percentages. Both zero gives zero.
inline double f1_from(double precision_pct, double recall_pct) {
  const double s = precision_pct + recall_pct;
  return s > 0.0 ? 2.0 * precision_pct * recall_pct / s : 0.0;
}

inline Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision_pct = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall_pct = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision_pct && m.recall_pct) m.f1_pct = f1_from(*m.precision_pct, *m.recall_pct);
  return m;
}

enum class Verdict { general, x_rated };

inline std::string_view to_string(Verdict v) { return v == Verdict::x_rated ? "x_rated" : "general"; }

struct ClipDecision {
  double offset_s = 0.0;
  int label = -1;  // +1 obscene
  double decision_value = 0.0;
};

struct HarmfulRateReport {
  std::vector<ClipDecision> clip_decisions;
  double harmful_rate_pct = 0.0;
  double threshold_pct = kDefaultThresholdPct;
  bool strict = true;
  Verdict verdict = Verdict::general;

  std::size_t obscene_clips() const {
    std::size_t n = 0;
    for (const auto& d : clip_decisions) n += d.label > 0 ? 1 : 0;
    return n;
  }
};

/// Percentage of clips classified obscene. The recording is X-rated when the
/// rate exceeds the threshold (or reaches it, when strict is false).
inline HarmfulRateReport harmful_rate(std::vector<ClipDecision> decisions, double threshold_pct = kDefaultThresholdPct,
                                      bool strict = true) {
  if (decisions.empty()) throw InvalidArgument("harmful_rate: recording holds no complete clip");
  HarmfulRateReport r;
  r.clip_decisions = std::move(decisions);
  r.threshold_pct = threshold_pct;
  r.strict = strict;
  r.harmful_rate_pct = 100.0 * static_cast<double>(r.obscene_clips()) / static_cast<double>(r.clip_decisions.size());
  const bool over = strict ? r.harmful_rate_pct > threshold_pct : r.harmful_rate_pct >= threshold_pct;
  r.verdict = over ? Verdict::x_rated : Verdict::general;
  return r;
}

inline HarmfulRateReport harmful_rate(std::span<const int> labels, double threshold_pct = kDefaultThresholdPct,
                                      bool strict = true) {
  std::vector<ClipDecision> d;
  d.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) d.push_back({static_cast<double>(i) * 10.0, labels[i], 0.0});
  return harmful_rate(std::move(d), threshold_pct, strict);
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::string format_pct(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

inline nlohmann::json to_json(const HarmfulRateReport& r) {
  nlohmann::json j;
  j["harmful_rate_pct"] = r.harmful_rate_pct;
  j["threshold_pct"] = r.threshold_pct;
  j["strict"] = r.strict;
  j["verdict"] = std::string(to_string(r.verdict));
  j["obscene_clips"] = r.obscene_clips();
  j["total_clips"] = r.clip_decisions.size();
  auto clips = nlohmann::json::array();
  for (const auto& d : r.clip_decisions) {
    clips.push_back({{"offset_s", d.offset_s},
                     {"class", d.label > 0 ? "obscene" : "non_obscene"},
                     {"decision_value", d.decision_value}});
  }
  j["clips"] = std::move(clips);
  return j;
}

inline std::string to_text(const HarmfulRateReport& r) {
  std::string out = "offset_s  class        decision\n";
  char buf[128];
  for (const auto& d : r.clip_decisions) {
    std::snprintf(buf, sizeof buf, "%8.1f  %-11s  %+.6f\n", d.offset_s, d.label > 0 ? "obscene" : "non_obscene",
                  d.decision_value);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "harmful rate %.2f %% (%zu of %zu clips), threshold %.2f %% -> %s\n",
                r.harmful_rate_pct, r.obscene_clips(), r.clip_decisions.size(), r.threshold_pct,
                std::string(to_string(r.verdict)).c_str());
  out += buf;
  return out;
}

}  // namespace rcsf
