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

// Manifest-level workflows: batch feature extraction, held-out evaluation with
// a per-category breakdown, and quefrency/temporal order sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcsf/audio_io.hpp"
#include "rcsf/eval.hpp"
#include "rcsf/feature_file.hpp"
#include "rcsf/features.hpp"
#include "rcsf/manifest.hpp"
#include "rcsf/svm.hpp"

namespace rcsf {

/// splitmix64 of (seed, index); gives every clip its own noise stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct NoiseOptions {
  std::optional<double> snr_db;  // no noise when absent
  std::uint64_t seed = 0;
};

struct FileFailure {
  std::filesystem::path path;
  std::string message;
};

/// Loads an entry's audio and returns its first complete 10 s clip.
inline PcmClip load_first_clip(const std::filesystem::path& path) {
  const PcmClip audio = load_audio(path);
  auto clips = split_into_clips(audio);
  if (clips.empty()) {
    throw AudioError(path.string() + ": " + std::to_string(audio.duration_s()) +
                     " s of audio is shorter than one 10 s clip");
  }
  return std::move(clips.front());
}

struct ExtractedEntries {
  FeatureTable table;
  std::vector<std::size_t> source;  // index of each row within the input entries
  std::vector<FileFailure> failures;
};

/// Extracts one feature row per entry, in entry order. Entries whose audio
/// cannot be read are recorded as failures and skipped. With noise enabled,
/// entry i is corrupted with seed derive_seed(noise.seed, i).
inline ExtractedEntries extract_entries(std::span<const ManifestEntry> entries, const FeatureConfig& cfg,
                                        const NoiseOptions& noise = {}) {
  const FeatureExtractor extractor(cfg);
  ExtractedEntries out;
  out.table.config = cfg;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      PcmClip clip = load_first_clip(entries[i].audio_path);
      if (noise.snr_db) clip = add_awgn(clip, *noise.snr_db, derive_seed(noise.seed, i));
      out.table.rows.push_back({entries[i].label, extractor.extract(clip).values});
      out.source.push_back(i);
    } catch (const Error& e) {
      out.failures.push_back({entries[i].audio_path, e.what()});
    }
  }
  return out;
}

inline Matrix table_matrix(const FeatureTable& t) {
  Matrix m(t.rows.size(), t.config.vector_dim());
  for (std::size_t r = 0; r < t.rows.size(); ++r) std::copy(t.rows[r].values.begin(), t.rows[r].values.end(), m.row(r).begin());
  return m;
}

inline std::vector<int> table_labels(const FeatureTable& t) {
  std::vector<int> y;
  y.reserve(t.rows.size());
  for (const auto& r : t.rows) y.push_back(to_sign(r.label));
  return y;
}

/// Chooses (C, gamma) by grid search over the table, then trains on all of it.
struct TrainOutcome {
  SvmModel model;
  GridSearchResult search;
};

inline TrainOutcome train_on_table(const FeatureTable& table, std::span<const GridPoint> grid, TrainConfig cfg) {
  const Matrix x = table_matrix(table);
  const std::vector<int> y = table_labels(table);
  TrainOutcome out;
  out.search = grid_search(x, y, grid, cfg);
  cfg.C = out.search.best.C;
  cfg.gamma = out.search.best.gamma;
  out.model = train_model(x, y, cfg, table.fingerprint());
  out.model.feature_config = table.config.canonical_string();
  return out;
}

struct CategoryStats {
  std::size_t clips = 0;
  std::size_t errors = 0;

  double error_rate_pct() const { return clips ? 100.0 * static_cast<double>(errors) / static_cast<double>(clips) : 0.0; }
};

struct EntryDecision {
  std::filesystem::path path;
  std::string category;
  int truth = -1;
  Prediction prediction;
};

struct ManifestEvaluation {
  ConfusionCounts counts;
  std::map<std::string, CategoryStats> per_category;  // keyed by the manifest's category tag
  std::vector<EntryDecision> decisions;
  std::vector<FileFailure> failures;

  Metrics metrics() const { return rcsf::metrics(counts); }
};

inline ManifestEvaluation evaluate_table(const SvmModel& model, const ExtractedEntries& ex,
                                         std::span<const ManifestEntry> entries) {
  ManifestEvaluation ev;
  ev.failures = ex.failures;
  for (std::size_t r = 0; r < ex.table.rows.size(); ++r) {
    const ManifestEntry& e = entries[ex.source[r]];
    const Prediction p = predict(model, ex.table.rows[r].values, ex.table.fingerprint());
    const int truth = to_sign(e.label);
    ev.counts.add(truth, p.label);
    auto& cat = ev.per_category[e.category.empty() ? std::string(to_string(e.label)) : e.category];
    cat.clips += 1;
    cat.errors += p.label != truth ? 1 : 0;
    ev.decisions.push_back({e.audio_path, e.category, truth, p});
  }
  return ev;
}

/// Classifies every test-split entry and tallies the confusion counts.
inline ManifestEvaluation evaluate_manifest(const SvmModel& model, const DatasetManifest& manifest,
                                            const FeatureConfig& cfg, const NoiseOptions& noise = {}) {
  if (!model.feature_fingerprint.empty() && model.feature_fingerprint != cfg.fingerprint()) {
    throw FingerprintMismatch("model expects features " + model.feature_fingerprint + ", configuration gives " +
                              cfg.fingerprint());
  }
  const auto test = manifest.select(Split::test);
  if (test.empty()) throw InvalidArgument("evaluate_manifest: manifest has no test entries");
  return evaluate_table(model, extract_entries(test, cfg, noise), test);
}

inline nlohmann::json to_json(const ManifestEvaluation& ev) {
  const Metrics m = ev.metrics();
  nlohmann::json j;
  j["counts"] = {{"tp", ev.counts.tp}, {"tn", ev.counts.tn}, {"fp", ev.counts.fp}, {"fn", ev.counts.fn}};
  j["precision_pct"] = optional_json(m.precision_pct);
  j["recall_pct"] = optional_json(m.recall_pct);
  j["f1_pct"] = optional_json(m.f1_pct);
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [name, s] : ev.per_category) {
    cats[name] = {{"clips", s.clips}, {"errors", s.errors}, {"error_rate_pct", s.error_rate_pct()}};
  }
  j["per_category"] = std::move(cats);
  auto fails = nlohmann::json::array();
  for (const auto& f : ev.failures) fails.push_back({{"path", f.path.string()}, {"error", f.message}});
  j["failures"] = std::move(fails);
  return j;
}

inline std::string to_text(const ManifestEvaluation& ev) {
  const Metrics m = ev.metrics();
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "F1-score(%%) %s  Precision(%%) %s  Recall(%%) %s\n", format_pct(m.f1_pct).c_str(),
                format_pct(m.precision_pct).c_str(), format_pct(m.recall_pct).c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "tp %zu  tn %zu  fp %zu  fn %zu\n", ev.counts.tp, ev.counts.tn, ev.counts.fp,
                ev.counts.fn);
  out += buf;
  out += "Category                 Classification error rate(%)\n";
  for (const auto& [name, s] : ev.per_category) {
    const std::string label = name + " (" + std::to_string(s.clips) + ")";
    std::snprintf(buf, sizeof buf, "%-24s %.2f\n", label.c_str(), s.error_rate_pct());
    out += buf;
  }
  if (!ev.failures.empty()) {
    out += "excluded (unreadable): " + std::to_string(ev.failures.size()) + "\n";
  }
  return out;
}

/// The feature configuration a model was trained with.
inline FeatureConfig model_feature_config(const SvmModel& model) {
  if (model.feature_config.empty()) throw FormatError("model does not record its feature configuration");
  FeatureConfig cfg = FeatureConfig::parse(model.feature_config);
  if (!model.feature_fingerprint.empty() && cfg.fingerprint() != model.feature_fingerprint) {
    throw FormatError("model feature configuration does not match its fingerprint");
  }
  return cfg;
}

/// Splits a recording into 10 s clips, classifies each one and applies the
/// harmful-rate rule.
inline HarmfulRateReport scan_recording(const SvmModel& model, const PcmClip& recording,
                                        double threshold_pct = kDefaultThresholdPct, bool strict = true) {
  const FeatureExtractor extractor(model_feature_config(model));
  std::vector<ClipDecision> decisions;
  for (const PcmClip& clip : split_into_clips(recording)) {
    const ClipFeatureVector v = extractor.extract(clip);
    const Prediction p = predict(model, v.values, v.fingerprint);
    decisions.push_back({clip.source_offset_s, p.label, p.decision_value});
  }
  return harmful_rate(std::move(decisions), threshold_pct, strict);
}

struct SweepOptions {
  std::vector<GridPoint> grid = default_grid();
  TrainConfig train;
  NoiseOptions test_noise;
};

struct SweepRow {
  int quefrency_order = 0;
  std::optional<int> temporal_order;
  GridPoint chosen;
  double cv_accuracy = 0.0;
  ConfusionCounts counts;
  Metrics metrics;
};

struct SweepSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

struct SweepResult {
  FeatureFamily family = FeatureFamily::rcsf;
  std::vector<SweepRow> rows;
  std::vector<FileFailure> failures;
  SweepSummary f1, precision, recall;
};

inline SweepSummary summarize(const std::vector<SweepRow>& rows, std::optional<double> Metrics::*field) {
  SweepSummary s;
  std::vector<double> v;
  for (const auto& r : rows)
    if (r.metrics.*field) v.push_back(*(r.metrics.*field));
  s.count = v.size();
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(v.size()));
  return s;
}

/// Trains and tests every (quefrency, temporal) order pair. Features are
/// extracted once at the largest orders and truncated per pair. Orders that do
/// not apply to the family are ignored (one row per quefrency order for MFCC
/// families, a single row for LLF families).
inline SweepResult run_sweep(const DatasetManifest& manifest, const FeatureConfig& base, std::vector<int> q_values,
                             std::vector<int> t_values, const SweepOptions& opt) {
  SweepResult res;
  res.family = base.family;
  if (!is_cepstral(base.family)) q_values = {base.quefrency_order};
  if (base.family != FeatureFamily::rcsf) t_values = {base.temporal_order};
  if (q_values.empty() || t_values.empty()) throw InvalidArgument("run_sweep: empty order range");

  FeatureConfig full = base;
  full.quefrency_order = *std::max_element(q_values.begin(), q_values.end());
  full.temporal_order = *std::max_element(t_values.begin(), t_values.end());
  full.validate();

  const auto train_entries = manifest.select(Split::train);
  const auto test_entries = manifest.select(Split::test);
  if (train_entries.empty() || test_entries.empty()) throw InvalidArgument("run_sweep: manifest needs train and test entries");
  const ExtractedEntries train_full = extract_entries(train_entries, full);
  const ExtractedEntries test_full = extract_entries(test_entries, full, opt.test_noise);
  res.failures = train_full.failures;
  res.failures.insert(res.failures.end(), test_full.failures.begin(), test_full.failures.end());

  auto project = [&](const ExtractedEntries& src, const FeatureConfig& cfg) {
    ExtractedEntries out;
    out.table.config = cfg;
    out.source = src.source;
    for (const auto& row : src.table.rows) {
      ClipFeatureVector v{row.values, full.fingerprint(), 0};
      out.table.rows.push_back({row.label, project_feature(v, full, cfg).values});
    }
    return out;
  };

  for (int q : q_values) {
    for (int t : t_values) {
      FeatureConfig cfg = base;
      cfg.quefrency_order = q;
      cfg.temporal_order = t;
      const ExtractedEntries train = project(train_full, cfg);
      const ExtractedEntries test = project(test_full, cfg);
      const TrainOutcome trained = train_on_table(train.table, opt.grid, opt.train);
      const ManifestEvaluation ev = evaluate_table(trained.model, test, test_entries);
      SweepRow row;
      row.quefrency_order = q;
      if (base.family == FeatureFamily::rcsf) row.temporal_order = t;
      row.chosen = trained.search.best;
      row.cv_accuracy = trained.search.best_accuracy;
      row.counts = ev.counts;
      row.metrics = ev.metrics();
      res.rows.push_back(row);
    }
  }
  res.f1 = summarize(res.rows, &Metrics::f1_pct);
  res.precision = summarize(res.rows, &Metrics::precision_pct);
  res.recall = summarize(res.rows, &Metrics::recall_pct);
  return res;
}

inline std::string to_text(const SweepResult& r) {
  char buf[256];
  std::string out = "Q   T   F1-score(%)  Precision(%)  Recall(%)  C          gamma      cv_acc\n";
  for (const auto& row : r.rows) {
    const std::string t = row.temporal_order ? std::to_string(*row.temporal_order) : "-";
    std::snprintf(buf, sizeof buf, "%-3d %-3s %-12s %-13s %-10s %-10g %-10g %.4f\n", row.quefrency_order, t.c_str(),
                  format_pct(row.metrics.f1_pct).c_str(), format_pct(row.metrics.precision_pct).c_str(),
                  format_pct(row.metrics.recall_pct).c_str(), row.chosen.C, row.chosen.gamma, row.cv_accuracy);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "Mean/Std %.2f/%.2f  %.2f/%.2f  %.2f/%.2f\n", r.f1.mean, r.f1.stddev,
                r.precision.mean, r.precision.stddev, r.recall.mean, r.recall.stddev);
  out += buf;
  return out;
}

inline nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json j;
  j["family"] = std::string(to_string(r.family));
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"quefrency_order", row.quefrency_order},
                    {"temporal_order", row.temporal_order ? nlohmann::json(*row.temporal_order) : nlohmann::json(nullptr)},
                    {"C", row.chosen.C},
                    {"gamma", row.chosen.gamma},
                    {"cv_accuracy", row.cv_accuracy},
                    {"counts", {{"tp", row.counts.tp}, {"tn", row.counts.tn}, {"fp", row.counts.fp}, {"fn", row.counts.fn}}},
                    {"f1_pct", optional_json(row.metrics.f1_pct)},
                    {"precision_pct", optional_json(row.metrics.precision_pct)},
                    {"recall_pct", optional_json(row.metrics.recall_pct)}});
  }
  j["rows"] = std::move(rows);
  auto summ = [](const SweepSummary& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}}; };
  j["summary"] = {{"f1_pct", summ(r.f1)}, {"precision_pct", summ(r.precision)}, {"recall_pct", summ(r.recall)}};
  return j;
}

}  // namespace rcsf
