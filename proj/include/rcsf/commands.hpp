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

// Subcommand implementations behind the `rcsf` tool. Each returns the process
// exit code: 0 on success, 2 when some input files failed but output was
// still produced, 1 on a fatal error.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcsf/rcsf.hpp"

namespace rcsf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

inline constexpr int kMinQuefrencyOrder = 7, kMaxQuefrencyOrder = 23;
inline constexpr int kMinTemporalOrder = 5, kMaxTemporalOrder = 19;

/// Parses "lo:hi:step" (or a single integer) into an inclusive integer range.
inline std::vector<int> parse_range(const std::string& text) {
  std::vector<int> parts;
  std::size_t start = 0;
  try {
    while (true) {
      const std::size_t colon = text.find(':', start);
      parts.push_back(std::stoi(text.substr(start, colon - start)));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("bad range '" + text + "', expected lo:hi:step");
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
    throw InvalidArgument("bad range '" + text + "', expected lo:hi:step with lo <= hi and step > 0");
  }
  std::vector<int> out;
  for (int v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
  return out;
}

/// Grid of C x gamma from two log2-exponent ranges.
inline std::vector<GridPoint> make_grid(const std::string& c_log2, const std::string& gamma_log2) {
  std::vector<GridPoint> g;
  for (int lc : parse_range(c_log2))
    for (int lg : parse_range(gamma_log2)) g.push_back({std::ldexp(1.0, lc), std::ldexp(1.0, lg)});
  return g;
}

struct FeatureFlags {
  std::string family = "RCSF";
  int quefrency_order = 23;
  int temporal_order = 15;

  FeatureConfig config() const {
    auto fam = parse_family(family);
    if (!fam) throw InvalidArgument("unknown feature family '" + family + "'");
    check_orders(quefrency_order, temporal_order);
    FeatureConfig c;
    c.family = *fam;
    c.quefrency_order = quefrency_order;
    c.temporal_order = temporal_order;
    c.validate();
    return c;
  }

  static void check_orders(int q, int t) {
    if (q < kMinQuefrencyOrder || q > kMaxQuefrencyOrder) {
      throw InvalidArgument("quefrency order " + std::to_string(q) + " outside [7, 23]");
    }
    if (t < kMinTemporalOrder || t > kMaxTemporalOrder) {
      throw InvalidArgument("temporal order " + std::to_string(t) + " outside [5, 19]");
    }
  }
};

struct GridFlags {
  std::string c_log2 = "-5:15:2";
  std::string gamma_log2 = "-15:3:2";
  int folds = 5;
  double kkt_tolerance = 1e-3;
  int max_passes = 1000;

  TrainConfig train_config(std::uint64_t seed) const {
    TrainConfig t;
    t.folds = folds;
    t.seed = seed;
    t.kkt_tolerance = kkt_tolerance;
    t.max_passes = max_passes;
    return t;
  }
};

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

inline void report_failures(const std::vector<FileFailure>& failures, std::ostream& log) {
  for (const auto& f : failures) log << "error: " << f.message << '\n';
}

// ---------------------------------------------------------------- extract

struct ExtractOptions {
  std::filesystem::path manifest;
  FeatureFlags features;
  std::string split = "all";  // train | test | all
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

inline int cmd_extract(const ExtractOptions& o, std::ostream& log) {
  const FeatureConfig cfg = o.features.config();
  const DatasetManifest manifest = load_manifest(o.manifest);
  std::vector<ManifestEntry> entries;
  if (o.split == "all") {
    entries = manifest.entries;
  } else if (auto s = parse_split(o.split)) {
    entries = manifest.select(*s);
  } else {
    throw InvalidArgument("split must be train, test or all");
  }
  const ExtractedEntries ex = extract_entries(entries, cfg, NoiseOptions{o.snr_db, o.seed});
  save_features(o.out, ex.table);
  report_failures(ex.failures, log);
  log << "extracted " << ex.table.rows.size() << " of " << entries.size() << " clips (" << cfg.canonical_string()
      << ") -> " << o.out.string() << '\n';
  return ex.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::filesystem::path features;
  GridFlags grid;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

inline int cmd_train(const TrainOptions& o, std::ostream& log) {
  const FeatureTable table = load_features(o.features);
  const auto grid = make_grid(o.grid.c_log2, o.grid.gamma_log2);
  const TrainOutcome t = train_on_table(table, grid, o.grid.train_config(o.seed));
  save_model(o.out, t.model);
  log << "grid search over " << grid.size() << " points: C=" << t.search.best.C << " gamma=" << t.search.best.gamma
      << " cv_accuracy=" << t.search.best_accuracy << "; " << t.model.num_support_vectors() << " support vectors -> "
      << o.out.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- predict

struct PredictOptions {
  std::filesystem::path model;
  std::optional<std::filesystem::path> audio;
  std::optional<std::filesystem::path> features;
  std::optional<std::filesystem::path> out;  // JSON
};

inline int cmd_predict(const PredictOptions& o, std::ostream& out, std::ostream& log) {
  if (o.audio.has_value() == o.features.has_value()) throw InvalidArgument("give exactly one of --audio or --features");
  const SvmModel model = load_model(o.model);
  nlohmann::json results = nlohmann::json::array();
  char buf[128];
  if (o.audio) {
    const FeatureExtractor extractor(model_feature_config(model));
    const auto clips = split_into_clips(load_audio(*o.audio));
    if (clips.empty()) log << "warning: " << o.audio->string() << " is shorter than one 10 s clip\n";
    for (const auto& clip : clips) {
      const ClipFeatureVector v = extractor.extract(clip);
      const Prediction p = predict(model, v.values, v.fingerprint);
      std::snprintf(buf, sizeof buf, "%.1f\t%s\t%.9g\n", clip.source_offset_s,
                    std::string(to_string(from_sign(p.label))).c_str(), p.decision_value);
      out << buf;
      results.push_back({{"offset_s", clip.source_offset_s},
                         {"class", to_string(from_sign(p.label))},
                         {"decision_value", p.decision_value}});
    }
  } else {
    const FeatureTable table = load_features(*o.features);
    ConfusionCounts counts;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const Prediction p = predict(model, table.rows[i].values, table.fingerprint());
      counts.add(to_sign(table.rows[i].label), p.label);
      std::snprintf(buf, sizeof buf, "%zu\t%s\t%.9g\n", i, std::string(to_string(from_sign(p.label))).c_str(),
                    p.decision_value);
      out << buf;
      results.push_back({{"index", i},
                         {"class", to_string(from_sign(p.label))},
                         {"label", to_string(table.rows[i].label)},
                         {"decision_value", p.decision_value}});
    }
    const Metrics m = metrics(counts);
    log << "against file labels: F1 " << format_pct(m.f1_pct) << " %, precision " << format_pct(m.precision_pct)
        << " %, recall " << format_pct(m.recall_pct) << " %\n";
  }
  if (o.out) write_json_file(*o.out, results);
  return kExitOk;
}

// ---------------------------------------------------------------- scan

struct ScanOptions {
  std::filesystem::path model;
  std::filesystem::path audio;
  double threshold_pct = kDefaultThresholdPct;
  bool inclusive = false;  // rate == threshold counts as X-rated
  std::optional<std::filesystem::path> out;
};

inline int cmd_scan(const ScanOptions& o, std::ostream& out, std::ostream& /*log*/) {
  const SvmModel model = load_model(o.model);
  const HarmfulRateReport r = scan_recording(model, load_audio(o.audio), o.threshold_pct, !o.inclusive);
  out << to_text(r);
  if (o.out) write_json_file(*o.out, to_json(r));
  return kExitOk;
}

// ---------------------------------------------------------------- noise

struct NoiseCmdOptions {
  std::filesystem::path manifest;
  double snr_db = 5.0;
  std::uint64_t seed = 0;
  std::string split = "test";  // entries to corrupt: train | test | all
  std::filesystem::path out;   // directory
};

/// Writes noise-corrupted float WAV copies of the selected entries and a
/// manifest.jsonl in the output directory. Entries outside the selected split
/// are carried over pointing at their original audio.
inline int cmd_noise(const NoiseCmdOptions& o, std::ostream& log) {
  const DatasetManifest manifest = load_manifest(o.manifest);
  std::optional<Split> only;
  if (o.split != "all") {
    only = parse_split(o.split);
    if (!only) throw InvalidArgument("split must be train, test or all");
  }
  std::filesystem::create_directories(o.out);
  DatasetManifest result;
  std::vector<FileFailure> failures;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    ManifestEntry e = manifest.entries[i];
    if (only && e.split != *only) {
      e.audio_path = std::filesystem::absolute(e.audio_path);
      result.entries.push_back(e);
      continue;
    }
    try {
      const PcmClip noisy = add_awgn(load_audio(e.audio_path), o.snr_db, derive_seed(o.seed, i));
      char name[32];
      std::snprintf(name, sizeof name, "noisy_%05zu_", i);
      const std::filesystem::path file = std::string(name) + e.audio_path.filename().string();
      write_wav(o.out / file, noisy, WavSampleFormat::float32);
      e.audio_path = file;
      result.entries.push_back(e);
    } catch (const Error& err) {
      failures.push_back({e.audio_path, err.what()});
    }
  }
  std::ofstream mf(o.out / "manifest.jsonl");
  write_manifest(mf, result);
  report_failures(failures, log);
  log << "wrote " << result.entries.size() << " entries at " << o.snr_db << " dB SNR -> "
      << (o.out / "manifest.jsonl").string() << '\n';
  return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::filesystem::path model;
  std::filesystem::path manifest;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
};

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& log) {
  const SvmModel model = load_model(o.model);
  const ManifestEvaluation ev =
      evaluate_manifest(model, load_manifest(o.manifest), model_feature_config(model), NoiseOptions{o.snr_db, o.seed});
  out << to_text(ev);
  if (o.out) write_json_file(*o.out, to_json(ev));
  report_failures(ev.failures, log);
  return ev.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- sweep

struct SweepCmdOptions {
  std::filesystem::path manifest;
  std::string family = "RCSF";
  std::string q_range = "7:23:2";
  std::string t_range = "5:19:2";
  GridFlags grid;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
};

inline int cmd_sweep(const SweepCmdOptions& o, std::ostream& out, std::ostream& log) {
  const std::vector<int> qs = parse_range(o.q_range);
  const std::vector<int> ts = parse_range(o.t_range);
  for (int q : qs)
    for (int t : ts) FeatureFlags::check_orders(q, t);
  FeatureFlags ff;
  ff.family = o.family;
  FeatureConfig base = ff.config();

  SweepOptions so;
  so.grid = make_grid(o.grid.c_log2, o.grid.gamma_log2);
  so.train = o.grid.train_config(o.seed);
  so.test_noise = NoiseOptions{o.snr_db, o.seed};
  const SweepResult r = run_sweep(load_manifest(o.manifest), base, qs, ts, so);
  out << to_text(r);
  if (o.out) write_json_file(*o.out, to_json(r));
  report_failures(r.failures, log);
  return r.failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  std::filesystem::path out;
  std::size_t per_class = 40;
  std::uint64_t seed = 1;
  std::size_t recording_clips = 0;  // also write recording.wav of this many clips
};

inline int cmd_synth(const SynthOptions& o, std::ostream& log) {
  const DatasetManifest m = write_synth_corpus(o.out, o.per_class, o.seed);
  log << "wrote " << m.entries.size() << " clips -> " << (o.out / "manifest.jsonl").string() << '\n';
  if (o.recording_clips > 0) {
    std::mt19937_64 rng(derive_seed(o.seed, 0xC0FFEE));
    std::bernoulli_distribution obscene(0.5);
    PcmClip rec;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < o.recording_clips; ++i) {
      const bool pos = obscene(rng);
      positives += pos ? 1 : 0;
      const SynthKind kind = pos ? SynthKind::chirp_train : SynthKind::tone_bursts;
      const PcmClip c = synth_clip(kind, derive_seed(o.seed, 1'000'000 + i));
      rec.samples.insert(rec.samples.end(), c.samples.begin(), c.samples.end());
    }
    write_wav(o.out / "recording.wav", rec);
    log << "wrote recording.wav: " << o.recording_clips << " clips, " << positives << " synthesized as obscene\n";
  }
  return kExitOk;
}

}  // namespace rcsf::cli
