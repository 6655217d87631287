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

// rcsf: obscene-sound detection and harmful-rate scanning from the command line.
//
//   rcsf synth    --out corpus --per-class 40
//   rcsf extract  --manifest corpus/manifest.jsonl --split train --out train.feat
//   rcsf train    --features train.feat --out model.json
//   rcsf evaluate --model model.json --manifest corpus/manifest.jsonl
//   rcsf scan     --model model.json --audio movie_audio.wav

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rcsf/commands.hpp"

namespace {

void add_feature_flags(CLI::App* app, rcsf::cli::FeatureFlags& f) {
  app->add_option("--family", f.family, "RCSF, MFCC, MFCCD, MFCCDD, LLF_S or LLF_ES")->capture_default_str();
  app->add_option("--quefrency-order", f.quefrency_order, "cepstral coefficients per frame (7..23)")
      ->capture_default_str();
  app->add_option("--temporal-order", f.temporal_order, "temporal DCT coefficients per row, RCSF only (5..19)")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* app, rcsf::cli::GridFlags& g) {
  app->add_option("--c-grid", g.c_log2, "log2(C) range lo:hi:step")->capture_default_str();
  app->add_option("--gamma-grid", g.gamma_log2, "log2(gamma) range lo:hi:step")->capture_default_str();
  app->add_option("--folds", g.folds, "cross-validation folds")->capture_default_str();
  app->add_option("--kkt-tol", g.kkt_tolerance, "SMO KKT tolerance")->capture_default_str();
  app->add_option("--max-passes", g.max_passes, "SMO iteration cap, in multiples of the training size")
      ->capture_default_str();
}

template <typename T>
void add_optional(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
  app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rcsf::cli;
  CLI::App app{"Obscene-sound detection and harmful-rate scanning"};
  app.require_subcommand(1);

  ExtractOptions ext;
  auto* c_ext = app.add_subcommand("extract", "extract one feature vector per manifest clip");
  c_ext->add_option("--manifest", ext.manifest)->required();
  add_feature_flags(c_ext, ext.features);
  c_ext->add_option("--split", ext.split, "train, test or all")->capture_default_str();
  add_optional(c_ext, "--snr-db", ext.snr_db, "add white Gaussian noise at this SNR before extraction");
  c_ext->add_option("--seed", ext.seed)->capture_default_str();
  c_ext->add_option("--out", ext.out, "feature file")->required();

  TrainOptions tr;
  auto* c_tr = app.add_subcommand("train", "grid-search (C, gamma) and train an RBF SVM");
  c_tr->add_option("--features", tr.features)->required();
  add_grid_flags(c_tr, tr.grid);
  c_tr->add_option("--seed", tr.seed, "fold shuffling seed")->capture_default_str();
  c_tr->add_option("--out", tr.out, "model JSON")->required();

  PredictOptions pr;
  auto* c_pr = app.add_subcommand("predict", "classify the 10 s clips of a WAV file, or the rows of a feature file");
  c_pr->add_option("--model", pr.model)->required();
  add_optional(c_pr, "--audio", pr.audio, "WAV input");
  add_optional(c_pr, "--features", pr.features, "feature file input");
  add_optional(c_pr, "--out", pr.out, "JSON results");

  ScanOptions sc;
  auto* c_sc = app.add_subcommand("scan", "harmful rate and X-rated verdict for a long recording");
  c_sc->add_option("--model", sc.model)->required();
  c_sc->add_option("--audio", sc.audio, "recording as WAV (demux video audio beforehand)")->required();
  c_sc->add_option("--threshold-pct", sc.threshold_pct)->capture_default_str();
  c_sc->add_flag("--inclusive", sc.inclusive, "a rate equal to the threshold counts as X-rated");
  add_optional(c_sc, "--out", sc.out, "JSON report");

  NoiseCmdOptions no;
  auto* c_no = app.add_subcommand("noise", "write white-Gaussian-noise corrupted copies of manifest clips");
  c_no->add_option("--manifest", no.manifest)->required();
  c_no->add_option("--snr-db", no.snr_db)->capture_default_str();
  c_no->add_option("--seed", no.seed)->capture_default_str();
  c_no->add_option("--split", no.split, "entries to corrupt: train, test or all")->capture_default_str();
  c_no->add_option("--out", no.out, "output directory")->required();

  EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "score a model on the manifest's test split");
  c_ev->add_option("--model", ev.model)->required();
  c_ev->add_option("--manifest", ev.manifest)->required();
  add_optional(c_ev, "--snr-db", ev.snr_db, "corrupt test clips at this SNR");
  c_ev->add_option("--seed", ev.seed)->capture_default_str();
  add_optional(c_ev, "--out", ev.out, "JSON report");

  SweepCmdOptions sw;
  auto* c_sw = app.add_subcommand("sweep", "train and test every quefrency/temporal order pair");
  c_sw->add_option("--manifest", sw.manifest)->required();
  c_sw->add_option("--family", sw.family)->capture_default_str();
  c_sw->add_option("--quefrency-order", sw.q_range, "range lo:hi:step")->capture_default_str();
  c_sw->add_option("--temporal-order", sw.t_range, "range lo:hi:step")->capture_default_str();
  add_grid_flags(c_sw, sw.grid);
  add_optional(c_sw, "--snr-db", sw.snr_db, "corrupt test clips at this SNR");
  c_sw->add_option("--seed", sw.seed)->capture_default_str();
  add_optional(c_sw, "--out", sw.out, "JSON results");

  SynthOptions sy;
  auto* c_sy = app.add_subcommand("synth", "generate a synthetic labelled corpus");
  c_sy->add_option("--out", sy.out, "output directory")->required();
  c_sy->add_option("--per-class", sy.per_class)->capture_default_str();
  c_sy->add_option("--seed", sy.seed)->capture_default_str();
  c_sy->add_option("--recording-clips", sy.recording_clips, "also write recording.wav with this many clips")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ext) return cmd_extract(ext, std::cerr);
    if (*c_tr) return cmd_train(tr, std::cerr);
    if (*c_pr) return cmd_predict(pr, std::cout, std::cerr);
    if (*c_sc) return cmd_scan(sc, std::cout, std::cerr);
    if (*c_no) return cmd_noise(no, std::cerr);
    if (*c_ev) return cmd_evaluate(ev, std::cout, std::cerr);
    if (*c_sw) return cmd_sweep(sw, std::cout, std::cerr);
    if (*c_sy) return cmd_synth(sy, std::cerr);
  } catch (const rcsf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitFatal;
}
