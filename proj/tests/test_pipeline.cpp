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

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rcsf/commands.hpp"
#include "rcsf/rcsf.hpp"

namespace fs = std::filesystem;
using Catch::Approx;

namespace {

int run(const std::string& args, const fs::path& stdout_file = "/dev/null") {
  const std::string cmd = std::string(RCSF_CLI_PATH) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// A small synthetic corpus shared by every test in this file.
const fs::path& corpus() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "rcsf_pipeline_corpus";
    fs::remove_all(d);
    rcsf::write_synth_corpus(d, 12, 5);
    return d;
  }();
  return dir;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rcsf_pipeline_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_lines(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kSmallGrid = " --c-grid 1:3:2 --gamma-grid -9:-7:2";

}  // namespace

TEST_CASE("derive_seed spreads indices") {
  CHECK(rcsf::derive_seed(1, 0) != rcsf::derive_seed(1, 1));
  CHECK(rcsf::derive_seed(1, 0) != rcsf::derive_seed(2, 0));
  CHECK(rcsf::derive_seed(7, 3) == rcsf::derive_seed(7, 3));
}

TEST_CASE("extract writes one row per readable clip") {
  const auto dir = scratch("extract");
  const auto m = rcsf::load_manifest(corpus() / "manifest.jsonl");
  std::ostringstream three;
  for (int i = 0; i < 3; ++i) {
    three << "{\"path\": \"" << m.entries[static_cast<std::size_t>(i)].audio_path.string() << "\", \"label\": \""
          << rcsf::to_string(m.entries[static_cast<std::size_t>(i)].label) << "\", \"split\": \"train\"}\n";
  }
  write_lines(dir / "three.jsonl", three.str());
  REQUIRE(run("extract --manifest " + (dir / "three.jsonl").string() + " --out " + (dir / "a.feat").string()) == 0);
  const auto t = rcsf::load_features(dir / "a.feat");
  CHECK(t.rows.size() == 3);
  CHECK(t.rows[0].values.size() == 690);

  SECTION("reruns are byte-identical") {
    REQUIRE(run("extract --manifest " + (dir / "three.jsonl").string() + " --out " + (dir / "b.feat").string()) == 0);
    CHECK(slurp(dir / "a.feat") == slurp(dir / "b.feat"));
    const std::string noisy = " --snr-db 5 --seed 9 --manifest " + (dir / "three.jsonl").string();
    REQUIRE(run("extract" + noisy + " --out " + (dir / "n1.feat").string()) == 0);
    REQUIRE(run("extract" + noisy + " --out " + (dir / "n2.feat").string()) == 0);
    CHECK(slurp(dir / "n1.feat") == slurp(dir / "n2.feat"));
    CHECK(slurp(dir / "n1.feat") != slurp(dir / "a.feat"));
  }
  SECTION("a missing file is a partial failure") {
    write_lines(dir / "missing.jsonl", three.str() + "{\"path\": \"nowhere.wav\", \"label\": \"obscene\", \"split\": \"train\"}\n");
    CHECK(run("extract --manifest " + (dir / "missing.jsonl").string() + " --out " + (dir / "c.feat").string()) == 2);
    CHECK(rcsf::load_features(dir / "c.feat").rows.size() == 3);
  }
  SECTION("short audio is a partial failure") {
    rcsf::PcmClip tiny;
    tiny.samples.assign(16000, 0.1);
    rcsf::write_wav(dir / "tiny.wav", tiny);
    write_lines(dir / "short.jsonl", three.str() + "{\"path\": \"tiny.wav\", \"label\": \"obscene\", \"split\": \"train\"}\n");
    CHECK(run("extract --manifest " + (dir / "short.jsonl").string() + " --out " + (dir / "d.feat").string()) == 2);
  }
  SECTION("bad arguments are fatal") {
    CHECK(run("extract --manifest " + (dir / "three.jsonl").string() + " --quefrency-order 25 --out " +
              (dir / "e.feat").string()) == 1);
    CHECK(run("extract --manifest " + (dir / "three.jsonl").string() + " --family XYZ --out " +
              (dir / "e.feat").string()) == 1);
  }
}

TEST_CASE("train, predict, evaluate and scan") {
  const auto dir = scratch("train");
  const std::string manifest = (corpus() / "manifest.jsonl").string();
  REQUIRE(run("extract --manifest " + manifest + " --split train --out " + (dir / "train.feat").string()) == 0);
  REQUIRE(run("train --features " + (dir / "train.feat").string() + kSmallGrid + " --out " +
              (dir / "model.json").string()) == 0);
  const auto model = rcsf::load_model(dir / "model.json");
  CHECK(model.feature_fingerprint == rcsf::FeatureConfig{}.fingerprint());

  SECTION("single-class training data is refused") {
    auto t = rcsf::load_features(dir / "train.feat");
    std::erase_if(t.rows, [](const rcsf::FeatureRow& r) { return r.label == rcsf::Label::obscene; });
    rcsf::save_features(dir / "neg.feat", t);
    CHECK(run("train --features " + (dir / "neg.feat").string() + kSmallGrid + " --out " + (dir / "x.json").string()) == 1);
  }
  SECTION("evaluate matches the library") {
    REQUIRE(run("evaluate --model " + (dir / "model.json").string() + " --manifest " + manifest + " --out " +
                (dir / "eval.json").string()) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "eval.json"));
    const auto ev = rcsf::evaluate_manifest(model, rcsf::load_manifest(manifest), rcsf::FeatureConfig{});
    CHECK(j["counts"]["tp"] == ev.counts.tp);
    CHECK(j["counts"]["tn"] == ev.counts.tn);
    CHECK(ev.counts.total() == 12);
  }
  SECTION("predict on features and on audio agree") {
    REQUIRE(run("extract --manifest " + manifest + " --split test --out " + (dir / "test.feat").string()) == 0);
    REQUIRE(run("predict --model " + (dir / "model.json").string() + " --features " + (dir / "test.feat").string() +
                " --out " + (dir / "pf.json").string()) == 0);
    const auto pf = nlohmann::json::parse(slurp(dir / "pf.json"));
    const auto test = rcsf::load_manifest(manifest).select(rcsf::Split::test);
    REQUIRE(pf.size() == test.size());
    REQUIRE(run("predict --model " + (dir / "model.json").string() + " --audio " + test[0].audio_path.string() +
                " --out " + (dir / "pa.json").string()) == 0);
    const auto pa = nlohmann::json::parse(slurp(dir / "pa.json"));
    REQUIRE(pa.size() == 1);
    CHECK(pa[0]["class"] == pf[0]["class"]);
    CHECK(pa[0]["decision_value"].get<double>() == Approx(pf[0]["decision_value"].get<double>()).epsilon(1e-12));
    CHECK(run("predict --model " + (dir / "model.json").string()) == 1);
  }
  SECTION("scan reports the per-clip harmful rate") {
    REQUIRE(run("synth --out " + (dir / "rec").string() + " --per-class 1 --seed 3 --recording-clips 6") == 0);
    const fs::path rec = dir / "rec" / "recording.wav";
    REQUIRE(run("scan --model " + (dir / "model.json").string() + " --audio " + rec.string() + " --out " +
                (dir / "scan.json").string()) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "scan.json"));
    const auto lib = rcsf::scan_recording(model, rcsf::load_audio(rec));
    CHECK(j["total_clips"] == 6);
    CHECK(j["obscene_clips"] == lib.obscene_clips());
    CHECK(j["harmful_rate_pct"].get<double>() == Approx(100.0 * lib.obscene_clips() / 6.0));
    CHECK(j["verdict"] == std::string(rcsf::to_string(lib.verdict)));
    CHECK(j["clips"][3]["offset_s"] == 30.0);
  }
  SECTION("a model for other features is rejected") {
    rcsf::FeatureConfig other;
    other.temporal_order = 7;
    CHECK_THROWS_AS(rcsf::evaluate_manifest(model, rcsf::load_manifest(manifest), other), rcsf::FingerprintMismatch);
  }
}

TEST_CASE("noise writes corrupted test copies") {
  const auto dir = scratch("noise");
  REQUIRE(run("noise --manifest " + (corpus() / "manifest.jsonl").string() + " --snr-db 5 --seed 4 --out " +
              (dir / "noisy").string()) == 0);
  const auto orig = rcsf::load_manifest(corpus() / "manifest.jsonl");
  const auto noisy = rcsf::load_manifest(dir / "noisy" / "manifest.jsonl");
  REQUIRE(noisy.entries.size() == orig.entries.size());
  for (std::size_t i = 0; i < orig.entries.size(); ++i) {
    CHECK(noisy.entries[i].label == orig.entries[i].label);
    CHECK(noisy.entries[i].split == orig.entries[i].split);
    if (orig.entries[i].split == rcsf::Split::train) {
      CHECK(fs::equivalent(noisy.entries[i].audio_path, orig.entries[i].audio_path));
    } else {
      const auto a = rcsf::load_audio(orig.entries[i].audio_path);
      const auto b = rcsf::load_audio(noisy.entries[i].audio_path);
      REQUIRE(a.size() == b.size());
      double sig = 0.0, err = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        sig += a.samples[k] * a.samples[k];
        err += (b.samples[k] - a.samples[k]) * (b.samples[k] - a.samples[k]);
      }
      CHECK(10.0 * std::log10(sig / err) == Approx(5.0).margin(0.1));
    }
  }
}

TEST_CASE("order sweep") {
  const auto dir = scratch("sweep");
  const std::string manifest = (corpus() / "manifest.jsonl").string();
  REQUIRE(run("sweep --manifest " + manifest + " --quefrency-order 7:9:2 --temporal-order 5:7:2" + kSmallGrid +
              " --out " + (dir / "sweep.json").string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "sweep.json"));
  REQUIRE(j["rows"].size() == 4);
  double mean = 0.0, sq = 0.0;
  for (const auto& r : j["rows"]) mean += r["f1_pct"].get<double>() / 4.0;
  for (const auto& r : j["rows"]) sq += std::pow(r["f1_pct"].get<double>() - mean, 2) / 4.0;
  CHECK(j["summary"]["f1_pct"]["mean"].get<double>() == Approx(mean));
  CHECK(j["summary"]["f1_pct"]["std"].get<double>() == Approx(std::sqrt(sq)).margin(1e-9));

  SECTION("a single order pair equals train then evaluate") {
    rcsf::FeatureConfig cfg;
    cfg.quefrency_order = 9;
    cfg.temporal_order = 7;
    rcsf::SweepOptions opt;
    opt.grid = rcsf::cli::make_grid("1:3:2", "-9:-7:2");
    const auto m = rcsf::load_manifest(manifest);
    const auto sweep = rcsf::run_sweep(m, cfg, {9}, {7}, opt);
    REQUIRE(sweep.rows.size() == 1);

    const auto train = rcsf::extract_entries(m.select(rcsf::Split::train), cfg);
    const auto trained = rcsf::train_on_table(train.table, opt.grid, opt.train);
    const auto ev = rcsf::evaluate_manifest(trained.model, m, cfg);
    CHECK(sweep.rows[0].counts == ev.counts);
    CHECK(sweep.rows[0].chosen.C == trained.search.best.C);
    CHECK(sweep.rows[0].chosen.gamma == trained.search.best.gamma);
  }
  SECTION("orders outside the allowed range are fatal") {
    CHECK(run("sweep --manifest " + manifest + " --quefrency-order 5:9:2 --temporal-order 5:7:2") == 1);
  }
}
