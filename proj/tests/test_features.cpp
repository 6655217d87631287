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

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "rcsf/feature_file.hpp"
#include "rcsf/features.hpp"

using Catch::Approx;

namespace {

rcsf::PcmClip noise_clip(double seconds, std::uint64_t seed, double amp = 0.3) {
  std::mt19937_64 rng(seed);
  rcsf::PcmClip c;
  c.samples = oracle::random_frame(rng, static_cast<std::size_t>(seconds * 16000));
  // A slow tremolo and a gliding tone give every dimension some variance.
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    const double t = static_cast<double>(i) / 16000.0;
    c.samples[i] = amp * (0.3 * c.samples[i] * (1.2 + std::sin(7.0 * t)) +
                          0.5 * std::sin(2.0 * std::numbers::pi * (300.0 + 200.0 * t) * t));
  }
  return c;
}

rcsf::PcmClip tone(double hz, double seconds, double amp = 0.5) {
  rcsf::PcmClip c;
  c.samples.resize(static_cast<std::size_t>(seconds * 16000));
  for (std::size_t i = 0; i < c.samples.size(); ++i) c.samples[i] = amp * std::sin(2.0 * std::numbers::pi * hz * i / 16000.0);
  return c;
}

rcsf::FeatureConfig config(rcsf::FeatureFamily f, int q = 23, int t = 15) {
  rcsf::FeatureConfig c;
  c.family = f;
  c.quefrency_order = q;
  c.temporal_order = t;
  return c;
}

}  // namespace

TEST_CASE("mfcc_frame") {
  SECTION("constant energies concentrate in c0") {
    const auto c = rcsf::mfcc_frame(std::vector<double>(26, 4.0), 23);
    REQUIRE(c.size() == 23);
    CHECK(c[0] == Approx(26.0 * std::log(4.0 + 1e-10)));
    for (std::size_t q = 1; q < c.size(); ++q) CHECK(std::abs(c[q]) < 1e-12);
  }
  SECTION("matches the defining sum") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> e(26);
    for (double& v : e) v = u(rng);
    e[3] = 0.0;  // the log floor keeps an empty band finite
    const auto c = rcsf::mfcc_frame(e, 20);
    for (std::size_t q = 0; q < 20; ++q) {
      double ref = 0.0;
      for (std::size_t b = 0; b < 26; ++b) ref += std::log(e[b] + 1e-10) * std::cos((2.0 * b + 1.0) * q * std::numbers::pi / 52.0);
      CHECK(c[q] == Approx(ref).margin(1e-9));
    }
  }
  CHECK_THROWS_AS(rcsf::mfcc_frame(std::vector<double>(26, 1.0), 26), rcsf::InvalidArgument);
}

TEST_CASE("delta_coeffs") {
  rcsf::Matrix ramp(10, 2);
  for (std::size_t t = 0; t < 10; ++t) {
    ramp(t, 0) = static_cast<double>(t);
    ramp(t, 1) = 3.0;
  }
  const auto d = rcsf::delta_coeffs(ramp);
  for (std::size_t t = 2; t < 8; ++t) CHECK(d(t, 0) == Approx(1.0));
  for (std::size_t t = 0; t < 10; ++t) CHECK(d(t, 1) == 0.0);
  // Edge frames are replicated: at t = 0 the backward neighbours are all frame 0.
  CHECK(d(0, 0) == Approx((1.0 * 1 + 2.0 * 2) / 10.0));

  std::mt19937_64 rng(4);
  rcsf::Matrix x(12, 3);
  for (std::size_t t = 0; t < 12; ++t)
    for (std::size_t k = 0; k < 3; ++k) x(t, k) = std::uniform_real_distribution<double>(-1, 1)(rng);
  const auto dx = rcsf::delta_coeffs(x);
  for (std::size_t t = 0; t < 12; ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      auto at = [&](long i) { return x(static_cast<std::size_t>(std::clamp(i, 0L, 11L)), k); };
      const long ti = static_cast<long>(t);
      const double ref = (1.0 * (at(ti + 1) - at(ti - 1)) + 2.0 * (at(ti + 2) - at(ti - 2))) / 10.0;
      CHECK(dx(t, k) == Approx(ref).margin(1e-15));
    }
  }
  CHECK_THROWS_AS(rcsf::delta_coeffs(rcsf::Matrix(4, 1)), rcsf::InvalidArgument);
}

TEST_CASE("low-level spectral descriptors") {
  rcsf::PowerSpectrum point;
  point.bins.assign(257, 0.0);
  point.bins[64] = 10.0;
  point.bin_width_hz = 31.25;
  auto cfg = config(rcsf::FeatureFamily::llf_s);
  const auto f = rcsf::llf_frame(point, nullptr, cfg);
  REQUIRE(f.size() == 5);
  CHECK(f[0] == Approx(0.0).margin(1e-9));  // bandwidth
  CHECK(f[1] == Approx(2000.0));            // centroid
  CHECK(f[3] == 0.0);                       // no previous frame
  CHECK(f[4] == Approx(2000.0));            // rolloff

  rcsf::PowerSpectrum flat = point;
  std::fill(flat.bins.begin(), flat.bins.end(), 2.0);
  const auto g = rcsf::llf_frame(flat, &flat, cfg);
  CHECK(g[2] == Approx(1.0));
  CHECK(g[3] == 0.0);
  CHECK(g[1] == Approx(4000.0));

  cfg.family = rcsf::FeatureFamily::llf_es;
  const auto es = rcsf::llf_frame(flat, nullptr, cfg);
  REQUIRE(es.size() == 14);
  CHECK(es[5] == Approx(std::log(2.0 * 257 + 1e-10)));
}

TEST_CASE("temporal DCT of a segment") {
  std::mt19937_64 rng(6);
  rcsf::Matrix mf(32, 23);
  for (std::size_t t = 0; t < 32; ++t)
    for (std::size_t q = 0; q < 23; ++q) mf(t, q) = std::uniform_real_distribution<double>(-5, 5)(rng);
  const auto m = rcsf::rcsf_segment_matrix(mf, 15, 32);
  REQUIRE(m.rows() == 23);
  REQUIRE(m.cols() == 15);
  for (std::size_t q = 0; q < 23; ++q) {
    std::vector<double> traj(32);
    for (std::size_t t = 0; t < 32; ++t) traj[t] = mf(t, q);
    const auto ref = oracle::dct2(traj, 15);
    for (std::size_t n = 0; n < 15; ++n) CHECK(m(q, n) == Approx(ref[n]).margin(1e-9));
  }
  const auto v = rcsf::rcsf_segment_vector(m, 3);
  CHECK(v.segment_index == 3);
  REQUIRE(v.values.size() == 345);
  CHECK(v.values[2 * 15 + 4] == m(2, 4));
  CHECK_THROWS_AS(rcsf::rcsf_segment_matrix(mf, 15, 31), rcsf::InvalidArgument);
}

TEST_CASE("clip geometry and dimensionality") {
  const rcsf::FeatureExtractor ex(config(rcsf::FeatureFamily::rcsf));
  const auto v = ex.extract(noise_clip(10.0, 1));
  CHECK(v.num_segments == 19);
  CHECK(v.values.size() == 690);

  SECTION("every order pair of the sweep grid") {
    const auto clip = noise_clip(1.0, 2);
    for (int q = 7; q <= 23; q += 2) {
      for (int t = 5; t <= 19; t += 2) {
        const auto cfg = config(rcsf::FeatureFamily::rcsf, q, t);
        CHECK(cfg.vector_dim() == static_cast<std::size_t>(2 * q * t));
        CHECK(rcsf::clip_feature(clip, cfg).values.size() == static_cast<std::size_t>(2 * q * t));
      }
    }
  }
  SECTION("comparison families") {
    const auto clip = noise_clip(2.0, 3);
    CHECK(rcsf::clip_feature(clip, config(rcsf::FeatureFamily::mfcc)).values.size() == 46);
    CHECK(rcsf::clip_feature(clip, config(rcsf::FeatureFamily::mfccd)).values.size() == 92);
    CHECK(rcsf::clip_feature(clip, config(rcsf::FeatureFamily::mfccdd)).values.size() == 138);
    CHECK(rcsf::clip_feature(clip, config(rcsf::FeatureFamily::llf_s)).values.size() == 10);
    CHECK(rcsf::clip_feature(clip, config(rcsf::FeatureFamily::llf_es)).values.size() == 28);
  }
  SECTION("too short for one segment") {
    CHECK_THROWS_AS(ex.extract(noise_clip(0.5, 4)), rcsf::InvalidArgument);
  }
}

TEST_CASE("stationary tone has no temporal modulation") {
  // 500 Hz repeats every 32 samples, so every 256-sample hop lands on the same phase.
  const auto segs = rcsf::FeatureExtractor(config(rcsf::FeatureFamily::rcsf)).segment_features(tone(500.0, 10.0));
  for (std::size_t k = 0; k < segs.rows(); ++k) {
    for (std::size_t q = 0; q < 23; ++q) {
      const double c0 = std::abs(segs(k, q * 15));
      for (std::size_t n = 1; n < 15; ++n) CHECK(std::abs(segs(k, q * 15 + n)) <= 1e-6 * c0);
    }
  }
}

TEST_CASE("tiled segment has zero spread across segments") {
  const auto base = noise_clip(8192.0 / 16000.0, 5);
  rcsf::PcmClip tiled;
  while (tiled.samples.size() < 160000) tiled.samples.insert(tiled.samples.end(), base.samples.begin(), base.samples.end());
  tiled.samples.resize(160000);
  const auto v = rcsf::clip_feature(tiled, config(rcsf::FeatureFamily::rcsf));
  for (std::size_t d = 0; d < 345; ++d) CHECK(v.values[345 + d] <= 1e-6 * std::abs(v.values[d]));
}

TEST_CASE("gain changes only the zeroth quefrency row") {
  const auto clip = noise_clip(3.0, 6);
  auto quiet = clip;
  for (double& s : quiet.samples) s *= 0.25;
  const auto cfg = config(rcsf::FeatureFamily::rcsf);
  const auto a = rcsf::clip_feature(clip, cfg).values;
  const auto b = rcsf::clip_feature(quiet, cfg).values;
  for (std::size_t half = 0; half < 2; ++half) {
    for (std::size_t d = 15; d < 345; ++d) {
      const std::size_t i = half * 345 + d;
      CHECK(b[i] == Approx(a[i]).epsilon(1e-6).margin(1e-9));
    }
  }
  CHECK(b[0] != Approx(a[0]));
}

TEST_CASE("extractor matches a from-scratch computation") {
  for (std::uint64_t seed : {21u, 22u}) {
    const auto clip = noise_clip(2.0, seed);
    const auto got = rcsf::clip_feature(clip, config(rcsf::FeatureFamily::rcsf, 13, 9)).values;
    const auto ref = oracle::rcsf_vector(clip.samples, 13, 9);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == Approx(ref[i]).epsilon(1e-7).margin(1e-9));

    const auto mg = rcsf::clip_feature(clip, config(rcsf::FeatureFamily::mfcc, 13)).values;
    const auto mr = oracle::mfcc_vector(clip.samples, 13);
    REQUIRE(mg.size() == mr.size());
    for (std::size_t i = 0; i < mg.size(); ++i) CHECK(mg[i] == Approx(mr[i]).epsilon(1e-7).margin(1e-9));
  }
}

TEST_CASE("projecting to lower orders equals direct extraction") {
  const auto clip = noise_clip(2.0, 7);
  for (auto fam : {rcsf::FeatureFamily::rcsf, rcsf::FeatureFamily::mfccdd}) {
    const auto full_cfg = config(fam, 23, 19);
    const auto full = rcsf::clip_feature(clip, full_cfg);
    const auto target = config(fam, 9, 7);
    const auto proj = rcsf::project_feature(full, full_cfg, target);
    const auto direct = rcsf::clip_feature(clip, target);
    REQUIRE(proj.values.size() == direct.values.size());
    CHECK(proj.fingerprint == direct.fingerprint);
    for (std::size_t i = 0; i < proj.values.size(); ++i) CHECK(proj.values[i] == Approx(direct.values[i]).margin(1e-12));
  }
  const auto full_cfg = config(rcsf::FeatureFamily::rcsf, 9, 7);
  const auto full = rcsf::clip_feature(clip, full_cfg);
  CHECK_THROWS_AS(rcsf::project_feature(full, full_cfg, config(rcsf::FeatureFamily::rcsf, 11, 7)), rcsf::InvalidArgument);
  CHECK_THROWS_AS(rcsf::project_feature(full, full_cfg, config(rcsf::FeatureFamily::mfcc, 7)), rcsf::InvalidArgument);
}

TEST_CASE("feature configuration text and fingerprint") {
  for (auto fam : {rcsf::FeatureFamily::rcsf, rcsf::FeatureFamily::mfccd, rcsf::FeatureFamily::llf_es}) {
    const auto cfg = config(fam, 11, 7);
    const auto back = rcsf::FeatureConfig::parse(cfg.canonical_string());
    CHECK(back.canonical_string() == cfg.canonical_string());
    CHECK(back.fingerprint() == cfg.fingerprint());
    CHECK(cfg.fingerprint().size() == 16);
  }
  CHECK(config(rcsf::FeatureFamily::rcsf, 23, 15).fingerprint() != config(rcsf::FeatureFamily::rcsf, 23, 13).fingerprint());
  CHECK_THROWS_AS(config(rcsf::FeatureFamily::rcsf, 26, 15).validate(), rcsf::InvalidArgument);
  CHECK_THROWS_AS(config(rcsf::FeatureFamily::rcsf, 23, 33).validate(), rcsf::InvalidArgument);
  CHECK_THROWS_AS(rcsf::FeatureConfig::parse("family=XYZ"), rcsf::FormatError);
  CHECK(rcsf::parse_family("MFCCDD") == rcsf::FeatureFamily::mfccdd);
  CHECK_FALSE(rcsf::parse_family("mfcc"));
}

TEST_CASE("feature file round trip") {
  rcsf::FeatureTable t;
  t.config = config(rcsf::FeatureFamily::mfcc, 7);
  std::mt19937_64 rng(12);
  for (int r = 0; r < 5; ++r) {
    const auto v = oracle::random_frame(rng, 14);
    t.rows.push_back({r % 2 ? rcsf::Label::obscene : rcsf::Label::non_obscene, v});
  }
  t.rows[0].values[0] = 1e-300;
  t.rows[1].values[3] = -123456789.125;
  std::stringstream io;
  rcsf::write_features(io, t);
  const auto back = rcsf::read_features(io);
  CHECK(back.fingerprint() == t.fingerprint());
  REQUIRE(back.rows.size() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(back.rows[r].label == t.rows[r].label);
    CHECK(back.rows[r].values == t.rows[r].values);
  }

  std::istringstream wrong_fp("#rcsf-features v1 fingerprint=0000000000000000 " + t.config.canonical_string() + "\n");
  CHECK_THROWS_AS(rcsf::read_features(wrong_fp), rcsf::FormatError);
  std::istringstream short_row("#rcsf-features v1 fingerprint=" + t.fingerprint() + " " + t.config.canonical_string() +
                               "\nobscene 1 2 3\n");
  CHECK_THROWS_AS(rcsf::read_features(short_row), rcsf::FormatError);
}
