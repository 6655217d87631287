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

// Deterministic synthetic corpus. Positive clips are trains of ~500 ms
// harmonic pitch sweeps around 500 Hz with short pauses, so their
// spectrograms show the same curve repeated many times per clip. Negative
// clips are tone bursts with the same rhythm whose pitch hops instead of
// gliding, steady harmonic tones, coloured noise, or a tone buried in noise.
// Every clip carries a coloured background at 5 to 30 dB SNR.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rcsf/audio_io.hpp"
#include "rcsf/manifest.hpp"

namespace rcsf {

enum class SynthKind { chirp_train, tone_bursts, steady_tone, noise, tone_in_noise };

inline std::string_view to_string(SynthKind k) {
  switch (k) {
    case SynthKind::chirp_train: return "chirp_train";
    case SynthKind::tone_bursts: return "tone_bursts";
    case SynthKind::steady_tone: return "steady_tone";
    case SynthKind::noise: return "noise";
    case SynthKind::tone_in_noise: return "tone_in_noise";
  }
  return "?";
}

namespace detail {

inline void normalize_peak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : x) v *= peak / m;
}

inline std::vector<double> coloured_noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> pole(0.0, 0.97);
  const double a = pole(rng);  // one-pole low-pass; 0 is white
  std::vector<double> x(n);
  double state = 0.0;
  for (double& v : x) {
    state = a * state + (1.0 - a) * white(rng);
    v = state;
  }
  return x;
}

inline std::vector<double> harmonic_tone(std::size_t n, double f0, int harmonics, double sr, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> x(n, 0.0);
  for (int h = 1; h <= harmonics; ++h) {
    if (f0 * h >= sr / 2.0) break;
    const double ph = phase(rng);
    const double amp = 1.0 / h;
    const double w = 2.0 * std::numbers::pi * f0 * h / sr;
    for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i) + ph);
  }
  return x;
}

}  // namespace detail

/// One clip of the requested kind. Identical (kind, seed, seconds) give
/// identical samples.
inline PcmClip synth_clip(SynthKind kind, std::uint64_t seed, double seconds = kCanonicalClipSeconds) {
  const double sr = kCanonicalSampleRate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * sr));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  std::vector<double> x(n, 0.0);

  switch (kind) {
    case SynthKind::chirp_train:
    case SynthKind::tone_bursts: {
      // Both kinds share the burst rhythm and pitch range. Chirp trains glide
      // continuously; tone bursts hop between steady pitches in a non-monotonic
      // order, so a burst's average spectrum looks alike but its trajectory does not.
      const bool sweep = kind == SynthKind::chirp_train;
      const double center = uni(400.0, 650.0);
      const int shape = static_cast<int>(uni(0.0, 3.0));  // arch, rise, fall
      std::size_t pos = static_cast<std::size_t>(uni(0.0, 0.3) * sr);
      double phase = 0.0;
      while (pos < n) {
        const double depth = uni(120.0, 300.0);
        const double dur = uni(0.35, 0.65);
        const auto len = static_cast<std::size_t>(dur * sr);
        const double level = uni(0.6, 1.0);
        std::vector<double> steps(3 + static_cast<std::size_t>(uni(0.0, 3.0)));
        for (std::size_t k = 0; k < steps.size(); ++k) {
          steps[k] = depth * (static_cast<double>(k) / static_cast<double>(steps.size() - 1) - 0.5);
        }
        while (std::is_sorted(steps.begin(), steps.end()) || std::is_sorted(steps.rbegin(), steps.rend())) {
          std::shuffle(steps.begin(), steps.end(), rng);
        }
        for (std::size_t i = 0; i < len && pos + i < n; ++i) {
          const double r = static_cast<double>(i) / static_cast<double>(len);
          double f = center;
          if (!sweep) {
            f += steps[std::min(steps.size() - 1, static_cast<std::size_t>(r * static_cast<double>(steps.size())))];
          } else if (shape == 0) {
            f += depth * (std::sin(std::numbers::pi * r) - 0.5);
          } else if (shape == 1) {
            f += depth * (r - 0.5);
          } else {
            f -= depth * (r - 0.5);
          }
          phase += 2.0 * std::numbers::pi * f / sr;
          const double env = level * std::sqrt(std::sin(std::numbers::pi * r));
          double s = 0.0;
          for (int h = 1; h <= 4; ++h) s += std::sin(h * phase) / h;
          x[pos + i] += env * s;
        }
        pos += len + static_cast<std::size_t>(uni(0.05, 0.3) * sr);
      }
      break;
    }
    case SynthKind::steady_tone: {
      x = detail::harmonic_tone(n, uni(150.0, 900.0), 1 + static_cast<int>(uni(0.0, 5.0)), sr, rng);
      break;
    }
    case SynthKind::noise: {
      x = detail::coloured_noise(n, rng);
      break;
    }
    case SynthKind::tone_in_noise: {
      auto tone = detail::harmonic_tone(n, uni(150.0, 900.0), 1 + static_cast<int>(uni(0.0, 5.0)), sr, rng);
      auto noise = detail::coloured_noise(n, rng);
      detail::normalize_peak(tone, 1.0);
      detail::normalize_peak(noise, uni(0.2, 1.0));
      for (std::size_t i = 0; i < n; ++i) x[i] = tone[i] + noise[i];
      break;
    }
  }
  // Recording-condition background: coloured noise at a random SNR.
  {
    auto bg = detail::coloured_noise(n, rng);
    const double snr_db = uni(5.0, 30.0);
    const double ps = mean_power(x), pn = mean_power(bg);
    const double g = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
    for (std::size_t i = 0; i < n; ++i) x[i] += g * bg[i];
  }
  detail::normalize_peak(x, uni(0.3, 0.9));
  PcmClip clip;
  clip.samples = std::move(x);
  return clip;
}

struct SynthEntry {
  SynthKind kind = SynthKind::chirp_train;
  std::uint64_t seed = 0;
  Label label = Label::obscene;
  Split split = Split::train;

  PcmClip render() const { return synth_clip(kind, seed); }
};

/// per_class positives and per_class negatives (negatives cycle through the
/// four non-chirp kinds, two at a time). Within each class, alternate entries
/// go to train and test, so every kind appears in both splits.
inline std::vector<SynthEntry> synth_corpus_plan(std::size_t per_class, std::uint64_t seed) {
  std::vector<SynthEntry> plan;
  plan.reserve(2 * per_class);
  const SynthKind negatives[] = {SynthKind::tone_bursts, SynthKind::steady_tone, SynthKind::noise,
                                 SynthKind::tone_in_noise};
  for (std::size_t i = 0; i < per_class; ++i) {
    const Split split = i % 2 == 0 ? Split::train : Split::test;
    plan.push_back({SynthKind::chirp_train, seed * 1000003ull + 2 * i, Label::obscene, split});
    plan.push_back({negatives[(i / 2) % 4], seed * 1000003ull + 2 * i + 1, Label::non_obscene, split});
  }
  return plan;
}

/// Writes the corpus as 16-bit WAV files plus manifest.jsonl into dir.
inline DatasetManifest write_synth_corpus(const std::filesystem::path& dir, std::size_t per_class, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  DatasetManifest relative;
  std::size_t idx = 0;
  for (const auto& e : synth_corpus_plan(per_class, seed)) {
    char name[64];
    std::snprintf(name, sizeof name, "clip_%04zu_%s.wav", idx++, std::string(to_string(e.kind)).c_str());
    write_wav(dir / name, e.render());
    relative.entries.push_back({name, e.label, std::string(to_string(e.kind)), e.split});
  }
  std::ofstream out(dir / "manifest.jsonl");
  write_manifest(out, relative);
  return relative;
}

}  // namespace rcsf
