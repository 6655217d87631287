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

// Audio loading and canonicalization: RIFF/WAVE decoding, mono mixdown,
// linear-interpolation resampling to 16 kHz, fixed-length clip splitting and
// additive white Gaussian noise at a target SNR.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcsf/error.hpp"

namespace rcsf {

inline constexpr int kCanonicalSampleRate = 16000;
inline constexpr double kCanonicalClipSeconds = 10.0;

/// Mono sample buffer. Samples lie in [-1, 1] unless `noisy` is set, in which
/// case they are only required to be finite (noise is added without clipping).
struct PcmClip {
  std::vector<double> samples;
  int sample_rate_hz = kCanonicalSampleRate;
  double source_offset_s = 0.0;
  bool noisy = false;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

/// Decoded WAV contents before mixdown.
struct WavData {
  int sample_rate_hz = 0;
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  std::vector<double> interleaved;

  std::size_t frame_count() const {
    return channels > 0 ? interleaved.size() / static_cast<std::size_t>(channels) : 0;
  }
};

enum class WavSampleFormat { pcm16, float32 };

namespace detail {

inline std::uint32_t read_le(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void append_le(std::vector<unsigned char>& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

inline double decode_sample(const unsigned char* p, int bits, bool is_float) {
  if (is_float) {
    if (bits == 32) {
      std::uint32_t raw = read_le(p, 4);
      float f;
      std::memcpy(&f, &raw, sizeof f);
      return f;
    }
    std::uint64_t raw = read_le(p, 4) | (static_cast<std::uint64_t>(read_le(p + 4, 4)) << 32);
    double d;
    std::memcpy(&d, &raw, sizeof d);
    return d;
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_le(p, 2)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(read_le(p, 3) << 8) >> 8;
      return v / 8388608.0;
    }
    default:
      return static_cast<std::int32_t>(read_le(p, 4)) / 2147483648.0;
  }
}

}  // namespace detail

/// Decodes an in-memory RIFF/WAVE image. Accepts PCM (format 1) at 8/16/24/32
/// bits and IEEE float (format 3) at 32/64 bits; WAVE_FORMAT_EXTENSIBLE is
/// accepted when its sub-format is one of those two.
inline WavData decode_wav(std::span<const unsigned char> bytes, const std::string& name = "<memory>") {
  auto fail = [&](const std::string& what) { throw AudioError(name + ": " + what); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  int format_tag = 0;
  WavData out;
  std::span<const unsigned char> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    std::uint32_t chunk_size = detail::read_le(hdr + 4, 4);
    std::size_t body = pos + 8;
    std::size_t avail = bytes.size() - body;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16 || chunk_size > avail) fail("truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format_tag = static_cast<int>(detail::read_le(f, 2));
      out.channels = static_cast<int>(detail::read_le(f + 2, 2));
      out.sample_rate_hz = static_cast<int>(detail::read_le(f + 4, 4));
      out.bits_per_sample = static_cast<int>(detail::read_le(f + 14, 2));
      if (format_tag == 0xFFFE) {
        if (chunk_size < 40) fail("truncated WAVE_FORMAT_EXTENSIBLE header");
        format_tag = static_cast<int>(detail::read_le(f + 24, 2));
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      // Streaming writers sometimes leave the size field oversized; take what exists.
      data = bytes.subspan(body, std::min<std::size_t>(chunk_size, avail));
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt) fail("missing fmt chunk");
  if (!have_data) fail("missing data chunk");
  if (format_tag != 1 && format_tag != 3) {
    fail("unsupported codec (format tag " + std::to_string(format_tag) + "), only PCM and IEEE float are accepted");
  }
  out.is_float = format_tag == 3;
  const int bits = out.bits_per_sample;
  if (out.is_float ? (bits != 32 && bits != 64) : (bits != 8 && bits != 16 && bits != 24 && bits != 32)) {
    fail("unsupported bit depth " + std::to_string(bits));
  }
  if (out.channels < 1) fail("channel count must be positive");
  if (out.sample_rate_hz <= 0) fail("sample rate must be positive");

  const std::size_t sample_bytes = static_cast<std::size_t>(bits / 8);
  const std::size_t frame_bytes = sample_bytes * static_cast<std::size_t>(out.channels);
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) fail("zero-length audio");

  out.interleaved.resize(frames * static_cast<std::size_t>(out.channels));
  for (std::size_t i = 0; i < out.interleaved.size(); ++i) {
    out.interleaved[i] = detail::decode_sample(data.data() + i * sample_bytes, bits, out.is_float);
  }
  return out;
}

inline WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AudioError(path.string() + ": cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.string());
}

/// Averages channels per sample frame.
inline std::vector<double> mixdown(const WavData& wav) {
  const auto ch = static_cast<std::size_t>(wav.channels);
  std::vector<double> mono(wav.frame_count());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ch; ++c) acc += wav.interleaved[i * ch + c];
    mono[i] = acc / static_cast<double>(ch);
  }
  return mono;
}

/// Linear-interpolation resampler. Output length is floor(N * to / from);
/// output sample i reads the input at the exact rational position i * from / to.
inline std::vector<double> resample_linear(std::span<const double> in, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) throw InvalidArgument("resample_linear: rates must be positive");
  if (from_hz == to_hz) return {in.begin(), in.end()};
  const auto from = static_cast<std::uint64_t>(from_hz);
  const auto to = static_cast<std::uint64_t>(to_hz);
  const std::uint64_t n_out = static_cast<std::uint64_t>(in.size()) * to / from;
  std::vector<double> out(n_out);
  for (std::uint64_t i = 0; i < n_out; ++i) {
    const std::uint64_t num = i * from;
    const std::uint64_t i0 = num / to;
    const double frac = static_cast<double>(num % to) / static_cast<double>(to);
    const std::uint64_t i1 = std::min<std::uint64_t>(i0 + 1, in.size() - 1);
    out[i] = in[i0] + frac * (in[i1] - in[i0]);
  }
  return out;
}

/// Loads a WAV file as a canonical 16 kHz mono clip.
inline PcmClip load_audio(const std::filesystem::path& path) {
  WavData wav = read_wav(path);
  PcmClip clip;
  clip.samples = resample_linear(mixdown(wav), wav.sample_rate_hz, kCanonicalSampleRate);
  clip.sample_rate_hz = kCanonicalSampleRate;
  if (clip.samples.empty()) throw AudioError(path.string() + ": zero-length audio after resampling");
  // Float files written from noise-augmented clips may legitimately exceed full scale.
  clip.noisy = std::any_of(clip.samples.begin(), clip.samples.end(),
                           [](double s) { return s < -1.0 || s > 1.0; });
  return clip;
}

inline std::vector<unsigned char> encode_wav(const PcmClip& clip, WavSampleFormat format) {
  const bool is_float = format == WavSampleFormat::float32;
  const std::uint32_t bits = is_float ? 32 : 16;
  const std::uint32_t block = bits / 8;
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * block);

  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::append_le(out, 36 + data_bytes, 4);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::append_le(out, 16, 4);
  detail::append_le(out, is_float ? 3 : 1, 2);
  detail::append_le(out, 1, 2);
  detail::append_le(out, static_cast<std::uint32_t>(clip.sample_rate_hz), 4);
  detail::append_le(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * block, 4);
  detail::append_le(out, block, 2);
  detail::append_le(out, bits, 2);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::append_le(out, data_bytes, 4);
  for (double s : clip.samples) {
    if (is_float) {
      float f = static_cast<float>(s);
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof raw);
      detail::append_le(out, raw, 4);
    } else {
      double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
      detail::append_le(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)) & 0xFFFFu, 2);
    }
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const PcmClip& clip,
                      WavSampleFormat format = WavSampleFormat::pcm16) {
  std::vector<unsigned char> bytes = encode_wav(clip, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AudioError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw AudioError(path.string() + ": write failed");
}

/// Cuts a signal into consecutive non-overlapping windows of clip_len_s.
/// The trailing remainder is dropped; a signal shorter than one window yields
/// no clips.
inline std::vector<PcmClip> split_into_clips(const PcmClip& signal, double clip_len_s = kCanonicalClipSeconds) {
  if (clip_len_s <= 0.0) throw InvalidArgument("split_into_clips: clip length must be positive");
  const auto len = static_cast<std::size_t>(std::llround(clip_len_s * signal.sample_rate_hz));
  std::vector<PcmClip> clips;
  if (len == 0) return clips;
  for (std::size_t start = 0; start + len <= signal.samples.size(); start += len) {
    PcmClip c;
    c.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     signal.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
    c.sample_rate_hz = signal.sample_rate_hz;
    c.source_offset_s = signal.source_offset_s + static_cast<double>(start) / signal.sample_rate_hz;
    c.noisy = signal.noisy;
    clips.push_back(std::move(c));
  }
  return clips;
}

inline double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

/// Adds i.i.d. zero-mean Gaussian noise with variance P_signal / 10^(snr_db/10).
/// Deterministic for a given seed. The result is flagged noisy and not clipped.
inline PcmClip add_awgn(const PcmClip& clip, double snr_db, std::uint64_t rng_seed) {
  if (!std::isfinite(snr_db)) throw InvalidArgument("add_awgn: snr_db must be finite");
  const double power = mean_power(clip.samples);
  if (!(power > 0.0)) {
    throw InvalidArgument("add_awgn: clip at offset " + std::to_string(clip.source_offset_s) +
                          " s is silent, SNR is undefined");
  }
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, sigma);
  PcmClip out = clip;
  for (double& s : out.samples) s += noise(rng);
  out.noisy = true;
  return out;
}

}  // namespace rcsf
