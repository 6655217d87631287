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

// Clip-level feature extraction. Every family follows the same shape: frames
// are grouped into non-overlapping segments of L frames, each segment yields
// one vector, and the clip vector is [mean over segments, std over segments].
//
// RCSF (repeated curve-like spectrum feature) segment vectors are the
// flattened B'xL' matrix obtained by a DCT along time of the segment's L
// successive MFCC vectors. The other families average per-frame features
// inside each segment.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rcsf/audio_io.hpp"
#include "rcsf/dsp.hpp"
#include "rcsf/error.hpp"
#include "rcsf/matrix.hpp"

namespace rcsf {

enum class FeatureFamily { rcsf, mfcc, mfccd, mfccdd, llf_s, llf_es };

inline std::string_view to_string(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::rcsf: return "RCSF";
    case FeatureFamily::mfcc: return "MFCC";
    case FeatureFamily::mfccd: return "MFCCD";
    case FeatureFamily::mfccdd: return "MFCCDD";
    case FeatureFamily::llf_s: return "LLF_S";
    case FeatureFamily::llf_es: return "LLF_ES";
  }
  return "?";
}

inline std::optional<FeatureFamily> parse_family(std::string_view s) {
  for (auto f : {FeatureFamily::rcsf, FeatureFamily::mfcc, FeatureFamily::mfccd, FeatureFamily::mfccdd,
                 FeatureFamily::llf_s, FeatureFamily::llf_es}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

inline bool is_cepstral(FeatureFamily f) {
  return f == FeatureFamily::rcsf || f == FeatureFamily::mfcc || f == FeatureFamily::mfccd ||
         f == FeatureFamily::mfccdd;
}

inline constexpr int kLlfSpectralCount = 5;
inline constexpr int kDeltaWindow = 2;

struct FeatureConfig {
  FeatureFamily family = FeatureFamily::rcsf;
  int quefrency_order = 23;     // B', cepstral coefficients kept per frame (q = 0 .. B'-1)
  int temporal_order = 15;      // L', modulation coefficients kept per quefrency row (RCSF only)
  int frames_per_segment = 32;  // L
  int num_mel_filters = 26;     // B
  FramingParams framing;
  double rolloff_fraction = 0.85;
  int num_subbands = 8;
  int sample_rate_hz = kCanonicalSampleRate;

  void validate() const {
    framing.validate();
    if (sample_rate_hz <= 0) throw InvalidArgument("sample rate must be positive");
    if (frames_per_segment < 1) throw InvalidArgument("frames per segment must be positive");
    if (is_cepstral(family)) {
      if (num_mel_filters < 2) throw InvalidArgument("need at least two mel filters");
      if (quefrency_order < 1 || quefrency_order >= num_mel_filters) {
        throw InvalidArgument("quefrency order " + std::to_string(quefrency_order) + " must lie in [1, " +
                              std::to_string(num_mel_filters - 1) + "]");
      }
    }
    if (family == FeatureFamily::rcsf && (temporal_order < 1 || temporal_order > frames_per_segment)) {
      throw InvalidArgument("temporal order " + std::to_string(temporal_order) + " must lie in [1, " +
                            std::to_string(frames_per_segment) + "]");
    }
    if (family == FeatureFamily::llf_s || family == FeatureFamily::llf_es) {
      if (!(rolloff_fraction > 0.0 && rolloff_fraction <= 1.0)) throw InvalidArgument("rolloff fraction must lie in (0, 1]");
      if (num_subbands < 1) throw InvalidArgument("need at least one sub-band");
    }
  }

  /// Dimensionality of one per-frame feature (not meaningful for RCSF, whose
  /// unit is the segment).
  std::size_t frame_dim() const {
    const auto q = static_cast<std::size_t>(quefrency_order);
    switch (family) {
      case FeatureFamily::rcsf:
      case FeatureFamily::mfcc: return q;
      case FeatureFamily::mfccd: return 2 * q;
      case FeatureFamily::mfccdd: return 3 * q;
      case FeatureFamily::llf_s: return kLlfSpectralCount;
      case FeatureFamily::llf_es: return kLlfSpectralCount + 1 + static_cast<std::size_t>(num_subbands);
    }
    return 0;
  }

  std::size_t segment_dim() const {
    if (family == FeatureFamily::rcsf) {
      return static_cast<std::size_t>(quefrency_order) * static_cast<std::size_t>(temporal_order);
    }
    return frame_dim();
  }

  std::size_t vector_dim() const { return 2 * segment_dim(); }

  /// Whitespace-separated key=value description of every field that affects
  /// the emitted vector. Parsed back by FeatureConfig::parse.
  std::string canonical_string() const {
    std::ostringstream os;
    os << "family=" << to_string(family);
    if (is_cepstral(family)) os << " q=" << quefrency_order << " B=" << num_mel_filters;
    if (family == FeatureFamily::rcsf) os << " t=" << temporal_order;
    os << " L=" << frames_per_segment << " frame=" << framing.frame_len_samples << " hop=" << framing.hop_samples
       << " window=" << to_string(framing.window) << " sr=" << sample_rate_hz;
    if (!is_cepstral(family)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", rolloff_fraction);
      os << " rolloff=" << buf;
      if (family == FeatureFamily::llf_es) os << " subbands=" << num_subbands;
    }
    return os.str();
  }

  /// 64-bit FNV-1a of canonical_string(), as 16 hex digits.
  std::string fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical_string()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  static FeatureConfig parse(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw FormatError("feature config: bad token '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* k) -> const std::string& {
      auto it = kv.find(k);
      if (it == kv.end()) throw FormatError(std::string("feature config: missing '") + k + "'");
      return it->second;
    };
    auto as_int = [&](const char* k) {
      try {
        return std::stoi(need(k));
      } catch (const std::logic_error&) {
        throw FormatError(std::string("feature config: '") + k + "' is not an integer");
      }
    };
    FeatureConfig c;
    auto fam = parse_family(need("family"));
    if (!fam) throw FormatError("feature config: unknown family '" + need("family") + "'");
    c.family = *fam;
    if (is_cepstral(c.family)) {
      c.quefrency_order = as_int("q");
      c.num_mel_filters = as_int("B");
    }
    if (c.family == FeatureFamily::rcsf) c.temporal_order = as_int("t");
    c.frames_per_segment = as_int("L");
    c.framing.frame_len_samples = as_int("frame");
    c.framing.hop_samples = as_int("hop");
    const std::string& w = need("window");
    if (w == "hamming") {
      c.framing.window = Window::hamming;
    } else if (w == "rectangular") {
      c.framing.window = Window::rectangular;
    } else {
      throw FormatError("feature config: unknown window '" + w + "'");
    }
    c.sample_rate_hz = as_int("sr");
    if (!is_cepstral(c.family)) {
      c.rolloff_fraction = std::stod(need("rolloff"));
      if (c.family == FeatureFamily::llf_es) c.num_subbands = as_int("subbands");
    }
    c.validate();
    return c;
  }
};

struct SegmentFeature {
  std::vector<double> values;
  std::size_t segment_index = 0;
};

struct ClipFeatureVector {
  std::vector<double> values;  // [mean over segments | population std over segments]
  std::string fingerprint;
  std::size_t num_segments = 0;
};

/// Cepstral coefficients 0 .. order-1 of one frame: DCT-II of log filter energies.
inline std::vector<double> mfcc_frame(std::span<const double> energies, std::size_t order) {
  if (order >= energies.size()) {
    throw InvalidArgument("mfcc_frame: order " + std::to_string(order) + " must be below the filter count " +
                          std::to_string(energies.size()));
  }
  std::vector<double> logs(energies.size());
  for (std::size_t b = 0; b < logs.size(); ++b) logs[b] = std::log(energies[b] + kLogFloor);
  return dct2(logs, order);
}

/// Regression deltas over a frame sequence (rows are frames), edges replicated:
/// d_t = sum_w w (c_{t+w} - c_{t-w}) / (2 sum_w w^2).
inline Matrix delta_coeffs(const Matrix& per_frame, int window = kDeltaWindow) {
  if (window < 1) throw InvalidArgument("delta_coeffs: window must be positive");
  const std::size_t T = per_frame.rows();
  if (T <= 2 * static_cast<std::size_t>(window)) {
    throw InvalidArgument("delta_coeffs: " + std::to_string(T) + " frames is too short for window " +
                          std::to_string(window));
  }
  double denom = 0.0;
  for (int w = 1; w <= window; ++w) denom += 2.0 * w * w;
  Matrix out(T, per_frame.cols());
  const auto last = static_cast<std::ptrdiff_t>(T) - 1;
  for (std::size_t t = 0; t < T; ++t) {
    for (int w = 1; w <= window; ++w) {
      const auto ti = static_cast<std::ptrdiff_t>(t);
      const auto fwd = static_cast<std::size_t>(std::min(ti + w, last));
      const auto back = static_cast<std::size_t>(std::max<std::ptrdiff_t>(ti - w, 0));
      for (std::size_t d = 0; d < per_frame.cols(); ++d) {
        out(t, d) += w * (per_frame(fwd, d) - per_frame(back, d));
      }
    }
    for (std::size_t d = 0; d < per_frame.cols(); ++d) out(t, d) /= denom;
  }
  return out;
}

/// Low-level spectral descriptors of one frame, in the order
/// bandwidth, centroid, flatness, flux, rolloff; LLF_ES appends the log total
/// energy and the log energies of num_subbands equal slices of 0 .. Nyquist.
inline std::vector<double> llf_frame(const PowerSpectrum& spec, const PowerSpectrum* prev, const FeatureConfig& cfg) {
  if (prev != nullptr && prev->bins.size() != spec.bins.size()) {
    throw InvalidArgument("llf_frame: previous spectrum has a different bin layout");
  }
  const auto& b = spec.bins;
  double total = 0.0, weighted = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    total += b[j];
    weighted += spec.frequency(j) * b[j];
  }
  double centroid = 0.0, bandwidth = 0.0, rolloff = 0.0;
  if (total > 0.0) {
    centroid = weighted / total;
    double spread = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = spec.frequency(j) - centroid;
      spread += d * d * b[j];
    }
    bandwidth = std::sqrt(spread / total);
    const double target = cfg.rolloff_fraction * total;
    double cum = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      cum += b[j];
      if (cum >= target) {
        rolloff = spec.frequency(j);
        break;
      }
    }
  }
  double log_sum = 0.0, lin_sum = 0.0;
  for (double v : b) {
    log_sum += std::log(v + kLogFloor);
    lin_sum += v + kLogFloor;
  }
  const double n = static_cast<double>(b.size());
  const double flatness = std::exp(log_sum / n) / (lin_sum / n);
  double flux = 0.0;
  if (prev != nullptr) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = b[j] - prev->bins[j];
      flux += d * d;
    }
  }

  std::vector<double> out{bandwidth, centroid, flatness, flux, rolloff};
  if (cfg.family == FeatureFamily::llf_es) {
    out.push_back(std::log(total + kLogFloor));
    const double nyquist = spec.frequency(b.size() - 1);
    const double width = nyquist / cfg.num_subbands;
    std::vector<double> band(static_cast<std::size_t>(cfg.num_subbands), 0.0);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto k = static_cast<std::size_t>(spec.frequency(j) / width);
      band[std::min(k, band.size() - 1)] += b[j];
    }
    for (double e : band) out.push_back(std::log(e + kLogFloor));
  }
  return out;
}

/// Temporal DCT of one segment's MFCCs. Input rows are the L frames, columns
/// the B' quefrencies; the result is B' x L' with entry (q, n) =
/// sum_t C_t(q) cos((2t+1) n pi / 2L).
inline Matrix rcsf_segment_matrix(const Matrix& frame_mfccs, std::size_t temporal_order,
                                  std::optional<std::size_t> expected_frames = std::nullopt) {
  const std::size_t L = frame_mfccs.rows();
  if (expected_frames && L != *expected_frames) {
    throw InvalidArgument("rcsf_segment_matrix: got " + std::to_string(L) + " frames, expected " +
                          std::to_string(*expected_frames));
  }
  const DctBasis basis(L, temporal_order);
  const std::size_t Q = frame_mfccs.cols();
  Matrix out(Q, temporal_order);
  std::vector<double> column(L);
  for (std::size_t q = 0; q < Q; ++q) {
    for (std::size_t t = 0; t < L; ++t) column[t] = frame_mfccs(t, q);
    basis.apply(column, out.row(q));
  }
  return out;
}

/// Row-major flattening: all temporal coefficients of quefrency 0, then 1, ...
inline SegmentFeature rcsf_segment_vector(const Matrix& m, std::size_t segment_index = 0) {
  SegmentFeature s;
  s.values.assign(m.data().begin(), m.data().end());
  s.segment_index = segment_index;
  return s;
}

/// Per-dimension mean and population standard deviation over segment rows.
inline std::vector<double> mean_std_rows(const Matrix& segs) {
  const std::size_t K = segs.rows(), D = segs.cols();
  std::vector<double> out(2 * D, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t d = 0; d < D; ++d) out[d] += segs(k, d);
  for (std::size_t d = 0; d < D; ++d) out[d] /= static_cast<double>(K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t d = 0; d < D; ++d) {
      const double dev = segs(k, d) - out[d];
      out[D + d] += dev * dev;
    }
  }
  for (std::size_t d = 0; d < D; ++d) out[D + d] = std::sqrt(out[D + d] / static_cast<double>(K));
  return out;
}

/// Reusable extractor: builds the window, filterbank and DCT tables once.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig cfg)
      : cfg_((cfg.validate(), cfg)),
        filterbank_(cfg_.num_mel_filters, cfg_.framing.frame_len_samples, cfg_.sample_rate_hz),
        cepstrum_(static_cast<std::size_t>(cfg_.num_mel_filters),
                  is_cepstral(cfg_.family) ? static_cast<std::size_t>(cfg_.quefrency_order) : 1),
        temporal_(static_cast<std::size_t>(cfg_.frames_per_segment),
                  cfg_.family == FeatureFamily::rcsf ? static_cast<std::size_t>(cfg_.temporal_order) : 1),
        fingerprint_(cfg_.fingerprint()) {
    if (!is_power_of_two(static_cast<std::size_t>(cfg_.framing.frame_len_samples))) {
      throw InvalidArgument("frame length must be a power of two");
    }
  }

  const FeatureConfig& config() const { return cfg_; }
  const std::string& fingerprint() const { return fingerprint_; }

  /// One row per segment, segment_dim() columns.
  Matrix segment_features(const PcmClip& clip) const {
    if (clip.sample_rate_hz != cfg_.sample_rate_hz) {
      throw InvalidArgument("clip sample rate " + std::to_string(clip.sample_rate_hz) + " Hz, expected " +
                            std::to_string(cfg_.sample_rate_hz) + " Hz");
    }
    const auto L = static_cast<std::size_t>(cfg_.frames_per_segment);
    const std::size_t T = frame_count(clip.size(), cfg_.framing);
    const std::size_t K = T / L;
    if (K == 0) {
      throw InvalidArgument("clip of " + std::to_string(clip.size()) + " samples holds " + std::to_string(T) +
                            " frames, fewer than one segment of " + std::to_string(L));
    }
    const Matrix frames = frame_signal(clip, cfg_.framing);
    std::vector<PowerSpectrum> spectra;
    spectra.reserve(T);
    for (std::size_t t = 0; t < T; ++t) spectra.push_back(power_spectrum(frames.row(t), cfg_.sample_rate_hz));

    Matrix per_frame = frame_features(spectra);
    Matrix segs(K, cfg_.segment_dim());
    if (cfg_.family == FeatureFamily::rcsf) {
      Matrix block(L, per_frame.cols());
      for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t t = 0; t < L; ++t) {
          auto src = per_frame.row(k * L + t);
          std::copy(src.begin(), src.end(), block.row(t).begin());
        }
        const Matrix m = segment_matrix(block);
        std::copy(m.data().begin(), m.data().end(), segs.row(k).begin());
      }
    } else {
      for (std::size_t k = 0; k < K; ++k) {
        auto dst = segs.row(k);
        for (std::size_t t = 0; t < L; ++t) {
          auto src = per_frame.row(k * L + t);
          for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
        }
        for (double& v : dst) v /= static_cast<double>(L);
      }
    }
    return segs;
  }

  ClipFeatureVector extract(const PcmClip& clip) const {
    const Matrix segs = segment_features(clip);
    ClipFeatureVector v;
    v.values = mean_std_rows(segs);
    v.fingerprint = fingerprint_;
    v.num_segments = segs.rows();
    return v;
  }

 private:
  Matrix segment_matrix(const Matrix& block) const {
    Matrix out(block.cols(), temporal_.order());
    std::vector<double> column(block.rows());
    for (std::size_t q = 0; q < block.cols(); ++q) {
      for (std::size_t t = 0; t < block.rows(); ++t) column[t] = block(t, q);
      temporal_.apply(column, out.row(q));
    }
    return out;
  }

  Matrix frame_features(const std::vector<PowerSpectrum>& spectra) const {
    const std::size_t T = spectra.size();
    if (!is_cepstral(cfg_.family)) {
      Matrix out(T, cfg_.frame_dim());
      for (std::size_t t = 0; t < T; ++t) {
        const auto f = llf_frame(spectra[t], t > 0 ? &spectra[t - 1] : nullptr, cfg_);
        std::copy(f.begin(), f.end(), out.row(t).begin());
      }
      return out;
    }
    const auto Q = static_cast<std::size_t>(cfg_.quefrency_order);
    Matrix cep(T, Q);
    std::vector<double> logs(filterbank_.num_filters());
    for (std::size_t t = 0; t < T; ++t) {
      const auto e = filter_energies(spectra[t], filterbank_);
      for (std::size_t b = 0; b < e.size(); ++b) logs[b] = std::log(e[b] + kLogFloor);
      cepstrum_.apply(logs, cep.row(t));
    }
    if (cfg_.family == FeatureFamily::rcsf || cfg_.family == FeatureFamily::mfcc) return cep;

    const Matrix d1 = delta_coeffs(cep);
    const bool second = cfg_.family == FeatureFamily::mfccdd;
    const Matrix d2 = second ? delta_coeffs(d1) : Matrix{};
    Matrix out(T, cfg_.frame_dim());
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t q = 0; q < Q; ++q) {
        out(t, q) = cep(t, q);
        out(t, Q + q) = d1(t, q);
        if (second) out(t, 2 * Q + q) = d2(t, q);
      }
    }
    return out;
  }

  FeatureConfig cfg_;
  MelFilterbank filterbank_;
  DctBasis cepstrum_;
  DctBasis temporal_;
  std::string fingerprint_;
};

inline ClipFeatureVector clip_feature(const PcmClip& clip, const FeatureConfig& cfg) {
  return FeatureExtractor(cfg).extract(clip);
}

/// Re-expresses a vector extracted at high orders as the vector that a
/// lower-order configuration of the same family would produce. Each DCT
/// coefficient depends only on its own index, so truncation is exact.
inline ClipFeatureVector project_feature(const ClipFeatureVector& full, const FeatureConfig& full_cfg,
                                         const FeatureConfig& target) {
  target.validate();
  FeatureConfig probe = target;
  probe.quefrency_order = full_cfg.quefrency_order;
  probe.temporal_order = full_cfg.temporal_order;
  if (probe.canonical_string() != full_cfg.canonical_string()) {
    throw InvalidArgument("project_feature: configurations differ in more than their orders");
  }
  if (is_cepstral(target.family) && target.quefrency_order > full_cfg.quefrency_order) {
    throw InvalidArgument("project_feature: target quefrency order exceeds the source");
  }
  if (target.family == FeatureFamily::rcsf && target.temporal_order > full_cfg.temporal_order) {
    throw InvalidArgument("project_feature: target temporal order exceeds the source");
  }
  if (full.values.size() != full_cfg.vector_dim()) throw InvalidArgument("project_feature: source length mismatch");

  std::vector<std::size_t> index;  // positions within one half of the source vector
  const auto fq = static_cast<std::size_t>(full_cfg.quefrency_order);
  const auto tq = static_cast<std::size_t>(target.quefrency_order);
  switch (target.family) {
    case FeatureFamily::rcsf: {
      const auto ft = static_cast<std::size_t>(full_cfg.temporal_order);
      const auto tt = static_cast<std::size_t>(target.temporal_order);
      for (std::size_t q = 0; q < tq; ++q)
        for (std::size_t n = 0; n < tt; ++n) index.push_back(q * ft + n);
      break;
    }
    case FeatureFamily::mfcc:
    case FeatureFamily::mfccd:
    case FeatureFamily::mfccdd: {
      const std::size_t blocks = target.frame_dim() / tq;
      for (std::size_t blk = 0; blk < blocks; ++blk)
        for (std::size_t q = 0; q < tq; ++q) index.push_back(blk * fq + q);
      break;
    }
    default:
      for (std::size_t d = 0; d < target.segment_dim(); ++d) index.push_back(d);
  }
  const std::size_t half = full_cfg.segment_dim();
  ClipFeatureVector out;
  out.values.reserve(2 * index.size());
  for (std::size_t i : index) out.values.push_back(full.values[i]);
  for (std::size_t i : index) out.values.push_back(full.values[half + i]);
  out.fingerprint = target.fingerprint();
  out.num_segments = full.num_segments;
  return out;
}

}  // namespace rcsf
