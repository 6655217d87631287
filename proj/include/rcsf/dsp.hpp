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

// Spectral primitives shared by every feature family: framing and windowing,
// radix-2 power spectra, the mel filterbank and the unnormalized DCT-II.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rcsf/audio_io.hpp"
#include "rcsf/error.hpp"
#include "rcsf/matrix.hpp"

namespace rcsf {

/// Added to filter and band energies before taking a logarithm.
inline constexpr double kLogFloor = 1e-10;

enum class Window { rectangular, hamming };

inline std::string_view to_string(Window w) { return w == Window::hamming ? "hamming" : "rectangular"; }

/// Defaults are 32 ms frames with 50 % overlap at 16 kHz.
struct FramingParams {
  int frame_len_samples = 512;
  int hop_samples = 256;
  Window window = Window::hamming;

  void validate() const {
    if (frame_len_samples <= 0) throw InvalidArgument("frame length must be positive");
    if (hop_samples <= 0 || hop_samples > frame_len_samples) {
      throw InvalidArgument("hop must satisfy 0 < hop <= frame length");
    }
  }
};

inline std::vector<double> make_window(std::size_t len, Window w) {
  std::vector<double> win(len, 1.0);
  if (w == Window::hamming && len > 1) {
    for (std::size_t n = 0; n < len; ++n) {
      win[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(len - 1));
    }
  }
  return win;
}

inline std::size_t frame_count(std::size_t num_samples, const FramingParams& p) {
  const auto len = static_cast<std::size_t>(p.frame_len_samples);
  if (num_samples < len) return 0;
  return (num_samples - len) / static_cast<std::size_t>(p.hop_samples) + 1;
}

/// Splits a signal into windowed frames; frame t starts at t * hop.
inline Matrix frame_signal(std::span<const double> samples, const FramingParams& p) {
  p.validate();
  const std::size_t n = frame_count(samples.size(), p);
  if (n == 0) {
    throw InvalidArgument("frame_signal: signal of " + std::to_string(samples.size()) +
                          " samples is shorter than one frame (" + std::to_string(p.frame_len_samples) + ")");
  }
  const auto len = static_cast<std::size_t>(p.frame_len_samples);
  const auto hop = static_cast<std::size_t>(p.hop_samples);
  const std::vector<double> win = make_window(len, p.window);
  Matrix frames(n, len);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = frames.row(t);
    for (std::size_t i = 0; i < len; ++i) row[i] = samples[t * hop + i] * win[i];
  }
  return frames;
}

inline Matrix frame_signal(const PcmClip& clip, const FramingParams& p) { return frame_signal(clip.samples, p); }

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

/// Precomputed bit-reversal permutation and twiddles for one radix-2 size.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n), rev_(n), tw_re_(n / 2), tw_im_(n / 2) {
    if (!is_power_of_two(n)) throw InvalidArgument("FFT length " + std::to_string(n) + " is not a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      rev_[i] = j;
    }
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      tw_re_[k] = std::cos(ang);
      tw_im_[k] = std::sin(ang);
    }
  }

  std::size_t size() const { return n_; }

  /// In-place iterative decimation-in-time transform of (re, im).
  void forward(std::span<double> re, std::span<double> im) const {
    if (re.size() != n_ || im.size() != n_) throw InvalidArgument("FftPlan: buffer size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < rev_[i]) {
        std::swap(re[i], re[rev_[i]]);
        std::swap(im[i], im[rev_[i]]);
      }
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const double wr = tw_re_[k * stride], wi = tw_im_[k * stride];
          const std::size_t a = start + k, b = a + half;
          const double vr = re[b] * wr - im[b] * wi;
          const double vi = re[b] * wi + im[b] * wr;
          re[b] = re[a] - vr;
          im[b] = im[a] - vi;
          re[a] += vr;
          im[a] += vi;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::size_t> rev_;
  std::vector<double> tw_re_;
  std::vector<double> tw_im_;
};

namespace detail {

inline const FftPlan& cached_plan(std::size_t n) {
  thread_local std::deque<FftPlan> plans;
  for (const auto& p : plans)
    if (p.size() == n) return p;
  plans.emplace_back(n);
  return plans.back();
}

}  // namespace detail

/// In-place radix-2 FFT of a complex sequence.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const FftPlan& plan = detail::cached_plan(a.size());
  std::vector<double> re(a.size()), im(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    re[i] = a[i].real();
    im[i] = a[i].imag();
  }
  plan.forward(re, im);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = {re[i], im[i]};
}

struct PowerSpectrum {
  std::vector<double> bins;  // |X[j]|^2 for j = 0 .. len/2
  double bin_width_hz = 0.0;

  double frequency(std::size_t j) const { return static_cast<double>(j) * bin_width_hz; }
};

inline PowerSpectrum power_spectrum(std::span<const double> frame, int sample_rate_hz = kCanonicalSampleRate) {
  if (!is_power_of_two(frame.size())) {
    throw InvalidArgument("power_spectrum: frame length " + std::to_string(frame.size()) + " is not a power of two");
  }
  const FftPlan& plan = detail::cached_plan(frame.size());
  std::vector<double> re(frame.begin(), frame.end()), im(frame.size(), 0.0);
  plan.forward(re, im);
  PowerSpectrum spec;
  spec.bins.resize(frame.size() / 2 + 1);
  for (std::size_t j = 0; j < spec.bins.size(); ++j) spec.bins[j] = re[j] * re[j] + im[j] * im[j];
  spec.bin_width_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(frame.size());
  return spec;
}

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters with edges equally spaced on the mel scale.
class MelFilterbank {
 public:
  MelFilterbank(int num_filters, int fft_len, int sample_rate_hz, double low_hz = 0.0, double high_hz = -1.0) {
    if (num_filters < 1) throw InvalidArgument("MelFilterbank: need at least one filter");
    if (!is_power_of_two(static_cast<std::size_t>(std::max(fft_len, 0))) || fft_len < 2) {
      throw InvalidArgument("MelFilterbank: FFT length must be a power of two");
    }
    if (high_hz < 0.0) high_hz = sample_rate_hz / 2.0;
    if (!(low_hz >= 0.0 && high_hz > low_hz && high_hz <= sample_rate_hz / 2.0)) {
      throw InvalidArgument("MelFilterbank: band must satisfy 0 <= low < high <= Nyquist");
    }
    const auto B = static_cast<std::size_t>(num_filters);
    num_bins_ = static_cast<std::size_t>(fft_len) / 2 + 1;
    bin_width_hz_ = static_cast<double>(sample_rate_hz) / fft_len;

    const double mlo = hz_to_mel(low_hz);
    const double mhi = hz_to_mel(high_hz);
    edges_hz_.resize(B + 2);
    for (std::size_t i = 0; i < B + 2; ++i) {
      edges_hz_[i] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(i) / static_cast<double>(B + 1));
    }
    edges_hz_.front() = low_hz;
    edges_hz_.back() = high_hz;

    weights_ = Matrix(B, num_bins_);
    first_.assign(B, num_bins_);
    last_.assign(B, 0);
    for (std::size_t b = 0; b < B; ++b) {
      const double lo = edges_hz_[b], c = edges_hz_[b + 1], hi = edges_hz_[b + 2];
      for (std::size_t j = 0; j < num_bins_; ++j) {
        const double f = static_cast<double>(j) * bin_width_hz_;
        double w = 0.0;
        if (f > lo && f <= c) {
          w = (f - lo) / (c - lo);
        } else if (f > c && f < hi) {
          w = (hi - f) / (hi - c);
        }
        if (w > 0.0) {
          weights_(b, j) = w;
          first_[b] = std::min(first_[b], j);
          last_[b] = j;
        }
      }
    }
  }

  std::size_t num_filters() const { return weights_.rows(); }
  std::size_t num_bins() const { return num_bins_; }
  double bin_width_hz() const { return bin_width_hz_; }
  const std::vector<double>& band_edges_hz() const { return edges_hz_; }
  const Matrix& weights() const { return weights_; }

  /// Nonzero support of filter b as an inclusive bin range; empty when first > last.
  std::size_t support_first(std::size_t b) const { return first_[b]; }
  std::size_t support_last(std::size_t b) const { return last_[b]; }

 private:
  std::size_t num_bins_ = 0;
  double bin_width_hz_ = 0.0;
  std::vector<double> edges_hz_;
  Matrix weights_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> last_;
};

inline std::vector<double> filter_energies(const PowerSpectrum& spec, const MelFilterbank& fb) {
  if (spec.bins.size() != fb.num_bins()) {
    throw InvalidArgument("filter_energies: spectrum has " + std::to_string(spec.bins.size()) +
                          " bins, filterbank expects " + std::to_string(fb.num_bins()));
  }
  std::vector<double> e(fb.num_filters(), 0.0);
  for (std::size_t b = 0; b < e.size(); ++b) {
    auto w = fb.weights().row(b);
    double acc = 0.0;
    for (std::size_t j = fb.support_first(b); j <= fb.support_last(b) && j < w.size(); ++j) acc += w[j] * spec.bins[j];
    e[b] = acc;
  }
  return e;
}

/// Cosine table for the unnormalized DCT-II of a length-M sequence truncated to
/// P outputs: out[p] = sum_i seq[i] * cos((2i+1) p pi / 2M).
class DctBasis {
 public:
  DctBasis(std::size_t length, std::size_t order) : table_(order, length) {
    if (order < 1 || order > length) {
      throw InvalidArgument("dct2: order " + std::to_string(order) + " outside [1, " + std::to_string(length) + "]");
    }
    const double m2 = 2.0 * static_cast<double>(length);
    for (std::size_t p = 0; p < order; ++p) {
      for (std::size_t i = 0; i < length; ++i) {
        table_(p, i) = std::cos(static_cast<double>((2 * i + 1) * p) * std::numbers::pi / m2);
      }
    }
  }

  std::size_t length() const { return table_.cols(); }
  std::size_t order() const { return table_.rows(); }

  void apply(std::span<const double> seq, std::span<double> out) const {
    if (seq.size() != length() || out.size() != order()) throw InvalidArgument("dct2: size mismatch");
    for (std::size_t p = 0; p < order(); ++p) {
      auto c = table_.row(p);
      double acc = 0.0;
      for (std::size_t i = 0; i < seq.size(); ++i) acc += seq[i] * c[i];
      out[p] = acc;
    }
  }

  std::vector<double> apply(std::span<const double> seq) const {
    std::vector<double> out(order());
    apply(seq, out);
    return out;
  }

 private:
  Matrix table_;
};

inline std::vector<double> dct2(std::span<const double> seq, std::size_t order) {
  return DctBasis(seq.size(), order).apply(seq);
}

}  // namespace rcsf
