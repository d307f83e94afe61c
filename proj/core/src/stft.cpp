// core/src/stft.cpp

// Copyright 2026  rtflab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rtflab/stft.hpp"

#include <cmath>
#include <numbers>

namespace rtflab {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place complex FFT: iterative radix-2 for power-of-two lengths, direct
// DFT otherwise (frame lengths are small, so the quadratic path is fine).
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), pow2_(is_power_of_two(n)) {
    if (!pow2_) return;
    bitrev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < log2n; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
      bitrev_[i] = r;
    }
    twiddles_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
      twiddles_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(n));
  }

  void forward(std::vector<Complex>& x) const { run(x, false); }
  void inverse(std::vector<Complex>& x) const { run(x, true); }  // unscaled

 private:
  void run(std::vector<Complex>& x, bool inverse) const {
    if (pow2_) {
      for (std::size_t i = 0; i < n_; ++i)
        if (bitrev_[i] > i) std::swap(x[i], x[bitrev_[i]]);
      for (std::size_t len = 2; len <= n_; len <<= 1) {
        std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
          for (std::size_t k = 0; k < len / 2; ++k) {
            Complex w = twiddles_[k * stride];
            if (inverse) w = std::conj(w);
            Complex u = x[start + k];
            Complex v = x[start + k + len / 2] * w;
            x[start + k] = u + v;
            x[start + k + len / 2] = u - v;
          }
        }
      }
    } else {
      std::vector<Complex> out(n_);
      const double sign = inverse ? 1.0 : -1.0;
      for (std::size_t k = 0; k < n_; ++k) {
        Complex s = 0.0;
        const double base = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                            static_cast<double>(n_);
        for (std::size_t j = 0; j < n_; ++j)
          s += x[j] * std::polar(1.0, base * static_cast<double>(j));
        out[k] = s;
      }
      x = std::move(out);
    }
  }

  std::size_t n_;
  bool pow2_;
  std::vector<std::size_t> bitrev_;
  std::vector<Complex> twiddles_;
};

}  // namespace

void StftConfig::validate() const {
  if (frame_length == 0 || frame_length % 2 != 0)
    throw ConfigError("StftConfig: frame_length must be even and positive");
  if (hop != frame_length / 2)
    throw ConfigError("StftConfig: hop must equal frame_length / 2 (50% overlap)");
  if (!(sample_rate > 0.0)) throw ConfigError("StftConfig: sample_rate must be positive");
}

std::vector<double> stft_window(const StftConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.frame_length;
  std::vector<double> w(n);
  // Periodic square-root Hann: sqrt(0.5 - 0.5 cos(2 pi n / N)) = sin(pi n / N).
  // The analysis/synthesis product is then periodic Hann, which sums to one
  // at 50% overlap.
  for (std::size_t i = 0; i < n; ++i)
    w[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

Spectrogram analyze(const MultichannelSignal& signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.empty()) throw SignalTooShort("analyze: no channels");
  const std::size_t n_samples = signal[0].size();
  for (const auto& ch : signal)
    if (ch.size() != n_samples) throw DimensionMismatch("analyze: channel lengths differ");
  if (n_samples < cfg.frame_length)
    throw SignalTooShort("analyze: need at least one full frame (" +
                         std::to_string(cfg.frame_length) + " samples), got " +
                         std::to_string(n_samples));

  const std::size_t channels = signal.size();
  const std::size_t bins = cfg.bins();
  const std::size_t frames = 1 + (n_samples - cfg.frame_length) / cfg.hop;
  const std::vector<double> window = stft_window(cfg);

  Spectrogram spec(frames, bins, channels);
  Fft fft(cfg.frame_length);
  std::vector<Complex> buf(cfg.frame_length);

  for (std::size_t ch = 0; ch < channels; ++ch) {
    const double* samples = signal[ch].data();
    for (std::size_t l = 0; l < frames; ++l) {
      const double* frame = samples + l * cfg.hop;
      for (std::size_t i = 0; i < cfg.frame_length; ++i) buf[i] = window[i] * frame[i];
      fft.forward(buf);
      for (std::size_t k = 0; k < bins; ++k) spec.at(l, k, ch) = buf[k];
    }
  }
  return spec;
}

MultichannelSignal synthesize(const Spectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.bins() != cfg.bins())
    throw ConfigMismatch("synthesize: spectrogram has " + std::to_string(spec.bins()) +
                         " bins, config implies " + std::to_string(cfg.bins()));
  const std::size_t channels = spec.channels();
  const std::size_t frames = spec.frames();
  const std::size_t n = cfg.frame_length;
  const std::size_t out_len = frames ? (frames - 1) * cfg.hop + n : 0;
  const std::vector<double> window = stft_window(cfg);

  MultichannelSignal out(channels, std::vector<double>(out_len, 0.0));
  Fft fft(n);
  std::vector<Complex> buf(n);

  for (std::size_t ch = 0; ch < channels; ++ch) {
    double* samples = out[ch].data();
    for (std::size_t l = 0; l < frames; ++l) {
      // Rebuild the two-sided spectrum from the one-sided half. DC and
      // Nyquist are real for real signals; drop any rounding-level
      // imaginary part so the inverse transform is exactly real.
      buf[0] = Complex(spec.at(l, 0, ch).real(), 0.0);
      for (std::size_t k = 1; k < n / 2; ++k) {
        buf[k] = spec.at(l, k, ch);
        buf[n - k] = std::conj(buf[k]);
      }
      buf[n / 2] = Complex(spec.at(l, n / 2, ch).real(), 0.0);
      fft.inverse(buf);
      const double scale = 1.0 / static_cast<double>(n);
      double* dst = samples + l * cfg.hop;
      for (std::size_t i = 0; i < n; ++i) dst[i] += window[i] * buf[i].real() * scale;
    }
  }
  return out;
}

}  // namespace rtflab
