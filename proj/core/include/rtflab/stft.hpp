// core/include/rtflab/stft.hpp

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

#ifndef RTFLAB_STFT_HPP_
#define RTFLAB_STFT_HPP_

#include <cstddef>
#include <vector>

#include "rtflab/complex_matrix.hpp"

namespace rtflab {

// Channels outer, samples inner.
using MultichannelSignal = std::vector<std::vector<double>>;

enum class Window { SqrtHann };

struct StftConfig {
  double sample_rate = 16000.0;
  std::size_t frame_length = 512;  // 32 ms at 16 kHz
  std::size_t hop = 256;           // 50% overlap
  Window window = Window::SqrtHann;

  std::size_t bins() const { return frame_length / 2 + 1; }
  double hop_duration() const { return static_cast<double>(hop) / sample_rate; }
  double bin_frequency(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate / static_cast<double>(frame_length);
  }
  // Throws ConfigError unless frame_length is even, positive, and hop is
  // exactly half of it (the only overlap the sqrt-Hann pair reconstructs).
  void validate() const;
};

// One-sided multichannel spectrogram. Frame-major storage; within a frame,
// the channel entries of one bin are contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frames, std::size_t bins, std::size_t channels)
      : frames_(frames), bins_(bins), channels_(channels), data_(frames * bins * channels) {}

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return channels_; }

  Complex& at(std::size_t frame, std::size_t bin, std::size_t channel) {
    return data_[(frame * bins_ + bin) * channels_ + channel];
  }
  const Complex& at(std::size_t frame, std::size_t bin, std::size_t channel) const {
    return data_[(frame * bins_ + bin) * channels_ + channel];
  }
  // Pointer to the channel vector of (frame, bin).
  Complex* bin_data(std::size_t frame, std::size_t bin) {
    return data_.data() + (frame * bins_ + bin) * channels_;
  }
  const Complex* bin_data(std::size_t frame, std::size_t bin) const {
    return data_.data() + (frame * bins_ + bin) * channels_;
  }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::size_t channels_ = 0;
  std::vector<Complex> data_;
};

// Square-root-Hann analysis filterbank. Frame l covers samples
// [l*hop, l*hop + frame_length); only frames fully inside the signal are
// produced. Throws SignalTooShort for signals shorter than one frame.
Spectrogram analyze(const MultichannelSignal& signal, const StftConfig& cfg);

// Inverse transform with square-root-Hann synthesis windowing and
// overlap-add. Output length is (frames-1)*hop + frame_length; perfect
// reconstruction holds away from the first and last frame_length samples.
// Throws ConfigMismatch if the spectrogram does not match cfg.
MultichannelSignal synthesize(const Spectrogram& spec, const StftConfig& cfg);

// The analysis window (unit tests and oracle computations use it).
std::vector<double> stft_window(const StftConfig& cfg);

}  // namespace rtflab

#endif  // RTFLAB_STFT_HPP_
