// core/include/rtflab/covariance.hpp

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

#ifndef RTFLAB_COVARIANCE_HPP_
#define RTFLAB_COVARIANCE_HPP_

#include <cstdint>
#include <ostream>
#include <vector>

#include "rtflab/complex_matrix.hpp"
#include "rtflab/stft.hpp"

namespace rtflab {

// How a smoothing time constant maps to a per-frame forgetting factor.
enum class SmoothingMap { Exponential, Linear };

// Per-frame forgetting factor for recursive covariance smoothing.
// Exponential: exp(-hop/tau). Linear: 1 - hop/tau, clamped into (0, 1).
// Throws NonpositiveInput unless both arguments are positive.
double smoothing_factor(double time_constant, double hop_duration,
                        SmoothingMap map = SmoothingMap::Exponential);

enum class TrackingMode {
  Independent,    // ry tracked from the noisy frames on its own
  ConsistentSum,  // ry maintained as exactly rx + rn (oracle components required)
};

struct CovarianceSmoothing {
  double lambda_y = 0.0;
  double lambda_x = 0.0;
  double lambda_n = 0.0;
};

// Lightweight view of one STFT frame (bins x channels).
struct FrameView {
  const Complex* data = nullptr;
  std::size_t bins = 0;
  std::size_t channels = 0;
  const Complex* bin(std::size_t k) const { return data + k * channels; }
};

inline FrameView frame_view(const Spectrogram& spec, std::size_t frame) {
  return FrameView{spec.bin_data(frame, 0), spec.bins(), spec.channels()};
}

// Per-bin recursive tracking of Ry, Rx, Rn with VAD gating. With separated
// components (oracle mode) Rn is updated on every frame and Ry, Rx only
// during speech activity. Without components (blind mode) Rn is updated from
// the noisy frame during speech absence and Rx is never touched.
class CovarianceState {
 public:
  CovarianceState(std::size_t bins, std::size_t channels, CovarianceSmoothing smoothing,
                  TrackingMode mode = TrackingMode::Independent);

  void update(const FrameView& y, bool vad);  // blind mode
  void update(const FrameView& y, const FrameView& x, const FrameView& n, bool vad);

  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return channels_; }
  TrackingMode mode() const { return mode_; }

  const ComplexMatrix& ry(std::size_t bin) const { return ry_[bin]; }
  const ComplexMatrix& rx(std::size_t bin) const { return rx_[bin]; }
  const ComplexMatrix& rn(std::size_t bin) const { return rn_[bin]; }

  std::uint64_t frames_seen_y() const { return frames_y_; }
  std::uint64_t frames_seen_x() const { return frames_x_; }
  std::uint64_t frames_seen_n() const { return frames_n_; }

 private:
  std::size_t bins_;
  std::size_t channels_;
  CovarianceSmoothing smoothing_;
  TrackingMode mode_;
  std::vector<ComplexMatrix> ry_, rx_, rn_;
  std::uint64_t frames_y_ = 0, frames_x_ = 0, frames_n_ = 0;
};

struct OracleCovariances {
  std::vector<ComplexMatrix> rx, rn, ry;  // per bin; ry = rx + rn
};

// Batch sample covariances from separated components: Rn over all frames,
// Rx over speech-active frames only (all frames when vad is empty), and
// Ry formed as their sum. Throws NoActiveFrames if the VAD never fires.
OracleCovariances oracle_covariances(const Spectrogram& x_frames, const Spectrogram& n_frames,
                                     const std::vector<bool>& vad = {});

// Rn + rel * (trace/M) * I; the loading applied before any inversion of a
// tracked noise covariance.
ComplexMatrix diagonal_loaded(const ComplexMatrix& m, double rel = 1e-10);

// Debug dump, one row per entry: bin,row,col,re,im.
void write_covariance_csv(std::ostream& out, const std::vector<ComplexMatrix>& per_bin);

}  // namespace rtflab

#endif  // RTFLAB_COVARIANCE_HPP_
