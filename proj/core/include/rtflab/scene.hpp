// core/include/rtflab/scene.hpp

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

#ifndef RTFLAB_SCENE_HPP_
#define RTFLAB_SCENE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rtflab/complex_matrix.hpp"
#include "rtflab/stft.hpp"

namespace rtflab {

using Position = std::array<double, 3>;  // meters

struct MicGeometry {
  std::vector<Position> lma_positions;       // index 0 is the reference microphone
  std::vector<Position> external_positions;  // far from the local array
  // When set, lma_positions[right_lma_start..] form a second sub-array with
  // its own reference microphone (binaural-style layouts). SNR-improvement
  // reporting then averages over both reference choices.
  std::optional<std::size_t> right_lma_start;

  std::size_t ma() const { return lma_positions.size(); }
  std::size_t me() const { return external_positions.size(); }
  std::size_t total() const { return ma() + me(); }
  Position position(std::size_t m) const {
    return m < ma() ? lma_positions[m] : external_positions[m - ma()];
  }
  void validate() const;  // distinct positions, at least one mic per group
};

struct TrajectoryPoint {
  double time = 0.0;  // seconds
  Position position{};
};

struct SourceTrajectory {
  std::vector<TrajectoryPoint> waypoints;  // strictly increasing times
  std::vector<double> source_signal;       // empty: speech-shaped bursts from the seed

  // Linear interpolation, clamped at both ends.
  Position position_at(double t) const;
};

enum class NoiseField { SphericallyDiffuse, Uncorrelated };

struct SceneConfig {
  MicGeometry geometry;
  SourceTrajectory trajectory;
  double duration = 30.0;        // seconds
  double sample_rate = 16000.0;  // Hz
  double target_input_snr_lma_db = 0.0;
  double speed_of_sound = 343.0;  // m/s
  NoiseField noise_field = NoiseField::SphericallyDiffuse;
  std::uint64_t seed = 1;
  double vad_threshold = 1e-4;     // frame speech energy over peak frame energy
  double segment_duration = 0.25;  // seconds; trajectory discretization step
};

struct LabeledRecording {
  MultichannelSignal speech;
  MultichannelSignal noise;    // scaled to the target SNR
  MultichannelSignal mixture;  // speech + noise, samplewise
  // Free-field RTF per trajectory segment: [segment][bin] is an M-vector
  // with a unit reference entry.
  std::vector<std::vector<ComplexVector>> oracle_rtf;
  std::vector<double> segment_start_times;  // seconds, one per segment
  std::vector<bool> vad;                    // per STFT frame of the mixture
  double noise_scale = 1.0;

  // Segment covering STFT frame l (by frame center time).
  std::size_t segment_of_frame(std::size_t frame, const StftConfig& cfg) const;
};

// Free-field RTF of a point source: entry m is
// (d_ref/d_m) exp(-j 2 pi f_k (d_m - d_ref) / c); the reference entry is
// exactly one at every bin. Throws CoincidentSourceMic when the source sits
// on a microphone.
std::vector<ComplexVector> steering_rtf(const MicGeometry& geometry, const Position& source,
                                        const StftConfig& cfg, double speed_of_sound = 343.0);

struct SpeechRender {
  MultichannelSignal channels;
  std::vector<std::vector<ComplexVector>> segment_rtfs;
  std::vector<double> segment_start_times;
};

// Renders the moving source through per-segment fractional-delay/gain
// filters with one-frame crossfades between segments.
SpeechRender synthesize_speech(const SceneConfig& cfg, const StftConfig& stft_cfg);

// M-channel noise whose local-array coherence follows the spherically
// isotropic model sinc(2 pi f d / c) (realized by per-bin Cholesky mixing of
// independent Gaussian spectra) and whose external channels are independent.
MultichannelSignal synthesize_diffuse_noise(const MicGeometry& geometry, double duration,
                                            const SceneConfig& scene_cfg,
                                            const StftConfig& stft_cfg);

// Scales noise so the reference-channel SNR matches target_db, forms the
// mixture, and derives the oracle VAD from per-frame speech energy. RTF
// fields are left empty; render_scene fills them.
LabeledRecording mix_at_snr(const MultichannelSignal& speech, const MultichannelSignal& noise,
                            double target_db, std::size_t reference_channel,
                            const StftConfig& stft_cfg, double vad_threshold = 1e-4);

// Full scene synthesis: speech render, diffuse noise, SNR-calibrated mix,
// oracle RTF table and VAD. Deterministic given cfg.seed.
LabeledRecording render_scene(const SceneConfig& cfg, const StftConfig& stft_cfg);

// Deterministic speech-shaped noise bursts (1.2 s on / 0.6 s off, 20 ms
// ramps) used as default source material.
std::vector<double> speech_shaped_bursts(double duration, double sample_rate,
                                         std::uint64_t seed);

// Windowed-sinc fractional delay (64 taps), delay in samples (may be
// negative). Out-of-range input reads as zero.
std::vector<double> fractional_delay(const std::vector<double>& signal, double delay_samples);

}  // namespace rtflab

#endif  // RTFLAB_SCENE_HPP_
