// core/include/rtflab/experiment.hpp

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

#ifndef RTFLAB_EXPERIMENT_HPP_
#define RTFLAB_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rtflab/config.hpp"
#include "rtflab/covariance.hpp"
#include "rtflab/scene.hpp"
#include "rtflab/stft.hpp"

namespace rtflab {

enum class EstimatorKind { Sc, Gevd, Model };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Gevd;
  std::size_t me_index = 0;  // which external microphone, for Sc
  std::string name;          // "sc1", "sc2", ..., "gevd", "model"
};

// Accepts "scN" (1-based), "gevd", "model". Throws ConfigError otherwise.
EstimatorSpec parse_estimator(const std::string& name, std::size_t me_count);

enum class CovarianceMode { Oracle, Blind };
enum class FrequencyAverage { EnergyWeighted, Linear };

struct ExperimentConfig {
  SceneConfig scene;
  StftConfig stft;
  double tau_y = 0.25;  // seconds
  double tau_x = 0.25;
  double tau_n = 1.0;
  SmoothingMap smoothing_map = SmoothingMap::Exponential;
  CovarianceMode covariance_mode = CovarianceMode::Oracle;
  TrackingMode tracking_mode = TrackingMode::Independent;
  std::vector<EstimatorSpec> estimators;
  FrequencyAverage frequency_average = FrequencyAverage::EnergyWeighted;
  std::size_t bias_frame_stride = 25;  // frame subsampling for bias.csv
  std::string output_dir = "out";
  bool write_outputs = true;
};

// The stock experiment: four-mic binaural-style local array, two external
// microphones, a source walking from the first external microphone to the
// second over 30 s at 0 dB reference input SNR in a diffuse noise field.
ExperimentConfig default_experiment_config();

// Merge file values over the defaults. Unknown keys raise ConfigError.
ExperimentConfig experiment_config_from(const Config& file);

// Full key set with current values; `rtflab --dump-defaults` prints this.
Config experiment_config_to_config(const ExperimentConfig& cfg);

struct EstimatorResult {
  std::string name;
  EstimatorKind kind = EstimatorKind::Sc;
  double output_snr_db = 0.0;  // averaged over declared reference choices
  double delta_snr_db = 0.0;
  std::vector<double> per_reference_delta_db;
  // Frequency-averaged combination weights per frame ([frame][me]); empty
  // for SC estimators and before the first valid frame.
  std::vector<std::vector<Complex>> avg_alpha;
  std::uint64_t fallback_count = 0;
};

struct ExperimentReport {
  double input_snr_db = 0.0;
  std::size_t frames = 0;
  std::size_t first_valid_frame = 0;
  std::vector<bool> vad;
  // Frequency-averaged external input SNRs in dB, [frame][me].
  std::vector<std::vector<double>> ext_snr_db;
  std::vector<EstimatorResult> estimators;
};

// Scene synthesis, covariance tracking, per-estimator RTF estimation, MVDR
// beamforming and shadow-filter metrics. Deterministic given the seed; when
// cfg.write_outputs is set, writes weights.csv, snr.csv, bias.csv and the
// enhanced output WAVs into cfg.output_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Scene corpus on disk: speech/noise/mixture WAVs, a metadata file, the
// per-segment oracle RTF table (CSV) and the frame VAD.
void write_scene_files(const std::string& dir, const LabeledRecording& rec,
                       const SceneConfig& scene_cfg, const StftConfig& stft_cfg);

}  // namespace rtflab

#endif  // RTFLAB_EXPERIMENT_HPP_
