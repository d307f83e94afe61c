// core/src/experiment.cpp

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

#include "rtflab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rtflab/beamform.hpp"
#include "rtflab/linalg.hpp"
#include "rtflab/rtf.hpp"
#include "rtflab/wav.hpp"

namespace rtflab {

namespace {

constexpr std::uint64_t kWarmupFrames = 5;
constexpr double kSnrFloor = 1e-8;

std::string format_positions(const std::vector<Position>& positions) {
  std::string out;
  char buf[96];
  for (std::size_t i = 0; i < positions.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.17g,%.17g,%.17g", i ? "; " : "", positions[i][0],
                  positions[i][1], positions[i][2]);
    out += buf;
  }
  return out;
}

std::vector<Position> parse_positions(const std::string& text, const std::string& key) {
  std::vector<Position> out;
  for (const std::string& item : split_list(text, ';')) {
    std::vector<std::string> parts = split_list(item, ',');
    if (parts.size() != 3)
      throw ConfigError("config key '" + key + "': expected x,y,z triples separated by ';'");
    out.push_back(Position{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
  }
  return out;
}

std::string format_waypoints(const std::vector<TrajectoryPoint>& waypoints) {
  std::string out;
  char buf[128];
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.17g,%.17g,%.17g,%.17g", i ? "; " : "",
                  waypoints[i].time, waypoints[i].position[0], waypoints[i].position[1],
                  waypoints[i].position[2]);
    out += buf;
  }
  return out;
}

std::vector<TrajectoryPoint> parse_waypoints(const std::string& text) {
  std::vector<TrajectoryPoint> out;
  for (const std::string& item : split_list(text, ';')) {
    std::vector<std::string> parts = split_list(item, ',');
    if (parts.size() != 4)
      throw ConfigError("config key 'trajectory.waypoints': expected t,x,y,z entries");
    out.push_back(TrajectoryPoint{
        std::stod(parts[0]),
        Position{std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3])}});
  }
  return out;
}

const char* const kKnownKeys[] = {
    "scene.duration",       "scene.sample_rate",     "scene.input_snr_db",
    "scene.speed_of_sound", "scene.noise_field",     "scene.seed",
    "scene.vad_threshold",  "scene.segment_duration","geometry.lma",
    "geometry.external",    "geometry.right_lma_start", "trajectory.waypoints",
    "stft.frame_length",    "smoothing.tau_y",       "smoothing.tau_x",
    "smoothing.tau_n",      "smoothing.map",         "covariance.mode",
    "covariance.tracking",  "estimators",            "weights.frequency_average",
    "report.bias_frame_stride", "output.dir",
};

}  // namespace

EstimatorSpec parse_estimator(const std::string& name, std::size_t me_count) {
  EstimatorSpec spec;
  spec.name = name;
  if (name == "gevd") {
    spec.kind = EstimatorKind::Gevd;
  } else if (name == "model") {
    spec.kind = EstimatorKind::Model;
  } else if (name.size() > 2 && name.compare(0, 2, "sc") == 0) {
    spec.kind = EstimatorKind::Sc;
    const long idx = std::strtol(name.c_str() + 2, nullptr, 10);
    if (idx < 1 || static_cast<std::size_t>(idx) > me_count)
      throw ConfigError("estimator '" + name + "': external microphone index out of range 1.." +
                        std::to_string(me_count));
    spec.me_index = static_cast<std::size_t>(idx - 1);
  } else {
    throw ConfigError("unknown estimator '" + name + "' (expected scN, gevd or model)");
  }
  return spec;
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;

  // Binaural-style local array: two 7 mm pairs, 15 cm apart, plus two
  // external microphones flanking the walking path.
  cfg.scene.geometry.lma_positions = {
      {-0.075, 0.0, 0.0}, {-0.068, 0.0, 0.0}, {0.068, 0.0, 0.0}, {0.075, 0.0, 0.0}};
  cfg.scene.geometry.external_positions = {{-1.2, 1.0, 0.0}, {1.2, 1.0, 0.0}};
  cfg.scene.trajectory.waypoints = {{0.0, {-1.3, 1.2, 0.0}},
                                    {3.0, {-1.3, 1.2, 0.0}},
                                    {27.0, {1.3, 1.2, 0.0}},
                                    {30.0, {1.3, 1.2, 0.0}}};
  cfg.scene.duration = 30.0;
  cfg.scene.sample_rate = 16000.0;
  cfg.scene.target_input_snr_lma_db = 0.0;
  cfg.scene.seed = 1;

  cfg.stft.sample_rate = cfg.scene.sample_rate;
  cfg.estimators = {parse_estimator("sc1", 2), parse_estimator("sc2", 2),
                    parse_estimator("gevd", 2), parse_estimator("model", 2)};
  return cfg;
}

ExperimentConfig experiment_config_from(const Config& file) {
  for (const auto& [key, value] : file.values()) {
    bool known = false;
    for (const char* k : kKnownKeys) known |= (key == k);
    if (!known) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig cfg = default_experiment_config();
  cfg.scene.duration = file.get_double("scene.duration", cfg.scene.duration);
  cfg.scene.sample_rate = file.get_double("scene.sample_rate", cfg.scene.sample_rate);
  cfg.scene.target_input_snr_lma_db =
      file.get_double("scene.input_snr_db", cfg.scene.target_input_snr_lma_db);
  cfg.scene.speed_of_sound = file.get_double("scene.speed_of_sound", cfg.scene.speed_of_sound);
  cfg.scene.seed = file.get_u64("scene.seed", cfg.scene.seed);
  cfg.scene.vad_threshold = file.get_double("scene.vad_threshold", cfg.scene.vad_threshold);
  cfg.scene.segment_duration =
      file.get_double("scene.segment_duration", cfg.scene.segment_duration);

  const std::string field = file.get_string("scene.noise_field", "diffuse");
  if (field == "diffuse")
    cfg.scene.noise_field = NoiseField::SphericallyDiffuse;
  else if (field == "uncorrelated")
    cfg.scene.noise_field = NoiseField::Uncorrelated;
  else
    throw ConfigError("scene.noise_field: expected 'diffuse' or 'uncorrelated'");

  if (file.has("geometry.lma"))
    cfg.scene.geometry.lma_positions =
        parse_positions(file.get_string("geometry.lma", ""), "geometry.lma");
  if (file.has("geometry.external"))
    cfg.scene.geometry.external_positions =
        parse_positions(file.get_string("geometry.external", ""), "geometry.external");
  const std::string right = file.get_string("geometry.right_lma_start", "");
  if (right.empty())
    cfg.scene.geometry.right_lma_start.reset();
  else
    cfg.scene.geometry.right_lma_start = static_cast<std::size_t>(std::stoul(right));
  if (file.has("trajectory.waypoints"))
    cfg.scene.trajectory.waypoints = parse_waypoints(file.get_string("trajectory.waypoints", ""));

  cfg.stft.frame_length = static_cast<std::size_t>(
      file.get_u64("stft.frame_length", cfg.stft.frame_length));
  cfg.stft.hop = cfg.stft.frame_length / 2;
  cfg.stft.sample_rate = cfg.scene.sample_rate;

  cfg.tau_y = file.get_double("smoothing.tau_y", cfg.tau_y);
  cfg.tau_x = file.get_double("smoothing.tau_x", cfg.tau_x);
  cfg.tau_n = file.get_double("smoothing.tau_n", cfg.tau_n);
  const std::string map = file.get_string("smoothing.map", "exponential");
  if (map == "exponential")
    cfg.smoothing_map = SmoothingMap::Exponential;
  else if (map == "linear")
    cfg.smoothing_map = SmoothingMap::Linear;
  else
    throw ConfigError("smoothing.map: expected 'exponential' or 'linear'");

  const std::string mode = file.get_string("covariance.mode", "oracle");
  if (mode == "oracle")
    cfg.covariance_mode = CovarianceMode::Oracle;
  else if (mode == "blind")
    cfg.covariance_mode = CovarianceMode::Blind;
  else
    throw ConfigError("covariance.mode: expected 'oracle' or 'blind'");

  const std::string tracking = file.get_string("covariance.tracking", "independent");
  if (tracking == "independent")
    cfg.tracking_mode = TrackingMode::Independent;
  else if (tracking == "consistent_sum")
    cfg.tracking_mode = TrackingMode::ConsistentSum;
  else
    throw ConfigError("covariance.tracking: expected 'independent' or 'consistent_sum'");

  const std::string avg = file.get_string("weights.frequency_average", "energy");
  if (avg == "energy")
    cfg.frequency_average = FrequencyAverage::EnergyWeighted;
  else if (avg == "linear")
    cfg.frequency_average = FrequencyAverage::Linear;
  else
    throw ConfigError("weights.frequency_average: expected 'energy' or 'linear'");

  cfg.bias_frame_stride =
      static_cast<std::size_t>(file.get_u64("report.bias_frame_stride", cfg.bias_frame_stride));
  cfg.output_dir = file.get_string("output.dir", cfg.output_dir);

  if (file.has("estimators")) {
    cfg.estimators.clear();
    for (const std::string& name : split_list(file.get_string("estimators", ""), ','))
      cfg.estimators.push_back(parse_estimator(name, cfg.scene.geometry.me()));
  } else {
    // Re-derive against the configured geometry.
    std::vector<EstimatorSpec> specs;
    for (const EstimatorSpec& spec : cfg.estimators) {
      if (spec.kind == EstimatorKind::Sc && spec.me_index >= cfg.scene.geometry.me()) continue;
      specs.push_back(spec);
    }
    cfg.estimators = std::move(specs);
  }
  if (cfg.estimators.empty()) throw ConfigError("estimators: need at least one estimator");
  return cfg;
}

Config experiment_config_to_config(const ExperimentConfig& cfg) {
  Config out;
  char buf[64];
  auto put_num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.set(key, buf);
  };
  put_num("scene.duration", cfg.scene.duration);
  put_num("scene.sample_rate", cfg.scene.sample_rate);
  put_num("scene.input_snr_db", cfg.scene.target_input_snr_lma_db);
  put_num("scene.speed_of_sound", cfg.scene.speed_of_sound);
  out.set("scene.noise_field",
          cfg.scene.noise_field == NoiseField::SphericallyDiffuse ? "diffuse" : "uncorrelated");
  out.set("scene.seed", std::to_string(cfg.scene.seed));
  put_num("scene.vad_threshold", cfg.scene.vad_threshold);
  put_num("scene.segment_duration", cfg.scene.segment_duration);
  out.set("geometry.lma", format_positions(cfg.scene.geometry.lma_positions));
  out.set("geometry.external", format_positions(cfg.scene.geometry.external_positions));
  out.set("geometry.right_lma_start",
          cfg.scene.geometry.right_lma_start
              ? std::to_string(*cfg.scene.geometry.right_lma_start)
              : "");
  out.set("trajectory.waypoints", format_waypoints(cfg.scene.trajectory.waypoints));
  out.set("stft.frame_length", std::to_string(cfg.stft.frame_length));
  put_num("smoothing.tau_y", cfg.tau_y);
  put_num("smoothing.tau_x", cfg.tau_x);
  put_num("smoothing.tau_n", cfg.tau_n);
  out.set("smoothing.map",
          cfg.smoothing_map == SmoothingMap::Exponential ? "exponential" : "linear");
  out.set("covariance.mode", cfg.covariance_mode == CovarianceMode::Oracle ? "oracle" : "blind");
  out.set("covariance.tracking",
          cfg.tracking_mode == TrackingMode::Independent ? "independent" : "consistent_sum");
  std::string estimators;
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
    if (i) estimators += ",";
    estimators += cfg.estimators[i].name;
  }
  out.set("estimators", estimators);
  out.set("weights.frequency_average",
          cfg.frequency_average == FrequencyAverage::EnergyWeighted ? "energy" : "linear");
  out.set("report.bias_frame_stride", std::to_string(cfg.bias_frame_stride));
  out.set("output.dir", cfg.output_dir);
  return out;
}

namespace {

MultichannelSignal permute_channels(const MultichannelSignal& sig,
                                    const std::vector<std::size_t>& order) {
  MultichannelSignal out;
  out.reserve(order.size());
  for (std::size_t idx : order) out.push_back(sig[idx]);
  return out;
}

struct PipelineArtifacts {
  double input_snr_db = 0.0;
  std::vector<double> out_snr_db;  // per estimator
  std::size_t first_valid_frame = 0;
  std::vector<std::uint64_t> fallbacks;                   // per estimator
  std::vector<std::vector<std::vector<Complex>>> alphas;  // [est][frame][me]
  std::vector<std::vector<double>> ext_snr_lin;           // [frame][me]
  std::vector<Spectrogram> enhanced;                      // per estimator, 1 channel
  std::string bias_rows;                                  // CSV body (primary ref only)
};

// One full pass for a fixed reference microphone. `primary` keeps the
// trajectory/bias/enhanced artifacts, the secondary pass only the SNRs.
PipelineArtifacts run_pipeline(const ExperimentConfig& cfg, const LabeledRecording& rec,
                               std::size_t ref, bool primary) {
  const std::size_t m = cfg.scene.geometry.total();
  const std::size_t ma = cfg.scene.geometry.ma();
  const std::size_t me = cfg.scene.geometry.me();
  const std::size_t n_est = cfg.estimators.size();
  const bool oracle = cfg.covariance_mode == CovarianceMode::Oracle;

  std::vector<std::size_t> order;
  order.push_back(ref);
  for (std::size_t c = 0; c < m; ++c)
    if (c != ref) order.push_back(c);

  const Spectrogram y_spec = analyze(permute_channels(rec.mixture, order), cfg.stft);
  const Spectrogram x_spec = analyze(permute_channels(rec.speech, order), cfg.stft);
  const Spectrogram n_spec = analyze(permute_channels(rec.noise, order), cfg.stft);
  const std::size_t frames = y_spec.frames();
  const std::size_t bins = y_spec.bins();
  if (rec.vad.size() != frames)
    throw DimensionMismatch("run_experiment: VAD length differs from frame count");

  CovarianceSmoothing smoothing;
  smoothing.lambda_y = smoothing_factor(cfg.tau_y, cfg.stft.hop_duration(), cfg.smoothing_map);
  smoothing.lambda_x = smoothing_factor(cfg.tau_x, cfg.stft.hop_duration(), cfg.smoothing_map);
  smoothing.lambda_n = smoothing_factor(cfg.tau_n, cfg.stft.hop_duration(), cfg.smoothing_map);
  CovarianceState state(bins, m, smoothing, cfg.tracking_mode);

  PipelineArtifacts art;
  art.fallbacks.assign(n_est, 0);
  art.out_snr_db.assign(n_est, 0.0);
  std::vector<Spectrogram> s_out(n_est, Spectrogram(frames, bins, 1));
  std::vector<Spectrogram> n_out(n_est, Spectrogram(frames, bins, 1));
  if (primary) {
    art.enhanced.assign(n_est, Spectrogram(frames, bins, 1));
    art.alphas.assign(n_est, {});
    art.ext_snr_lin.assign(frames, std::vector<double>(me, 0.0));
    for (std::size_t e = 0; e < n_est; ++e)
      if (cfg.estimators[e].kind != EstimatorKind::Sc)
        art.alphas[e].assign(frames, std::vector<Complex>(me, Complex(0.0)));
  }

  bool seen_valid = false;
  art.first_valid_frame = frames;
  std::vector<ComplexVector> h_est(n_est);
  std::vector<double> snrs(me);
  std::vector<std::vector<Complex>> alpha_accum(n_est, std::vector<Complex>(me));
  std::vector<double> ext_accum(me);
  ComplexVector unit_ref = ComplexVector::unit(m, 0);

  char row[256];

  for (std::size_t l = 0; l < frames; ++l) {
    const FrameView yv = frame_view(y_spec, l);
    if (oracle)
      state.update(yv, frame_view(x_spec, l), frame_view(n_spec, l), rec.vad[l]);
    else
      state.update(yv, rec.vad[l]);

    const bool valid = state.frames_seen_n() >= kWarmupFrames &&
                       (oracle ? state.frames_seen_x() : state.frames_seen_y()) >= kWarmupFrames;
    if (!valid) {
      // Passthrough until the trackers have data: output the (permuted)
      // reference channel.
      for (std::size_t e = 0; e < n_est; ++e)
        for (std::size_t k = 0; k < bins; ++k) {
          s_out[e].at(l, k, 0) = x_spec.at(l, k, 0);
          n_out[e].at(l, k, 0) = n_spec.at(l, k, 0);
          if (primary) art.enhanced[e].at(l, k, 0) = y_spec.at(l, k, 0);
        }
      continue;
    }
    if (!seen_valid) {
      seen_valid = true;
      art.first_valid_frame = l;
    }

    double weight_sum = 0.0;
    for (auto& acc : alpha_accum) std::fill(acc.begin(), acc.end(), Complex(0.0));
    std::fill(ext_accum.begin(), ext_accum.end(), 0.0);

    const std::size_t segment = primary ? rec.segment_of_frame(l, cfg.stft) : 0;
    const bool emit_bias =
        primary && cfg.write_outputs && rec.vad[l] && (l % cfg.bias_frame_stride == 0);

    for (std::size_t k = 0; k < bins; ++k) {
      const ComplexMatrix& rn = state.rn(k);
      const ComplexMatrix& ry = state.ry(k);
      const ComplexMatrix& rx = state.rx(k);

      ComplexMatrix rn_factor;
      bool bin_ok = true;
      try {
        rn_factor = hermitian_cholesky(diagonal_loaded(rn));
      } catch (const NotPositiveDefinite&) {
        bin_ok = false;
      }

      ComplexMatrix estimates;
      if (bin_ok) {
        try {
          estimates = build_estimate_matrix(ry, ma, me);
        } catch (const NearZeroNormalizer&) {
          bin_ok = false;
        }
      }

      // External input SNRs from the tracked diagonals, floored away from
      // the singularity at silent bins.
      for (std::size_t j = 0; j < me; ++j) {
        const std::size_t idx = ma + j;
        const double phi_n = rn(idx, idx).real();
        const double phi_x =
            oracle ? rx(idx, idx).real() : std::max(0.0, (ry(idx, idx) - rn(idx, idx)).real());
        snrs[j] = (phi_n > 0.0) ? std::max(phi_x / phi_n, kSnrFloor) : kSnrFloor;
      }

      const double bin_weight =
          cfg.frequency_average == FrequencyAverage::EnergyWeighted
              ? std::max(oracle ? rx(0, 0).real() : (ry(0, 0) - rn(0, 0)).real(), 0.0)
              : 1.0;

      for (std::size_t e = 0; e < n_est; ++e) {
        const EstimatorSpec& spec = cfg.estimators[e];
        const Complex* alpha_data = nullptr;
        std::size_t alpha_len = 0;
        if (!bin_ok) {
          h_est[e] = unit_ref;
        } else {
          switch (spec.kind) {
            case EstimatorKind::Sc:
              h_est[e] = estimates.column(spec.me_index);
              break;
            case EstimatorKind::Gevd: {
              WeightVector w = gevd_weights_with_factor(estimates, ry, rn_factor);
              if (w.fallback) ++art.fallbacks[e];
              h_est[e] = combine(estimates, w);
              if (primary) {
                auto& acc = alpha_accum[e];
                for (std::size_t j = 0; j < me; ++j) acc[j] += bin_weight * w.alpha[j];
                alpha_data = w.alpha.data();
                alpha_len = me;
              }
              break;
            }
            case EstimatorKind::Model: {
              WeightVector w = model_weights(snrs);
              if (w.fallback) ++art.fallbacks[e];
              h_est[e] = combine(estimates, w);
              if (primary) {
                auto& acc = alpha_accum[e];
                for (std::size_t j = 0; j < me; ++j) acc[j] += bin_weight * w.alpha[j];
                alpha_data = w.alpha.data();
                alpha_len = me;
              }
              break;
            }
          }
        }

        // MVDR through the shared factor.
        ComplexVector w_bf;
        if (bin_ok) {
          ComplexVector t = cholesky_solve(rn_factor, h_est[e]);
          const double denom = dot(h_est[e], t).real();
          if (denom > 0.0 && std::isfinite(denom)) {
            for (std::size_t c = 0; c < m; ++c) t[c] /= denom;
            w_bf = std::move(t);
          }
        }
        if (w_bf.size() == 0) w_bf = unit_ref;

        const Complex* xk = x_spec.bin_data(l, k);
        const Complex* nk = n_spec.bin_data(l, k);
        Complex zs = 0.0, zn = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          const Complex wc = std::conj(w_bf[c]);
          zs += wc * xk[c];
          zn += wc * nk[c];
        }
        s_out[e].at(l, k, 0) = zs;
        n_out[e].at(l, k, 0) = zn;
        if (primary) {
          const Complex* yk = y_spec.bin_data(l, k);
          Complex zy = 0.0;
          for (std::size_t c = 0; c < m; ++c) zy += std::conj(w_bf[c]) * yk[c];
          art.enhanced[e].at(l, k, 0) = zy;
        }

        if (emit_bias && bin_ok) {
          const ComplexVector& h_true = rec.oracle_rtf[segment][k];
          double predicted;
          if (spec.kind == EstimatorKind::Sc)
            predicted = predicted_bias_sc(snrs[spec.me_index]);
          else
            predicted = predicted_bias_msnr(snrs);
          for (std::size_t j = 0; j < me; ++j) {
            if (spec.kind == EstimatorKind::Sc && j != spec.me_index) continue;
            const std::size_t idx = ma + j;
            if (std::abs(h_true[idx]) < 1e-6) continue;  // ratio undefined near zeros
            const Complex ratio = h_est[e][idx] / h_true[idx];
            double re_a = 0.0, im_a = 0.0;
            if (alpha_data && j < alpha_len) {
              re_a = alpha_data[j].real();
              im_a = alpha_data[j].imag();
            } else if (spec.kind == EstimatorKind::Sc) {
              re_a = (j == spec.me_index) ? 1.0 : 0.0;
            }
            std::snprintf(row, sizeof(row), "%s,%zu,%zu,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          spec.name.c_str(), l, k, j + 1, re_a, im_a, predicted,
                          std::abs(ratio), std::arg(ratio));
            art.bias_rows += row;
          }
        }
      }

      if (primary) {
        for (std::size_t j = 0; j < me; ++j) ext_accum[j] += bin_weight * snrs[j];
        weight_sum += bin_weight;
      }
    }

    if (primary && weight_sum > 0.0) {
      for (std::size_t e = 0; e < n_est; ++e) {
        if (cfg.estimators[e].kind == EstimatorKind::Sc) continue;
        for (std::size_t j = 0; j < me; ++j)
          art.alphas[e][l][j] = alpha_accum[e][j] / weight_sum;
      }
      for (std::size_t j = 0; j < me; ++j) art.ext_snr_lin[l][j] = ext_accum[j] / weight_sum;
    }
  }

  // Broadband input SNR through the same shadow machinery with a
  // passthrough beamformer.
  {
    Spectrogram x_ref(frames, bins, 1), n_ref(frames, bins, 1);
    for (std::size_t l = 0; l < frames; ++l)
      for (std::size_t k = 0; k < bins; ++k) {
        x_ref.at(l, k, 0) = x_spec.at(l, k, 0);
        n_ref.at(l, k, 0) = n_spec.at(l, k, 0);
      }
    art.input_snr_db = broadband_snr_from_components(x_ref, n_ref, rec.vad, cfg.stft);
  }
  for (std::size_t e = 0; e < n_est; ++e)
    art.out_snr_db[e] = broadband_snr_from_components(s_out[e], n_out[e], rec.vad, cfg.stft);
  return art;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << body;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.scene.geometry.validate();
  cfg.stft.validate();
  if (cfg.estimators.empty()) throw ConfigError("run_experiment: no estimators configured");
  if (cfg.stft.sample_rate != cfg.scene.sample_rate)
    throw ConfigError("run_experiment: STFT and scene sample rates differ");
  if (cfg.covariance_mode == CovarianceMode::Blind &&
      cfg.tracking_mode == TrackingMode::ConsistentSum)
    throw ConfigError("run_experiment: consistent-sum tracking needs oracle components");

  const LabeledRecording rec = render_scene(cfg.scene, cfg.stft);

  std::vector<std::size_t> references{0};
  if (cfg.scene.geometry.right_lma_start)
    references.push_back(*cfg.scene.geometry.right_lma_start);

  std::vector<PipelineArtifacts> runs;
  runs.reserve(references.size());
  for (std::size_t r = 0; r < references.size(); ++r)
    runs.push_back(run_pipeline(cfg, rec, references[r], r == 0));

  ExperimentReport report;
  report.frames = rec.vad.size();
  report.first_valid_frame = runs[0].first_valid_frame;
  report.vad = rec.vad;
  report.ext_snr_db.assign(report.frames, std::vector<double>(cfg.scene.geometry.me(), 0.0));
  for (std::size_t l = 0; l < report.frames; ++l)
    for (std::size_t j = 0; j < cfg.scene.geometry.me(); ++j) {
      const double lin = std::max(runs[0].ext_snr_lin[l][j], kSnrFloor);
      report.ext_snr_db[l][j] = 10.0 * std::log10(lin);
    }

  double input_sum = 0.0;
  for (const auto& run : runs) input_sum += run.input_snr_db;
  report.input_snr_db = input_sum / static_cast<double>(runs.size());

  report.estimators.resize(cfg.estimators.size());
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    EstimatorResult& res = report.estimators[e];
    res.name = cfg.estimators[e].name;
    res.kind = cfg.estimators[e].kind;
    res.fallback_count = runs[0].fallbacks[e];
    res.avg_alpha = runs[0].alphas.empty() ? std::vector<std::vector<Complex>>{}
                                           : runs[0].alphas[e];
    double out_sum = 0.0;
    for (const auto& run : runs) {
      out_sum += run.out_snr_db[e];
      res.per_reference_delta_db.push_back(run.out_snr_db[e] - run.input_snr_db);
    }
    res.output_snr_db = out_sum / static_cast<double>(runs.size());
    res.delta_snr_db = res.output_snr_db - report.input_snr_db;
  }

  if (cfg.write_outputs) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const std::string dir = cfg.output_dir + "/";
    char buf[256];

    // weights.csv: per-frame frequency-averaged external input SNRs and the
    // combination weights of every mSNR estimator.
    {
      std::string body = "frame";
      for (std::size_t j = 0; j < cfg.scene.geometry.me(); ++j)
        body += ",snr_e" + std::to_string(j + 1) + "_db";
      for (const auto& spec : cfg.estimators) {
        if (spec.kind == EstimatorKind::Sc) continue;
        for (std::size_t j = 0; j < cfg.scene.geometry.me(); ++j)
          body += "," + spec.name + "_re_a" + std::to_string(j + 1) + "," + spec.name +
                  "_im_a" + std::to_string(j + 1);
      }
      body += "\n";
      for (std::size_t l = report.first_valid_frame; l < report.frames; ++l) {
        body += std::to_string(l);
        for (std::size_t j = 0; j < cfg.scene.geometry.me(); ++j) {
          std::snprintf(buf, sizeof(buf), ",%.9g", report.ext_snr_db[l][j]);
          body += buf;
        }
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
          if (cfg.estimators[e].kind == EstimatorKind::Sc) continue;
          for (std::size_t j = 0; j < cfg.scene.geometry.me(); ++j) {
            const Complex a = report.estimators[e].avg_alpha[l][j];
            std::snprintf(buf, sizeof(buf), ",%.9g,%.9g", a.real(), a.imag());
            body += buf;
          }
        }
        body += "\n";
      }
      write_text_file(dir + "weights.csv", body);
    }

    // snr.csv: one row per estimator.
    {
      std::string body = "estimator,delta_snr_db\n";
      for (const EstimatorResult& res : report.estimators) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g\n", res.name.c_str(), res.delta_snr_db);
        body += buf;
      }
      write_text_file(dir + "snr.csv", body);
    }

    {
      std::string body =
          "estimator,frame,bin,me,re_alpha,im_alpha,predicted_factor,measured_ratio_mag,"
          "measured_ratio_arg\n";
      body += runs[0].bias_rows;
      write_text_file(dir + "bias.csv", body);
    }

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      AudioBuffer out;
      out.sample_rate = cfg.scene.sample_rate;
      out.channels = synthesize(runs[0].enhanced[e], cfg.stft);
      write_wav(dir + "enhanced_" + cfg.estimators[e].name + ".wav", out);
    }

    write_text_file(dir + "experiment_config.txt", experiment_config_to_config(cfg).serialize());
  }
  return report;
}

void write_scene_files(const std::string& dir, const LabeledRecording& rec,
                       const SceneConfig& scene_cfg, const StftConfig& stft_cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = dir + "/";

  auto write_multi = [&](const std::string& name, const MultichannelSignal& sig) {
    AudioBuffer buf;
    buf.sample_rate = scene_cfg.sample_rate;
    buf.channels = sig;
    write_wav(base + name, buf);
  };
  write_multi("speech.wav", rec.speech);
  write_multi("noise.wav", rec.noise);
  write_multi("mixture.wav", rec.mixture);

  char buf[160];
  {
    std::string body;
    body += "sample_rate = " + std::to_string(static_cast<long>(scene_cfg.sample_rate)) + "\n";
    std::snprintf(buf, sizeof(buf), "duration = %.17g\n", scene_cfg.duration);
    body += buf;
    body += "seed = " + std::to_string(scene_cfg.seed) + "\n";
    std::snprintf(buf, sizeof(buf), "noise_scale = %.17g\n", rec.noise_scale);
    body += buf;
    body += "noise_field = ";
    body += (scene_cfg.noise_field == NoiseField::SphericallyDiffuse ? "diffuse" : "uncorrelated");
    body += "\n";
    body += "geometry.lma = " + format_positions(scene_cfg.geometry.lma_positions) + "\n";
    body += "geometry.external = " + format_positions(scene_cfg.geometry.external_positions) +
            "\n";
    body += "segments = " + std::to_string(rec.segment_start_times.size()) + "\n";
    std::snprintf(buf, sizeof(buf), "segment_duration = %.17g\n", scene_cfg.segment_duration);
    body += buf;
    write_text_file(base + "scene_meta.txt", body);
  }
  {
    std::string body = "segment,bin,mic,re,im\n";
    for (std::size_t s = 0; s < rec.oracle_rtf.size(); ++s)
      for (std::size_t k = 0; k < rec.oracle_rtf[s].size(); ++k)
        for (std::size_t c = 0; c < rec.oracle_rtf[s][k].size(); ++c) {
          std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.17g,%.17g\n", s, k, c,
                        rec.oracle_rtf[s][k][c].real(), rec.oracle_rtf[s][k][c].imag());
          body += buf;
        }
    write_text_file(base + "oracle_rtf.csv", body);
  }
  {
    std::string body = "frame,active\n";
    for (std::size_t l = 0; l < rec.vad.size(); ++l)
      body += std::to_string(l) + "," + (rec.vad[l] ? "1" : "0") + "\n";
    write_text_file(base + "vad.csv", body);
  }
}

}  // namespace rtflab
