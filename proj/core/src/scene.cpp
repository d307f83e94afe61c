// core/src/scene.cpp

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

#include "rtflab/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rtflab/linalg.hpp"

namespace rtflab {

namespace {

double distance(const Position& a, const Position& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Unnormalized sinc: sin(x)/x with sinc(0) = 1.
double sinc(double x) { return (std::abs(x) < 1e-12) ? 1.0 : std::sin(x) / x; }

constexpr int kDelayHalfTaps = 32;  // 64-tap windowed-sinc interpolator

// sin(pi t) / (pi t), exact one at integer zero.
double unit_sinc(double t) {
  if (t == 0.0) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::sin(pt) / pt;
}

double interp_kernel(double t) {
  if (std::abs(t) >= static_cast<double>(kDelayHalfTaps)) return 0.0;
  const double x = t / static_cast<double>(kDelayHalfTaps);
  const double window = 0.42 + 0.5 * std::cos(std::numbers::pi * x) +
                        0.08 * std::cos(2.0 * std::numbers::pi * x);
  return unit_sinc(t) * window;
}

// Fills out[0..count) with signal delayed by `delay` samples, evaluated at
// output positions start..start+count.
void fractional_delay_range(const std::vector<double>& signal, double delay, std::size_t start,
                            std::size_t count, double* out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(signal.size());
  for (std::size_t i = 0; i < count; ++i) {
    const double base = static_cast<double>(start + i) - delay;
    const std::ptrdiff_t k0 =
        static_cast<std::ptrdiff_t>(std::ceil(base)) - kDelayHalfTaps;
    double acc = 0.0;
    for (std::ptrdiff_t k = k0; k < k0 + 2 * kDelayHalfTaps; ++k) {
      if (k < 0 || k >= n) continue;
      acc += signal[static_cast<std::size_t>(k)] * interp_kernel(base - static_cast<double>(k));
    }
    out[i] = acc;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-bin generator split: bin k draws from mt19937_64 seeded with
// splitmix64(seed * odd-constant + k), so bins are independent streams and
// the whole synthesis is reproducible from the scene seed.
std::mt19937_64 bin_rng(std::uint64_t seed, std::size_t bin) {
  return std::mt19937_64(splitmix64(seed * 0x2545F4914F6CDD1DULL + bin));
}

}  // namespace

void MicGeometry::validate() const {
  if (lma_positions.empty()) throw ConfigError("MicGeometry: need at least one LMA microphone");
  if (external_positions.empty())
    throw ConfigError("MicGeometry: need at least one external microphone");
  for (std::size_t i = 0; i < total(); ++i)
    for (std::size_t j = i + 1; j < total(); ++j)
      if (distance(position(i), position(j)) < 1e-9)
        throw ConfigError("MicGeometry: microphones " + std::to_string(i) + " and " +
                          std::to_string(j) + " coincide");
  if (right_lma_start && (*right_lma_start == 0 || *right_lma_start >= ma()))
    throw ConfigError("MicGeometry: right_lma_start must split the LMA in two");
}

Position SourceTrajectory::position_at(double t) const {
  if (waypoints.empty()) throw ConfigError("SourceTrajectory: no waypoints");
  if (t <= waypoints.front().time) return waypoints.front().position;
  if (t >= waypoints.back().time) return waypoints.back().position;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (t <= waypoints[i].time) {
      const TrajectoryPoint& a = waypoints[i - 1];
      const TrajectoryPoint& b = waypoints[i];
      const double u = (t - a.time) / (b.time - a.time);
      return Position{a.position[0] + u * (b.position[0] - a.position[0]),
                      a.position[1] + u * (b.position[1] - a.position[1]),
                      a.position[2] + u * (b.position[2] - a.position[2])};
    }
  }
  return waypoints.back().position;
}

std::size_t LabeledRecording::segment_of_frame(std::size_t frame, const StftConfig& cfg) const {
  const double t_center =
      (static_cast<double>(frame * cfg.hop) + 0.5 * static_cast<double>(cfg.frame_length)) /
      cfg.sample_rate;
  std::size_t seg = 0;
  while (seg + 1 < segment_start_times.size() && segment_start_times[seg + 1] <= t_center) ++seg;
  return seg;
}

std::vector<ComplexVector> steering_rtf(const MicGeometry& geometry, const Position& source,
                                        const StftConfig& cfg, double speed_of_sound) {
  const std::size_t m = geometry.total();
  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    dist[i] = distance(source, geometry.position(i));
    if (dist[i] < 1e-6)
      throw CoincidentSourceMic("steering_rtf: source coincides with microphone " +
                                std::to_string(i));
  }
  const double d_ref = dist[0];
  std::vector<ComplexVector> rtf(cfg.bins(), ComplexVector(m));
  for (std::size_t k = 0; k < cfg.bins(); ++k) {
    const double f = cfg.bin_frequency(k);
    rtf[k][0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
      const double gain = d_ref / dist[i];
      const double phase = -2.0 * std::numbers::pi * f * (dist[i] - d_ref) / speed_of_sound;
      rtf[k][i] = std::polar(gain, phase);
    }
  }
  return rtf;
}

std::vector<double> fractional_delay(const std::vector<double>& signal, double delay_samples) {
  std::vector<double> out(signal.size());
  fractional_delay_range(signal, delay_samples, 0, signal.size(), out.data());
  return out;
}

std::vector<double> speech_shaped_bursts(double duration, double sample_rate,
                                         std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  std::mt19937_64 rng(splitmix64(seed ^ 0x5be5c0de5u));
  std::normal_distribution<double> g(0.0, 1.0);

  // One-pole lowpass around 500 Hz gives the falling long-term spectrum of
  // speech-like material.
  const double a = std::exp(-2.0 * std::numbers::pi * 500.0 / sample_rate);
  std::vector<double> x(n);
  double state = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state = a * state + (1.0 - a) * g(rng);
    x[i] = state;
  }

  // Burst envelope: 1.2 s on, 0.6 s off, 20 ms raised-cosine ramps, so the
  // oracle VAD sees both states.
  const double period = 1.8, on = 1.2, ramp = 0.02;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::fmod(static_cast<double>(i) / sample_rate, period);
    double env;
    if (t < ramp)
      env = 0.5 - 0.5 * std::cos(std::numbers::pi * t / ramp);
    else if (t < on - ramp)
      env = 1.0;
    else if (t < on)
      env = 0.5 + 0.5 * std::cos(std::numbers::pi * (t - (on - ramp)) / ramp);
    else
      env = 0.0;
    x[i] *= env;
  }

  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(n));
  if (rms > 0.0)
    for (double& v : x) v *= 0.2 / rms;
  return x;
}

SpeechRender synthesize_speech(const SceneConfig& cfg, const StftConfig& stft_cfg) {
  cfg.geometry.validate();
  stft_cfg.validate();
  if (!(cfg.duration > 0.0)) throw ConfigError("SceneConfig: duration must be positive");
  if (cfg.trajectory.waypoints.empty())
    throw ConfigError("SceneConfig: trajectory needs at least one waypoint");
  for (std::size_t i = 1; i < cfg.trajectory.waypoints.size(); ++i)
    if (!(cfg.trajectory.waypoints[i].time > cfg.trajectory.waypoints[i - 1].time))
      throw ConfigError("SceneConfig: waypoint times must be strictly increasing");

  const std::size_t length =
      static_cast<std::size_t>(std::llround(cfg.duration * cfg.sample_rate));
  std::vector<double> source = cfg.trajectory.source_signal;
  if (source.empty()) source = speech_shaped_bursts(cfg.duration, cfg.sample_rate, cfg.seed);
  source.resize(length, 0.0);

  const std::size_t m = cfg.geometry.total();
  const std::size_t seg_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::llround(cfg.segment_duration * cfg.sample_rate)));
  const std::size_t n_segments = (length + seg_len - 1) / seg_len;
  const std::size_t xfade = stft_cfg.frame_length;  // one-frame crossfade
  const std::size_t half = xfade / 2;

  SpeechRender render;
  render.channels.assign(m, std::vector<double>(length, 0.0));
  render.segment_rtfs.reserve(n_segments);
  render.segment_start_times.reserve(n_segments);

  std::vector<double> delayed;
  for (std::size_t s = 0; s < n_segments; ++s) {
    const std::size_t seg_begin = s * seg_len;
    const std::size_t seg_end = std::min(length, seg_begin + seg_len);
    const double t_center =
        (static_cast<double>(seg_begin) + 0.5 * static_cast<double>(seg_end - seg_begin)) /
        cfg.sample_rate;
    const Position pos = cfg.trajectory.position_at(t_center);
    render.segment_rtfs.push_back(steering_rtf(cfg.geometry, pos, stft_cfg, cfg.speed_of_sound));
    render.segment_start_times.push_back(static_cast<double>(seg_begin) / cfg.sample_rate);

    // Span rendered for this segment, extended by half a crossfade on both
    // sides (clipped at the signal edges).
    const std::size_t span_begin = (s == 0) ? 0 : seg_begin - std::min(seg_begin, half);
    const std::size_t span_end = (s + 1 == n_segments) ? length : std::min(length, seg_end + half);
    const std::size_t span = span_end - span_begin;
    if (span == 0) continue;
    delayed.resize(span);

    std::vector<double> dist(m);
    for (std::size_t mic = 0; mic < m; ++mic)
      dist[mic] = distance(pos, cfg.geometry.position(mic));
    const double d_ref = dist[0];

    for (std::size_t mic = 0; mic < m; ++mic) {
      const double gain = d_ref / dist[mic];
      const double delay = (dist[mic] - d_ref) / cfg.speed_of_sound * cfg.sample_rate;
      fractional_delay_range(source, delay, span_begin, span, delayed.data());
      double* dst = render.channels[mic].data();
      for (std::size_t i = 0; i < span; ++i) {
        const std::size_t nid = span_begin + i;
        // Raised-cosine crossfade: ramps up across the leading boundary and
        // down across the trailing one; adjacent envelopes sum to one.
        double env = 1.0;
        if (s != 0 && nid < seg_begin + half) {
          const double u =
              (static_cast<double>(nid) - (static_cast<double>(seg_begin) - half)) / xfade;
          const double sv = std::sin(0.5 * std::numbers::pi * u);
          env *= sv * sv;
        }
        if (s + 1 != n_segments && nid + half >= seg_end) {
          const double u =
              (static_cast<double>(nid) - (static_cast<double>(seg_end) - half)) / xfade;
          const double cv = std::cos(0.5 * std::numbers::pi * u);
          env *= cv * cv;
        }
        dst[nid] += gain * env * delayed[i];
      }
    }
  }
  return render;
}

MultichannelSignal synthesize_diffuse_noise(const MicGeometry& geometry, double duration,
                                            const SceneConfig& scene_cfg,
                                            const StftConfig& stft_cfg) {
  geometry.validate();
  stft_cfg.validate();
  if (!(duration > 0.0)) throw ConfigError("synthesize_diffuse_noise: duration must be positive");

  const std::size_t m = geometry.total();
  const std::size_t ma = geometry.ma();
  const std::size_t bins = stft_cfg.bins();
  const std::size_t length =
      static_cast<std::size_t>(std::llround(duration * scene_cfg.sample_rate));
  const std::size_t frames =
      length <= stft_cfg.frame_length
          ? 1
          : 1 + (length - stft_cfg.frame_length + stft_cfg.hop - 1) / stft_cfg.hop;

  Spectrogram spec(frames, bins, m);
  const double amp = 0.5 * std::sqrt(static_cast<double>(stft_cfg.frame_length));

  std::vector<Complex> u(m), v(m);
  for (std::size_t k = 0; k < bins; ++k) {
    // Target coherence: spherically isotropic field across the local array,
    // independent external channels.
    ComplexMatrix coherence = ComplexMatrix::identity(m);
    if (scene_cfg.noise_field == NoiseField::SphericallyDiffuse) {
      const double f = stft_cfg.bin_frequency(k);
      for (std::size_t i = 0; i < ma; ++i)
        for (std::size_t j = i + 1; j < ma; ++j) {
          const double d = distance(geometry.position(i), geometry.position(j));
          const double coh =
              sinc(2.0 * std::numbers::pi * f * d / scene_cfg.speed_of_sound);
          coherence(i, j) = coh;
          coherence(j, i) = coh;
        }
    }
    // sinc coherence matrices can be numerically semidefinite.
    for (std::size_t i = 0; i < m; ++i) coherence(i, i) += 1e-6;
    const ComplexMatrix l = hermitian_cholesky(coherence);

    std::mt19937_64 rng = bin_rng(scene_cfg.seed, k);
    std::normal_distribution<double> g(0.0, std::numbers::sqrt2 / 2.0);
    for (std::size_t frame = 0; frame < frames; ++frame) {
      for (std::size_t c = 0; c < m; ++c) u[c] = Complex(g(rng), g(rng));
      for (std::size_t i = 0; i < m; ++i) {
        Complex s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * u[j];
        v[i] = s * amp;
      }
      Complex* dst = spec.bin_data(frame, k);
      for (std::size_t c = 0; c < m; ++c) dst[c] = v[c];
    }
  }

  MultichannelSignal out = synthesize(spec, stft_cfg);
  for (auto& ch : out) ch.resize(length);
  return out;
}

LabeledRecording mix_at_snr(const MultichannelSignal& speech, const MultichannelSignal& noise,
                            double target_db, std::size_t reference_channel,
                            const StftConfig& stft_cfg, double vad_threshold) {
  if (speech.size() != noise.size() || speech.empty())
    throw DimensionMismatch("mix_at_snr: channel counts differ");
  const std::size_t m = speech.size();
  const std::size_t length = speech[0].size();
  for (std::size_t c = 0; c < m; ++c)
    if (speech[c].size() != length || noise[c].size() != length)
      throw DimensionMismatch("mix_at_snr: signal lengths differ");
  if (reference_channel >= m) throw DimensionMismatch("mix_at_snr: bad reference channel");
  if (length < stft_cfg.frame_length)
    throw SignalTooShort("mix_at_snr: signal shorter than one frame");

  double e_speech = 0.0, e_noise = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    e_speech += speech[reference_channel][i] * speech[reference_channel][i];
    e_noise += noise[reference_channel][i] * noise[reference_channel][i];
  }
  if (!(e_speech > 0.0)) throw SilentSpeech("mix_at_snr: silent speech in reference channel");
  if (!(e_noise > 0.0)) throw SilentNoise("mix_at_snr: silent noise in reference channel");

  const double scale = std::sqrt(e_speech / (e_noise * std::pow(10.0, target_db / 10.0)));

  LabeledRecording rec;
  rec.noise_scale = scale;
  rec.speech = speech;
  rec.noise.assign(m, std::vector<double>(length));
  rec.mixture.assign(m, std::vector<double>(length));
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t i = 0; i < length; ++i) {
      rec.noise[c][i] = scale * noise[c][i];
      rec.mixture[c][i] = rec.speech[c][i] + rec.noise[c][i];
    }

  // Oracle VAD: frame speech energy against the peak frame energy.
  const std::size_t frames = 1 + (length - stft_cfg.frame_length) / stft_cfg.hop;
  std::vector<double> energy(frames, 0.0);
  double peak = 0.0;
  for (std::size_t l = 0; l < frames; ++l) {
    double e = 0.0;
    const double* s = speech[reference_channel].data() + l * stft_cfg.hop;
    for (std::size_t i = 0; i < stft_cfg.frame_length; ++i) e += s[i] * s[i];
    energy[l] = e;
    peak = std::max(peak, e);
  }
  rec.vad.resize(frames);
  for (std::size_t l = 0; l < frames; ++l) rec.vad[l] = energy[l] > vad_threshold * peak;
  return rec;
}

LabeledRecording render_scene(const SceneConfig& cfg, const StftConfig& stft_cfg) {
  SpeechRender speech = synthesize_speech(cfg, stft_cfg);
  MultichannelSignal noise =
      synthesize_diffuse_noise(cfg.geometry, cfg.duration, cfg, stft_cfg);
  LabeledRecording rec = mix_at_snr(speech.channels, noise, cfg.target_input_snr_lma_db, 0,
                                    stft_cfg, cfg.vad_threshold);
  rec.oracle_rtf = std::move(speech.segment_rtfs);
  rec.segment_start_times = std::move(speech.segment_start_times);
  return rec;
}

}  // namespace rtflab
