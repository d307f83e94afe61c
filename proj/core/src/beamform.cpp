// core/src/beamform.cpp

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

#include "rtflab/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtflab/linalg.hpp"

namespace rtflab {

ComplexVector mvdr_weights(const ComplexMatrix& rn, const ComplexVector& h) {
  if (rn.rows() != h.size()) throw DimensionMismatch("mvdr_weights: dimensions differ");
  const ComplexMatrix l = hermitian_cholesky(rn);
  ComplexVector t = cholesky_solve(l, h);
  const double denom = dot(h, t).real();
  if (!(denom > 0.0) || !std::isfinite(denom))
    throw NotPositiveDefinite("mvdr_weights: degenerate quadratic form h^H Rn^{-1} h");
  for (std::size_t i = 0; i < t.size(); ++i) t[i] /= denom;
  return t;
}

Spectrogram apply_beamformer(const std::vector<ComplexVector>& w_per_bin,
                             const Spectrogram& spec) {
  if (w_per_bin.size() != spec.bins())
    throw DimensionMismatch("apply_beamformer: weight count differs from bins");
  const std::size_t m = spec.channels();
  for (const ComplexVector& w : w_per_bin)
    if (w.size() != m) throw DimensionMismatch("apply_beamformer: weight length differs");

  Spectrogram out(spec.frames(), spec.bins(), 1);
  for (std::size_t lidx = 0; lidx < spec.frames(); ++lidx) {
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const Complex* y = spec.bin_data(lidx, k);
      const ComplexVector& w = w_per_bin[k];
      Complex z = 0.0;
      for (std::size_t c = 0; c < m; ++c) z += std::conj(w[c]) * y[c];
      out.at(lidx, k, 0) = z;
    }
  }
  return out;
}

NarrowbandSnr narrowband_output_snr(const ComplexVector& w, const ComplexMatrix& rx,
                                    const ComplexMatrix& rn) {
  if (rx.rows() != w.size() || rn.rows() != w.size())
    throw DimensionMismatch("narrowband_output_snr: dimensions differ");
  const double noise_power = quadratic_form(w, rn);
  if (!(noise_power > 0.0))
    throw ZeroNoisePower("narrowband_output_snr: w^H Rn w is not positive");
  NarrowbandSnr snr;
  snr.unbiased = quadratic_form(w, rx) / noise_power;
  const ComplexMatrix ry = rx + rn;
  snr.biased = quadratic_form(w, ry) / noise_power;
  return snr;
}

double broadband_snr_from_components(const Spectrogram& speech_out, const Spectrogram& noise_out,
                                     const std::vector<bool>& vad, const StftConfig& cfg) {
  if (speech_out.frames() != noise_out.frames() || speech_out.bins() != noise_out.bins())
    throw DimensionMismatch("broadband_snr_from_components: component shapes differ");
  if (vad.size() != speech_out.frames())
    throw DimensionMismatch("broadband_snr_from_components: vad length mismatch");

  bool any_active = false;
  for (bool v : vad) any_active |= v;
  if (!any_active) throw NoActiveFrames("broadband_snr_from_components: VAD never active");

  MultichannelSignal s = synthesize(speech_out, cfg);
  MultichannelSignal n = synthesize(noise_out, cfg);
  const std::size_t len = s[0].size();

  std::vector<bool> active_sample(len, false);
  for (std::size_t l = 0; l < vad.size(); ++l) {
    if (!vad[l]) continue;
    const std::size_t start = l * cfg.hop;
    const std::size_t stop = std::min(len, start + cfg.frame_length);
    for (std::size_t i = start; i < stop; ++i) active_sample[i] = true;
  }

  double es = 0.0, en = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (!active_sample[i]) continue;
    es += s[0][i] * s[0][i];
    en += n[0][i] * n[0][i];
  }
  if (en <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(es / en);
}

double shadow_filter_broadband_snr(const std::vector<ComplexVector>& w_per_bin,
                                   const Spectrogram& speech, const Spectrogram& noise,
                                   const std::vector<bool>& vad, const StftConfig& cfg) {
  Spectrogram s = apply_beamformer(w_per_bin, speech);
  Spectrogram n = apply_beamformer(w_per_bin, noise);
  return broadband_snr_from_components(s, n, vad, cfg);
}

}  // namespace rtflab
