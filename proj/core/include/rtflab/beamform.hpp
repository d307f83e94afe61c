// core/include/rtflab/beamform.hpp

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

#ifndef RTFLAB_BEAMFORM_HPP_
#define RTFLAB_BEAMFORM_HPP_

#include <utility>
#include <vector>

#include "rtflab/complex_matrix.hpp"
#include "rtflab/stft.hpp"

namespace rtflab {

// Distortionless noise-minimizing weights for one bin:
// w = Rn^{-1} h / (h^H Rn^{-1} h). rn must be positive definite; tracked
// covariances receive their diagonal loading upstream.
ComplexVector mvdr_weights(const ComplexMatrix& rn, const ComplexVector& h);

// Z(l, k) = w_k^H y(l, k) with one static weight vector per bin.
Spectrogram apply_beamformer(const std::vector<ComplexVector>& w_per_bin,
                             const Spectrogram& spec);

struct NarrowbandSnr {
  double biased = 0.0;    // from Ry = Rx + Rn
  double unbiased = 0.0;  // from Rx directly; biased - unbiased = 1
};

// Linear (not dB) per-bin output SNRs. Throws ZeroNoisePower when the noise
// quadratic form vanishes.
NarrowbandSnr narrowband_output_snr(const ComplexVector& w, const ComplexMatrix& rx,
                                    const ComplexMatrix& rn);

// Broadband SNR in dB of already-beamformed single-channel speech/noise
// component spectrograms: both are synthesized to the time domain and the
// energies are accumulated over speech-active samples only (the union of the
// sample spans of VAD-active frames). Infinite when the noise component is
// zero there; NoActiveFrames when the VAD never fires.
double broadband_snr_from_components(const Spectrogram& speech_out, const Spectrogram& noise_out,
                                     const std::vector<bool>& vad, const StftConfig& cfg);

// Shadow-filter broadband output SNR: applies the same per-bin weights
// separately to the speech and noise component spectrograms, then measures
// as broadband_snr_from_components.
double shadow_filter_broadband_snr(const std::vector<ComplexVector>& w_per_bin,
                                   const Spectrogram& speech, const Spectrogram& noise,
                                   const std::vector<bool>& vad, const StftConfig& cfg);

}  // namespace rtflab

#endif  // RTFLAB_BEAMFORM_HPP_
