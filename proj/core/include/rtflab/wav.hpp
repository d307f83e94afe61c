// core/include/rtflab/wav.hpp

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

#ifndef RTFLAB_WAV_HPP_
#define RTFLAB_WAV_HPP_

#include <string>
#include <vector>

#include "rtflab/stft.hpp"

namespace rtflab {

struct AudioBuffer {
  double sample_rate = 0.0;
  MultichannelSignal channels;

  std::size_t num_samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

enum class WavFormat { Pcm16, Float32 };

// Little-endian RIFF/WAVE: PCM 16-bit (format 1) and IEEE float 32-bit
// (format 3), mono or multichannel. Anything else raises IoError.
AudioBuffer read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioBuffer& buffer,
               WavFormat format = WavFormat::Float32);

}  // namespace rtflab

#endif  // RTFLAB_WAV_HPP_
