// core/src/wav.cpp

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

#include "rtflab/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace rtflab {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

// Serialization assumes a little-endian host, which covers every platform
// this project targets.
template <typename T>
void write_le(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_wav: cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("read_wav: not a RIFF/WAVE file: " + path);

  std::uint16_t format = 0, num_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = bytes.data() + pos;
    std::uint32_t size = read_le<std::uint32_t>(bytes.data() + pos + 4);
    const char* body = bytes.data() + pos + 8;
    if (pos + 8 + size > bytes.size()) throw IoError("read_wav: truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw IoError("read_wav: malformed fmt chunk in " + path);
      format = read_le<std::uint16_t>(body);
      num_channels = read_le<std::uint16_t>(body + 2);
      rate = read_le<std::uint32_t>(body + 4);
      bits = read_le<std::uint16_t>(body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = body;
      data_size = size;
    }
    pos += 8 + size + (size % 2);  // chunks are word-aligned
  }
  if (num_channels == 0 || rate == 0) throw IoError("read_wav: missing fmt chunk in " + path);
  if (!data) throw IoError("read_wav: missing data chunk in " + path);

  AudioBuffer buf;
  buf.sample_rate = rate;
  if (format == kFormatPcm && bits == 16) {
    const std::size_t total = data_size / 2;
    const std::size_t frames = total / num_channels;
    buf.channels.assign(num_channels, std::vector<double>(frames));
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t ch = 0; ch < num_channels; ++ch) {
        std::int16_t v = read_le<std::int16_t>(data + 2 * (i * num_channels + ch));
        buf.channels[ch][i] = static_cast<double>(v) / 32768.0;
      }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t total = data_size / 4;
    const std::size_t frames = total / num_channels;
    buf.channels.assign(num_channels, std::vector<double>(frames));
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t ch = 0; ch < num_channels; ++ch)
        buf.channels[ch][i] = read_le<float>(data + 4 * (i * num_channels + ch));
  } else {
    throw IoError("read_wav: unsupported format " + std::to_string(format) + "/" +
                  std::to_string(bits) + " bit in " + path);
  }
  return buf;
}

void write_wav(const std::string& path, const AudioBuffer& buffer, WavFormat format) {
  if (buffer.channels.empty()) throw IoError("write_wav: no channels");
  const std::size_t frames = buffer.num_samples();
  for (const auto& ch : buffer.channels)
    if (ch.size() != frames) throw DimensionMismatch("write_wav: channel lengths differ");

  const std::uint16_t num_channels = static_cast<std::uint16_t>(buffer.channels.size());
  const std::uint16_t bits = (format == WavFormat::Pcm16) ? 16 : 32;
  const std::uint16_t fmt_code = (format == WavFormat::Pcm16) ? kFormatPcm : kFormatFloat;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(buffer.sample_rate));
  const std::uint32_t block_align = num_channels * bits / 8;
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * block_align);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_wav: cannot open " + path);

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, fmt_code);
  write_le<std::uint16_t>(out, num_channels);
  write_le<std::uint32_t>(out, rate);
  write_le<std::uint32_t>(out, rate * block_align);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(block_align));
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  if (format == WavFormat::Pcm16) {
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t ch = 0; ch < num_channels; ++ch) {
        double v = std::clamp(buffer.channels[ch][i], -1.0, 1.0 - 1.0 / 32768.0);
        write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lround(v * 32768.0)));
      }
  } else {
    for (std::size_t i = 0; i < frames; ++i)
      for (std::size_t ch = 0; ch < num_channels; ++ch)
        write_le<float>(out, static_cast<float>(buffer.channels[ch][i]));
  }
  if (!out) throw IoError("write_wav: write failed for " + path);
}

}  // namespace rtflab
