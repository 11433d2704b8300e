// Copyright 2026 The alovc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// 16-bit PCM mono WAV reading and writing. Samples are floats in [-1, 1).

#ifndef ALOVC_AUDIO_IO_H_
#define ALOVC_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace alovc {

inline constexpr int kSampleRate = 16000;

struct Audio {
  int sample_rate = kSampleRate;
  std::vector<float> samples;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Throws InputError for anything other than 16-bit PCM, mono, 16 kHz.
Audio decode_wav(std::span<const std::uint8_t> bytes);
Audio read_wav(const std::filesystem::path& path);

// Samples are clamped to the 16-bit range.
std::vector<std::uint8_t> encode_wav(std::span<const float> samples,
                                     int sample_rate = kSampleRate);
void write_wav(const std::filesystem::path& path,
               std::span<const float> samples, int sample_rate = kSampleRate);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace alovc

#endif  // ALOVC_AUDIO_IO_H_
