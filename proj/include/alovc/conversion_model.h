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

// Conversion network: (PPG, positional encoding, speaker embedding, VUF,
// pitch variance) -> dense -> 2 LSTMs -> BSCC / F0 / VUF heads, with a
// residual causal-conv PostNet on the BSCC track.

#ifndef ALOVC_CONVERSION_MODEL_H_
#define ALOVC_CONVERSION_MODEL_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "alovc/bark.h"
#include "alovc/nn/layers.h"

namespace alovc {

// Entry 2i = sin(pos / 10000^(2i/d)), entry 2i+1 = cos(same), positions
// 1-based. Throws std::invalid_argument for odd or non-positive d.
std::vector<double> positional_encoding(std::size_t pos, int d);

class PositionalEncoder {
 public:
  explicit PositionalEncoder(int d);
  // Encodes position L+1, then increments L.
  std::vector<double> step();
  std::size_t frames_encoded() const { return count_; }
  int dim() const { return d_; }
  void reset() { count_ = 0; }

 private:
  int d_;
  std::size_t count_ = 0;
};

struct VocoderFrame {
  std::array<double, bark::kNumBands> bscc{};
  double f0 = 0.0;           // Hz, 0 when unvoiced
  double correlation = 0.0;  // pitch correlation, or voicing probability
};

// How the frame-level voicing decision is made.
enum class VufMode {
  kStrict,     // source VUF and correlation pass through unchanged
  kPredicted,  // VUF from the conversion head (> 0.5), correlation = its value
};

struct PitchFeatures {
  double f0 = 0.0;  // converted target F0 (Hz, 0 when unvoiced)
  int vuf = 0;
  double correlation = 0.0;
  std::array<float, 2> variance{};
};

class ConversionModel {
 public:
  struct State {
    PositionalEncoder pe{2};
    std::vector<float> speaker;
    nn::Sequential::State trunk, bscc_head, f0_head, vuf_head, postnet;
  };

  // Throws BundleError(kTopology) when the "conversion" model is missing or
  // wired differently than its header declares.
  explicit ConversionModel(const nn::Bundle& bundle, VufMode mode = VufMode::kStrict);

  // Throws ProfileError(kMismatch) when the embedding width differs from the
  // bundle's declared speaker dimension.
  State make_state(std::span<const double> speaker) const;

  VocoderFrame step(State& state, std::span<const float> ppg,
                    const PitchFeatures& pitch) const;

  int ppg_dim() const { return ppg_dim_; }
  int pe_dim() const { return pe_dim_; }
  int speaker_dim() const { return speaker_dim_; }
  int lookahead() const { return 0; }
  VufMode mode() const { return mode_; }

 private:
  VufMode mode_;
  int ppg_dim_ = 0;
  int pe_dim_ = 0;
  int speaker_dim_ = 0;
  nn::Sequential trunk_, bscc_head_, f0_head_, vuf_head_, postnet_;
};

}  // namespace alovc

#endif  // ALOVC_CONVERSION_MODEL_H_
