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

// PPG extractor: lookahead conv -> causal conv (ReLU) -> attention-free
// Conformer blocks -> two uni-directional LSTMs -> softmax phone head.
//
// The PPG handed downstream is the second LSTM's hidden state; the softmax
// posterior is exposed for inspection and training parity only.

#ifndef ALOVC_ACOUSTIC_MODEL_H_
#define ALOVC_ACOUSTIC_MODEL_H_

#include <optional>
#include <span>
#include <vector>

#include "alovc/frontend.h"
#include "alovc/nn/layers.h"

namespace alovc {

struct PpgOutput {
  std::vector<float> ppg;
  std::vector<float> posterior;
};

class AcousticModel {
 public:
  static constexpr int kLookaheadFrames = 1;

  struct State {
    nn::Sequential::State trunk;
    nn::Sequential::State head;
  };

  // Throws BundleError(kTopology) unless the bundle holds an "acoustic"
  // model ending in a softmax dense head with exactly one frame of declared
  // lookahead and 39-D input.
  explicit AcousticModel(const nn::Bundle& bundle);

  State make_state() const;

  // Emits the output for frame t-1 once frame t has been consumed.
  std::optional<PpgOutput> step(State& state, std::span<const float> features) const;
  std::optional<PpgOutput> step(State& state, const AcousticFrame& frame) const {
    return step(state, frame.features);
  }
  // Drains the final frame (future treated as zeros).
  std::vector<PpgOutput> flush(State& state) const;

  int lookahead() const { return trunk_.lookahead(); }
  int ppg_dim() const { return trunk_.out_width(); }
  int num_phones() const { return head_.out_width(); }
  const nn::ModelSpec& spec() const { return spec_; }

 private:
  PpgOutput finish(State& state, std::vector<float> ppg) const;

  nn::ModelSpec spec_;
  nn::Sequential trunk_;
  nn::Sequential head_;
};

}  // namespace alovc

#endif  // ALOVC_ACOUSTIC_MODEL_H_
