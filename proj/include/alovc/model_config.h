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

// Network widths for the three streaming models, plus bundle construction.
//
// `toy()` is the desk-scale configuration used by tests and the default CLI
// bundle. `full()` is sized so the acoustic and conversion models land near
// 2.7 M and 5.6 M parameters respectively (reported by `alovc inspect`).

#ifndef ALOVC_MODEL_CONFIG_H_
#define ALOVC_MODEL_CONFIG_H_

#include <cstdint>

#include "alovc/nn/bundle.h"

namespace alovc {

struct AcousticConfig {
  int feature_dim = 39;
  int channels = 32;       // conv and conformer width
  int causal_kernel = 3;   // the ReLU causal conv after the input conv
  int blocks = 4;          // conformer blocks
  int ff = 64;             // conformer feed-forward width
  int dw_kernel = 7;       // conformer depthwise conv kernel
  int lstm_hidden = 64;
  int ppg_dim = 64;
  int num_phones = 8;
};

struct PredictorConfig {
  int channels = 16;
  int kernel = 3;
  int lstm_hidden = 16;
};

struct ConversionConfig {
  int ppg_dim = 64;
  int pe_dim = 16;
  int speaker_dim = 32;
  int hidden = 64;  // input projection width
  int lstm_hidden = 64;
  int postnet_channels = 32;
  int postnet_kernel = 5;

  int input_dim() const { return ppg_dim + pe_dim + speaker_dim + 3; }
};

struct ModelConfig {
  AcousticConfig acoustic;
  PredictorConfig predictor;
  ConversionConfig conversion;

  static ModelConfig toy();
  static ModelConfig full();
  // Multiplies every hidden width by `factor` (feature, phone, BSCC and
  // speaker dimensions stay fixed).
  ModelConfig widened(int factor) const;
};

nn::ModelSpec acoustic_spec(const AcousticConfig& cfg);
nn::ModelSpec predictor_spec(const PredictorConfig& cfg);
nn::ModelSpec conversion_spec(const ConversionConfig& cfg);

// Bundle with all three models; tensors zero (layer-norm gains one).
nn::Bundle make_bundle(const ModelConfig& cfg);
nn::Bundle make_random_bundle(const ModelConfig& cfg, std::uint64_t seed);

}  // namespace alovc

#endif  // ALOVC_MODEL_CONFIG_H_
