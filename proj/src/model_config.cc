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

#include "alovc/model_config.h"

#include <string>

namespace alovc {
namespace {

using nn::Activation;
using nn::LayerSpec;
using nn::ModelSpec;

LayerSpec layer(std::string name, std::string kind, int in, int out, int kernel = 1,
                int lookahead = 0, Activation act = Activation::kNone, int hidden = 0) {
  LayerSpec l;
  l.name = std::move(name);
  l.kind = std::move(kind);
  l.in = in;
  l.out = out;
  l.kernel = kernel;
  l.lookahead = lookahead;
  l.activation = act;
  l.hidden = hidden;
  return l;
}

}  // namespace

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::full() {
  ModelConfig c;
  c.acoustic.channels = 144;
  c.acoustic.ff = 288;
  c.acoustic.dw_kernel = 15;
  c.acoustic.lstm_hidden = 192;
  c.acoustic.ppg_dim = 512;
  c.acoustic.num_phones = 72;
  c.predictor.channels = 64;
  c.predictor.kernel = 5;
  c.predictor.lstm_hidden = 64;
  c.conversion.ppg_dim = 512;
  c.conversion.pe_dim = 128;
  c.conversion.speaker_dim = 256;
  c.conversion.hidden = 512;
  c.conversion.lstm_hidden = 544;
  c.conversion.postnet_channels = 256;
  c.conversion.postnet_kernel = 5;
  return c;
}

ModelConfig ModelConfig::widened(int factor) const {
  ModelConfig c = *this;
  c.acoustic.channels *= factor;
  c.acoustic.ff *= factor;
  c.acoustic.lstm_hidden *= factor;
  c.acoustic.ppg_dim *= factor;
  c.predictor.channels *= factor;
  c.predictor.lstm_hidden *= factor;
  c.conversion.ppg_dim = c.acoustic.ppg_dim;
  c.conversion.hidden *= factor;
  c.conversion.lstm_hidden *= factor;
  c.conversion.postnet_channels *= factor;
  return c;
}

ModelSpec acoustic_spec(const AcousticConfig& cfg) {
  ModelSpec m;
  m.name = "acoustic";
  m.topology = "acoustic";
  m.meta = {
      {"conformer", "ff/2 + conv module + ff/2 + layer_norm, no self-attention"},
      {"layer_norm", "framewise, (x-mean)/sqrt(max(var,1e-5))"},
      {"lookahead_layer", "conv_in"},
      {"lstm_gate_order", "input,forget,cell,output"},
      {"ppg_layer", "lstm2"},
  };
  const int c = cfg.channels;
  m.layers.push_back(layer("conv_in", "conv1d", cfg.feature_dim, c, 3, 1));
  m.layers.push_back(layer("conv_causal", "conv1d", c, c, cfg.causal_kernel, 0,
                           Activation::kRelu));
  for (int b = 0; b < cfg.blocks; ++b) {
    m.layers.push_back(layer("conformer" + std::to_string(b + 1), "conformer", c, c,
                             cfg.dw_kernel, 0, Activation::kNone, cfg.ff));
  }
  m.layers.push_back(layer("lstm1", "lstm", c, cfg.lstm_hidden));
  m.layers.push_back(layer("lstm2", "lstm", cfg.lstm_hidden, cfg.ppg_dim));
  m.layers.push_back(layer("phone_head", "dense", cfg.ppg_dim, cfg.num_phones, 1, 0,
                           Activation::kSoftmax));
  return m;
}

ModelSpec predictor_spec(const PredictorConfig& cfg) {
  ModelSpec m;
  m.name = "pitch_predictor";
  m.topology = "pitch_predictor";
  m.meta = {
      {"input", "log_f0_trg if voiced else 0, vuf"},
      {"output", "log_f0 residual, vuf logit (sigmoid > 0.5 voiced)"},
      {"lstm_gate_order", "input,forget,cell,output"},
  };
  int in = 2;
  for (int i = 1; i <= 4; ++i) {
    m.layers.push_back(layer("conv" + std::to_string(i), "conv1d", in, cfg.channels,
                             cfg.kernel, 0, Activation::kRelu));
    in = cfg.channels;
  }
  m.layers.push_back(layer("lstm", "lstm", in, cfg.lstm_hidden));
  m.layers.push_back(layer("proj", "dense", cfg.lstm_hidden, 2));
  return m;
}

ModelSpec conversion_spec(const ConversionConfig& cfg) {
  ModelSpec m;
  m.name = "conversion";
  m.topology = "conversion";
  m.meta = {
      {"ppg_dim", std::to_string(cfg.ppg_dim)},
      {"pe_dim", std::to_string(cfg.pe_dim)},
      {"speaker_dim", std::to_string(cfg.speaker_dim)},
      {"wiring", "concat(ppg, positional_encoding, speaker, vuf, variance[2])"},
      {"positions", "1-based, reset per stream"},
      {"f0_head", "log residual: f0 = exp(log f0_in + head)"},
      {"postnet", "residual, bscc only"},
      {"lstm_gate_order", "input,forget,cell,output"},
  };
  const int l = cfg.lstm_hidden;
  const int pc = cfg.postnet_channels;
  const int pk = cfg.postnet_kernel;
  m.layers.push_back(layer("in_proj", "dense", cfg.input_dim(), cfg.hidden, 1, 0,
                           Activation::kRelu));
  m.layers.push_back(layer("lstm1", "lstm", cfg.hidden, l));
  m.layers.push_back(layer("lstm2", "lstm", l, l));
  m.layers.push_back(layer("bscc_head", "dense", l, 18));
  m.layers.push_back(layer("f0_head", "dense", l, 1));
  m.layers.push_back(layer("vuf_head", "dense", l, 1, 1, 0, Activation::kSigmoid));
  m.layers.push_back(layer("postnet1", "conv1d", 18, pc, pk, 0, Activation::kTanh));
  m.layers.push_back(layer("postnet2", "conv1d", pc, pc, pk, 0, Activation::kTanh));
  m.layers.push_back(layer("postnet3", "conv1d", pc, 18, pk, 0));
  return m;
}

nn::Bundle make_bundle(const ModelConfig& cfg) {
  nn::Bundle b;
  b.add_model(acoustic_spec(cfg.acoustic));
  b.add_model(predictor_spec(cfg.predictor));
  b.add_model(conversion_spec(cfg.conversion));
  return b;
}

nn::Bundle make_random_bundle(const ModelConfig& cfg, std::uint64_t seed) {
  nn::Bundle b = make_bundle(cfg);
  nn::randomize(b, seed);
  return b;
}

}  // namespace alovc
