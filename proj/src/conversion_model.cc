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

#include "alovc/conversion_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alovc/errors.h"

namespace alovc {
namespace {

constexpr const char* kLayerOrder[] = {"in_proj",  "lstm1",    "lstm2",
                                       "bscc_head", "f0_head", "vuf_head",
                                       "postnet1", "postnet2", "postnet3"};

int meta_int(const nn::ModelSpec& spec, const std::string& key) {
  const auto it = spec.meta.find(key);
  if (it == spec.meta.end()) {
    throw BundleError(BundleError::Kind::kTopology,
                      "conversion model header lacks '" + key + "'");
  }
  try {
    return std::stoi(it->second);
  } catch (const std::logic_error&) {
    throw BundleError(BundleError::Kind::kTopology, "conversion meta '" + key + "' is not an integer");
  }
}

const nn::ModelSpec& checked_spec(const nn::Bundle& bundle) {
  if (!bundle.has_model("conversion")) {
    throw BundleError(BundleError::Kind::kTopology, "bundle has no 'conversion' model");
  }
  const auto& spec = bundle.model("conversion");
  if (spec.layers.size() != std::size(kLayerOrder)) {
    throw BundleError(BundleError::Kind::kTopology, "conversion model must have 9 layers");
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].name != kLayerOrder[i]) {
      throw BundleError(BundleError::Kind::kTopology,
                        "conversion layer " + std::to_string(i) + " should be '" +
                            kLayerOrder[i] + "', found '" + spec.layers[i].name + "'");
    }
  }
  if (spec.lookahead() != 0) {
    throw BundleError(BundleError::Kind::kTopology, "conversion model must be causal");
  }
  return spec;
}

void expect(bool ok, const char* what) {
  if (!ok) throw BundleError(BundleError::Kind::kTopology, std::string("conversion: ") + what);
}

}  // namespace

std::vector<double> positional_encoding(std::size_t pos, int d) {
  if (d <= 0 || d % 2 != 0) throw std::invalid_argument("encoding dimension must be even");
  std::vector<double> v(static_cast<std::size_t>(d));
  const double p = static_cast<double>(pos);
  for (int i = 0; i < d / 2; ++i) {
    const double angle = p / std::pow(10000.0, 2.0 * i / d);
    v[2 * i] = std::sin(angle);
    v[2 * i + 1] = std::cos(angle);
  }
  return v;
}

PositionalEncoder::PositionalEncoder(int d) : d_(d) {
  if (d <= 0 || d % 2 != 0) throw std::invalid_argument("encoding dimension must be even");
}

std::vector<double> PositionalEncoder::step() { return positional_encoding(++count_, d_); }

ConversionModel::ConversionModel(const nn::Bundle& bundle, VufMode mode) : mode_(mode) {
  const auto& spec = checked_spec(bundle);
  ppg_dim_ = meta_int(spec, "ppg_dim");
  pe_dim_ = meta_int(spec, "pe_dim");
  speaker_dim_ = meta_int(spec, "speaker_dim");
  if (pe_dim_ <= 0 || pe_dim_ % 2 != 0) {
    throw BundleError(BundleError::Kind::kTopology, "pe_dim must be even and positive");
  }
  trunk_ = nn::Sequential(spec, bundle, 0, 3);
  bscc_head_ = nn::Sequential(spec, bundle, 3, 4);
  f0_head_ = nn::Sequential(spec, bundle, 4, 5);
  vuf_head_ = nn::Sequential(spec, bundle, 5, 6);
  postnet_ = nn::Sequential(spec, bundle, 6, 9);
  expect(trunk_.in_width() == ppg_dim_ + pe_dim_ + speaker_dim_ + 3,
         "input width != ppg + pe + speaker + 3");
  const int l = trunk_.out_width();
  expect(bscc_head_.in_width() == l && f0_head_.in_width() == l && vuf_head_.in_width() == l,
         "heads must read the trunk output");
  expect(bscc_head_.out_width() == bark::kNumBands, "bscc head must emit 18 values");
  expect(f0_head_.out_width() == 1 && vuf_head_.out_width() == 1, "f0/vuf heads must be scalar");
  expect(postnet_.in_width() == bark::kNumBands && postnet_.out_width() == bark::kNumBands,
         "postnet must map 18 -> 18");
}

ConversionModel::State ConversionModel::make_state(std::span<const double> speaker) const {
  if (speaker.size() != static_cast<std::size_t>(speaker_dim_)) {
    throw ProfileError(ProfileError::Reason::kMismatch,
                       "speaker embedding has " + std::to_string(speaker.size()) +
                           " dims, bundle expects " + std::to_string(speaker_dim_));
  }
  State s;
  s.pe = PositionalEncoder(pe_dim_);
  s.speaker.assign(speaker.begin(), speaker.end());
  s.trunk = trunk_.make_state();
  s.bscc_head = bscc_head_.make_state();
  s.f0_head = f0_head_.make_state();
  s.vuf_head = vuf_head_.make_state();
  s.postnet = postnet_.make_state();
  return s;
}

VocoderFrame ConversionModel::step(State& state, std::span<const float> ppg,
                                   const PitchFeatures& pitch) const {
  if (ppg.size() != static_cast<std::size_t>(ppg_dim_)) {
    throw std::invalid_argument("conversion: ppg width " + std::to_string(ppg.size()) +
                                " != " + std::to_string(ppg_dim_));
  }
  std::vector<float> x;
  x.reserve(static_cast<std::size_t>(trunk_.in_width()));
  x.insert(x.end(), ppg.begin(), ppg.end());
  for (double v : state.pe.step()) x.push_back(static_cast<float>(v));
  x.insert(x.end(), state.speaker.begin(), state.speaker.end());
  x.push_back(pitch.vuf ? 1.0f : 0.0f);
  x.push_back(pitch.variance[0]);
  x.push_back(pitch.variance[1]);

  const auto h = *trunk_.step(state.trunk, x);
  const auto bscc = *bscc_head_.step(state.bscc_head, h);
  const auto f0_res = *f0_head_.step(state.f0_head, h);
  const auto vuf_prob = *vuf_head_.step(state.vuf_head, h);
  const auto post = *postnet_.step(state.postnet, bscc);

  VocoderFrame out;
  for (int k = 0; k < bark::kNumBands; ++k) {
    out.bscc[k] = static_cast<double>(bscc[k] + post[k]);
  }
  bool voiced;
  if (mode_ == VufMode::kStrict) {
    voiced = pitch.vuf != 0 && pitch.f0 > 0.0;
    out.correlation = pitch.correlation;
  } else {
    voiced = vuf_prob[0] > 0.5f;
    out.correlation = vuf_prob[0];
  }
  if (voiced) {
    const double base = pitch.f0 > 0.0 ? pitch.f0 : 100.0;
    out.f0 = std::clamp(std::exp(std::log(base) + static_cast<double>(f0_res[0])), 40.0, 500.0);
  }
  return out;
}

}  // namespace alovc
