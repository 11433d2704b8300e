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

#include "alovc/acoustic_model.h"

#include <string>

#include "alovc/errors.h"

namespace alovc {
namespace {

const nn::ModelSpec& checked_spec(const nn::Bundle& bundle) {
  if (!bundle.has_model("acoustic")) {
    throw BundleError(BundleError::Kind::kTopology, "bundle has no 'acoustic' model");
  }
  const auto& spec = bundle.model("acoustic");
  if (spec.layers.size() < 2) {
    throw BundleError(BundleError::Kind::kTopology, "acoustic model has too few layers");
  }
  const auto& head = spec.layers.back();
  if (head.kind != "dense" || head.activation != nn::Activation::kSoftmax) {
    throw BundleError(BundleError::Kind::kTopology,
                      "acoustic model must end in a softmax dense head");
  }
  if (spec.layers.front().in != kFeatureDim) {
    throw BundleError(BundleError::Kind::kTopology,
                      "acoustic model input width must be " + std::to_string(kFeatureDim));
  }
  if (head.lookahead != 0) {
    throw BundleError(BundleError::Kind::kTopology, "phone head cannot look ahead");
  }
  if (spec.lookahead() != AcousticModel::kLookaheadFrames) {
    throw BundleError(BundleError::Kind::kTopology,
                      "acoustic model declares " + std::to_string(spec.lookahead()) +
                          " lookahead frames, expected 1");
  }
  return spec;
}

}  // namespace

AcousticModel::AcousticModel(const nn::Bundle& bundle)
    : spec_(checked_spec(bundle)),
      trunk_(spec_, bundle, 0, spec_.layers.size() - 1),
      head_(spec_, bundle, spec_.layers.size() - 1, spec_.layers.size()) {
  if (trunk_.out_width() != head_.in_width()) {
    throw BundleError(BundleError::Kind::kTopology, "phone head width mismatch");
  }
}

AcousticModel::State AcousticModel::make_state() const {
  return State{trunk_.make_state(), head_.make_state()};
}

PpgOutput AcousticModel::finish(State& state, std::vector<float> ppg) const {
  PpgOutput out;
  out.posterior = *head_.step(state.head, ppg);
  out.ppg = std::move(ppg);
  return out;
}

std::optional<PpgOutput> AcousticModel::step(State& state,
                                             std::span<const float> features) const {
  auto ppg = trunk_.step(state.trunk, features);
  if (!ppg) return std::nullopt;
  return finish(state, std::move(*ppg));
}

std::vector<PpgOutput> AcousticModel::flush(State& state) const {
  std::vector<PpgOutput> out;
  for (auto& ppg : trunk_.flush(state.trunk)) out.push_back(finish(state, std::move(ppg)));
  return out;
}

}  // namespace alovc
