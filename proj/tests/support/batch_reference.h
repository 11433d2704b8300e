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

// Whole-sequence reference evaluation of bundle models, written separately
// from the streaming runtime: every layer sees the full input sequence at
// once, convolutions zero-pad both ends, accumulation is in double.

#ifndef ALOVC_TESTS_SUPPORT_BATCH_REFERENCE_H_
#define ALOVC_TESTS_SUPPORT_BATCH_REFERENCE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "alovc/nn/bundle.h"

namespace alovc::testing {

using Seq = std::vector<std::vector<float>>;  // [time][feature]

Seq batch_layer(const nn::LayerSpec& spec, const nn::Bundle& bundle,
                std::string_view model, const Seq& x);

// Layers [first, last) of `model`.
Seq batch_model(const nn::ModelSpec& model, const nn::Bundle& bundle, const Seq& x,
                std::size_t first, std::size_t last);
inline Seq batch_model(const nn::ModelSpec& model, const nn::Bundle& bundle, const Seq& x) {
  return batch_model(model, bundle, x, 0, model.layers.size());
}

Seq random_sequence(std::size_t frames, int width, std::uint64_t seed, float scale = 1.0f);

// Largest absolute elementwise difference; infinity on shape mismatch.
double max_abs_diff(const Seq& a, const Seq& b);

}  // namespace alovc::testing

#endif  // ALOVC_TESTS_SUPPORT_BATCH_REFERENCE_H_
