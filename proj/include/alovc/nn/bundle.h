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

// Weight bundle: topology + float32 parameters for every network, the
// boundary between offline training and the streaming engine.
//
// File layout (all integers little-endian):
//
//   "ALOVC1\n"                7-byte magic
//   u32 header_length
//   header                    UTF-8 JSON, compact, keys sorted
//   payload                   float32 tensors, back to back in manifest order
//
// Header schema:
//
//   {"format":"alovc-bundle","version":1,"param_count":N,
//    "models":[{"name":..,"topology":..,"meta":{str:str},
//               "layers":[{"name","kind","in","out","kernel","lookahead",
//                          "hidden","activation"}]}],
//    "tensors":[{"name":"<model>/<layer>/<param>","shape":[..],
//                "offset":<payload byte offset>}]}
//
// Affine weights are row-major and input-major ([in, out], convolutions
// [kernel, in, out] with tap 0 the oldest frame). LSTM gates are packed in
// (input, forget, cell, output) order.

#ifndef ALOVC_NN_BUNDLE_H_
#define ALOVC_NN_BUNDLE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace alovc::nn {

enum class Activation { kNone, kRelu, kTanh, kSoftmax, kSigmoid };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);  // throws BundleError

struct LayerSpec {
  std::string name;
  std::string kind;  // dense | conv1d | lstm | layer_norm | conformer
  int in = 0;
  int out = 0;
  int kernel = 1;
  int lookahead = 0;  // frames; only conv1d may look ahead
  int hidden = 0;     // conformer feed-forward width
  Activation activation = Activation::kNone;

  bool operator==(const LayerSpec&) const = default;
};

struct ModelSpec {
  std::string name;
  std::string topology;
  std::map<std::string, std::string> meta;
  std::vector<LayerSpec> layers;

  int lookahead() const;
  const LayerSpec& layer(std::string_view name) const;  // throws BundleError
  bool operator==(const ModelSpec&) const = default;
};

using Shape = std::vector<int>;

// Parameter tensors a layer owns, as (param suffix, shape) in canonical order.
std::vector<std::pair<std::string, Shape>> expected_tensors(const LayerSpec& spec);

// Throws BundleError(kFormat) when the declaration itself is invalid.
void validate_layer_spec(const LayerSpec& spec);

std::size_t element_count(const Shape& shape);

struct Tensor {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

class Bundle {
 public:
  static constexpr std::string_view kMagic = "ALOVC1\n";

  // Appends a model and zero-initialized tensors for all of its layers
  // (layer-norm gains start at one).
  void add_model(ModelSpec model);

  const std::vector<ModelSpec>& models() const { return models_; }
  bool has_model(std::string_view topology) const;
  const ModelSpec& model(std::string_view topology) const;

  const std::vector<Tensor>& tensors() const { return tensors_; }
  std::span<const float> tensor(std::string_view name) const;
  std::span<float> mutable_tensor(std::string_view name);
  bool has_tensor(std::string_view name) const;

  std::size_t param_count() const;
  std::size_t param_count(std::string_view model_name) const;

  std::string header_text() const;
  std::vector<std::uint8_t> save() const;
  static Bundle load(std::span<const std::uint8_t> bytes);

  void write_file(const std::filesystem::path& path) const;
  static Bundle read_file(const std::filesystem::path& path);

 private:
  const Tensor& find(std::string_view name) const;

  std::vector<ModelSpec> models_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::string tensor_name(std::string_view model, std::string_view layer,
                               std::string_view param) {
  std::string s;
  s.reserve(model.size() + layer.size() + param.size() + 2);
  s.append(model).append("/").append(layer).append("/").append(param);
  return s;
}

// Fills every tensor with deterministic pseudo-random values: weights
// uniform with variance 1/fan_in scaled by `scale`, biases in [-0.1, 0.1],
// layer-norm gains in [0.9, 1.1].
void randomize(Bundle& bundle, std::uint64_t seed, float scale = 1.0f);

// Zeroes every tensor whose name starts with `prefix`.
void zero_tensors(Bundle& bundle, std::string_view prefix);

}  // namespace alovc::nn

#endif  // ALOVC_NN_BUNDLE_H_
