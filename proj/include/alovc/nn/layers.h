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

// Streaming-steppable network layers. Layers are immutable once built from a
// bundle; all per-stream memory lives in a LayerState owned by the caller.

#ifndef ALOVC_NN_LAYERS_H_
#define ALOVC_NN_LAYERS_H_

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "alovc/nn/bundle.h"

namespace alovc::nn {

inline constexpr float kLayerNormEpsilon = 1e-5f;

void apply_activation(Activation act, std::span<float> v);

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

// (x - mean) / sqrt(max(var, eps)) * gain + bias over this frame only.
void framewise_layer_norm(std::span<const float> x, std::span<const float> gain,
                          std::span<const float> bias, std::span<float> y);

// y = activation(x * W + b).
void dense_forward(std::span<const float> x, std::span<const float> w,
                   std::span<const float> b, Activation act, std::span<float> y);

struct LayerState {
  // conv1d / depthwise conv: the `kernel` most recent inputs, oldest first.
  std::vector<float> window;
  std::size_t received = 0;
  bool flushed = false;
  // lstm
  std::vector<float> h;
  std::vector<float> c;
  std::vector<float> scratch;
  // conformer: [0] depthwise-conv window
  std::vector<LayerState> children;
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  int lookahead() const { return spec_.lookahead; }
  int in_width() const { return spec_.in; }
  int out_width() const { return spec_.out; }

  virtual LayerState make_state() const { return {}; }

  // Consumes one frame. Returns false while a lookahead layer is still
  // waiting for future frames; otherwise writes the next output to `y`.
  // Throws std::invalid_argument on a width mismatch.
  bool step(LayerState& state, std::span<const float> x, std::vector<float>& y) const;

  // Emits the outputs still owed for the final `lookahead` inputs, treating
  // the future as zeros. Throws std::logic_error when called twice.
  std::vector<std::vector<float>> flush(LayerState& state) const;

 protected:
  virtual bool do_step(LayerState& state, std::span<const float> x,
                       std::vector<float>& y) const = 0;

 private:
  LayerSpec spec_;
};

// Builds the layer `spec` of model `model_name`, copying its tensors.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Bundle& bundle,
                                  std::string_view model_name);

// A chain of layers whose widths connect end to end.
class Sequential {
 public:
  struct State {
    std::vector<LayerState> layers;
    bool flushed = false;
  };

  Sequential() = default;
  // Layers [first, last) of `model`. Throws BundleError(kTopology) when
  // adjacent widths do not connect.
  Sequential(const ModelSpec& model, const Bundle& bundle, std::size_t first,
             std::size_t last);
  Sequential(const ModelSpec& model, const Bundle& bundle)
      : Sequential(model, bundle, 0, model.layers.size()) {}

  State make_state() const;
  std::optional<std::vector<float>> step(State& state, std::span<const float> x) const;
  std::vector<std::vector<float>> flush(State& state) const;

  int lookahead() const;
  int in_width() const;
  int out_width() const;
  std::size_t size() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

 private:
  std::vector<std::shared_ptr<const Layer>> layers_;
};

}  // namespace alovc::nn

#endif  // ALOVC_NN_LAYERS_H_
