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

#include "alovc/nn/layers.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "alovc/errors.h"
#include "alovc/kernels.h"

namespace alovc::nn {
namespace {

std::vector<float> copy_tensor(const Bundle& bundle, std::string_view model,
                               std::string_view layer, std::string_view param) {
  const auto t = bundle.tensor(tensor_name(model, layer, param));
  return {t.begin(), t.end()};
}

void swish(std::span<float> v) {
  for (float& x : v) x = x * sigmoid(x);
}

// Shifts a window of `kernel` frames left by one and appends `x`.
void push_frame(std::vector<float>& window, std::span<const float> x) {
  const std::size_t width = x.size();
  std::copy(window.begin() + static_cast<std::ptrdiff_t>(width), window.end(),
            window.begin());
  std::copy(x.begin(), x.end(), window.end() - static_cast<std::ptrdiff_t>(width));
}

class Dense final : public Layer {
 public:
  Dense(const LayerSpec& spec, const Bundle& b, std::string_view model)
      : Layer(spec),
        weight_(copy_tensor(b, model, spec.name, "weight")),
        bias_(copy_tensor(b, model, spec.name, "bias")) {}

 protected:
  bool do_step(LayerState&, std::span<const float> x,
               std::vector<float>& y) const override {
    y.resize(out_width());
    dense_forward(x, weight_, bias_, spec().activation, y);
    return true;
  }

 private:
  std::vector<float> weight_;
  std::vector<float> bias_;
};

// Output for position p uses inputs p-(kernel-1-lookahead) .. p+lookahead.
class Conv1d final : public Layer {
 public:
  Conv1d(const LayerSpec& spec, const Bundle& b, std::string_view model)
      : Layer(spec),
        weight_(copy_tensor(b, model, spec.name, "weight")),
        bias_(copy_tensor(b, model, spec.name, "bias")) {}

  LayerState make_state() const override {
    LayerState s;
    s.window.assign(static_cast<std::size_t>(spec().kernel * spec().in), 0.0f);
    return s;
  }

 protected:
  bool do_step(LayerState& s, std::span<const float> x,
               std::vector<float>& y) const override {
    push_frame(s.window, x);
    ++s.received;
    if (s.received <= static_cast<std::size_t>(lookahead())) return false;
    y.resize(out_width());
    kernels::affine(s.window, weight_, bias_, y);
    apply_activation(spec().activation, y);
    return true;
  }

 private:
  std::vector<float> weight_;
  std::vector<float> bias_;
};

class Lstm final : public Layer {
 public:
  Lstm(const LayerSpec& spec, const Bundle& b, std::string_view model)
      : Layer(spec), bias_(copy_tensor(b, model, spec.name, "bias")) {
    // Stack [W_ih; W_hh] so one affine call consumes [x; h].
    stacked_ = copy_tensor(b, model, spec.name, "w_ih");
    const auto w_hh = b.tensor(tensor_name(model, spec.name, "w_hh"));
    stacked_.insert(stacked_.end(), w_hh.begin(), w_hh.end());
  }

  LayerState make_state() const override {
    LayerState s;
    const auto h = static_cast<std::size_t>(out_width());
    s.h.assign(h, 0.0f);
    s.c.assign(h, 0.0f);
    s.scratch.assign(static_cast<std::size_t>(in_width()) + h, 0.0f);
    s.window.assign(4 * h, 0.0f);  // gate pre-activations
    return s;
  }

 protected:
  bool do_step(LayerState& s, std::span<const float> x,
               std::vector<float>& y) const override {
    const auto hidden = static_cast<std::size_t>(out_width());
    std::copy(x.begin(), x.end(), s.scratch.begin());
    std::copy(s.h.begin(), s.h.end(), s.scratch.begin() + static_cast<std::ptrdiff_t>(x.size()));
    kernels::affine(s.scratch, stacked_, bias_, s.window);
    const float* z = s.window.data();
    for (std::size_t j = 0; j < hidden; ++j) {
      const float i_gate = sigmoid(z[j]);
      const float f_gate = sigmoid(z[hidden + j]);
      const float cell = std::tanh(z[2 * hidden + j]);
      const float o_gate = sigmoid(z[3 * hidden + j]);
      s.c[j] = f_gate * s.c[j] + i_gate * cell;
      s.h[j] = o_gate * std::tanh(s.c[j]);
    }
    y.assign(s.h.begin(), s.h.end());
    return true;
  }

 private:
  std::vector<float> stacked_;
  std::vector<float> bias_;
};

class LayerNorm final : public Layer {
 public:
  LayerNorm(const LayerSpec& spec, const Bundle& b, std::string_view model)
      : Layer(spec),
        gain_(copy_tensor(b, model, spec.name, "gain")),
        bias_(copy_tensor(b, model, spec.name, "bias")) {}

 protected:
  bool do_step(LayerState&, std::span<const float> x,
               std::vector<float>& y) const override {
    y.resize(out_width());
    framewise_layer_norm(x, gain_, bias_, y);
    return true;
  }

 private:
  std::vector<float> gain_;
  std::vector<float> bias_;
};

// Conformer block without self-attention, every sublayer causal:
//   x += 0.5 * FF1(x)
//   x += Conv(x)   LN -> pointwise(2d) -> GLU -> causal depthwise -> LN ->
//                  swish -> pointwise(d)
//   x += 0.5 * FF2(x)
//   y  = LN(x)
// FF(x) = W2 swish(W1 LN(x) + b1) + b2.
class Conformer final : public Layer {
 public:
  Conformer(const LayerSpec& spec, const Bundle& b, std::string_view model)
      : Layer(spec) {
    auto get = [&](const char* p) { return copy_tensor(b, model, spec.name, p); };
    for (int k = 0; k < 2; ++k) {
      const std::string p = k == 0 ? "ff1" : "ff2";
      ff_[k] = FeedForward{get((p + ".norm.gain").c_str()), get((p + ".norm.bias").c_str()),
                           get((p + ".w1").c_str()), get((p + ".b1").c_str()),
                           get((p + ".w2").c_str()), get((p + ".b2").c_str())};
    }
    conv_norm_gain_ = get("conv.norm.gain");
    conv_norm_bias_ = get("conv.norm.bias");
    pw1_w_ = get("conv.pw1.weight");
    pw1_b_ = get("conv.pw1.bias");
    dw_w_ = get("conv.dw.weight");
    dw_b_ = get("conv.dw.bias");
    dw_norm_gain_ = get("conv.dw_norm.gain");
    dw_norm_bias_ = get("conv.dw_norm.bias");
    pw2_w_ = get("conv.pw2.weight");
    pw2_b_ = get("conv.pw2.bias");
    out_norm_gain_ = get("out_norm.gain");
    out_norm_bias_ = get("out_norm.bias");
  }

  LayerState make_state() const override {
    LayerState s;
    LayerState dw;
    dw.window.assign(static_cast<std::size_t>(spec().kernel * spec().in), 0.0f);
    s.children.push_back(std::move(dw));
    return s;
  }

 protected:
  bool do_step(LayerState& s, std::span<const float> x,
               std::vector<float>& y) const override {
    const auto d = static_cast<std::size_t>(in_width());
    const auto ff = static_cast<std::size_t>(spec().hidden);
    std::vector<float> r(x.begin(), x.end());
    std::vector<float> t(d);
    std::vector<float> hid(std::max(ff, 2 * d));
    std::vector<float> u(d);

    feed_forward(ff_[0], r, t, hid, u);

    // Convolution module.
    framewise_layer_norm(r, conv_norm_gain_, conv_norm_bias_, t);
    std::span<float> pw(hid.data(), 2 * d);
    kernels::affine(t, pw1_w_, pw1_b_, pw);
    for (std::size_t j = 0; j < d; ++j) t[j] = pw[j] * sigmoid(pw[d + j]);
    LayerState& dw = s.children[0];
    push_frame(dw.window, t);
    const auto kernel = static_cast<std::size_t>(spec().kernel);
    for (std::size_t j = 0; j < d; ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < kernel; ++k) acc += dw_w_[k * d + j] * dw.window[k * d + j];
      u[j] = acc + dw_b_[j];
    }
    framewise_layer_norm(u, dw_norm_gain_, dw_norm_bias_, t);
    swish(t);
    kernels::affine(t, pw2_w_, pw2_b_, u);
    for (std::size_t j = 0; j < d; ++j) r[j] += u[j];

    feed_forward(ff_[1], r, t, hid, u);

    y.resize(d);
    framewise_layer_norm(r, out_norm_gain_, out_norm_bias_, y);
    return true;
  }

 private:
  struct FeedForward {
    std::vector<float> norm_gain, norm_bias, w1, b1, w2, b2;
  };

  void feed_forward(const FeedForward& f, std::vector<float>& r, std::vector<float>& t,
                    std::vector<float>& hid, std::vector<float>& u) const {
    const auto ff = static_cast<std::size_t>(spec().hidden);
    framewise_layer_norm(r, f.norm_gain, f.norm_bias, t);
    std::span<float> h(hid.data(), ff);
    kernels::affine(t, f.w1, f.b1, h);
    swish(h);
    kernels::affine(h, f.w2, f.b2, u);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += 0.5f * u[j];
  }

  FeedForward ff_[2];
  std::vector<float> conv_norm_gain_, conv_norm_bias_, pw1_w_, pw1_b_;
  std::vector<float> dw_w_, dw_b_, dw_norm_gain_, dw_norm_bias_;
  std::vector<float> pw2_w_, pw2_b_, out_norm_gain_, out_norm_bias_;
};

}  // namespace

void apply_activation(Activation act, std::span<float> v) {
  switch (act) {
    case Activation::kNone:
      return;
    case Activation::kRelu:
      for (float& x : v) x = std::max(x, 0.0f);
      return;
    case Activation::kTanh:
      for (float& x : v) x = std::tanh(x);
      return;
    case Activation::kSigmoid:
      for (float& x : v) x = sigmoid(x);
      return;
    case Activation::kSoftmax: {
      if (v.empty()) return;
      const float peak = *std::max_element(v.begin(), v.end());
      float sum = 0.0f;
      for (float& x : v) {
        x = std::exp(x - peak);
        sum += x;
      }
      for (float& x : v) x /= sum;
      return;
    }
  }
}

void framewise_layer_norm(std::span<const float> x, std::span<const float> gain,
                          std::span<const float> bias, std::span<float> y) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (float v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (float v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::sqrt(std::max(var, static_cast<double>(kLayerNormEpsilon)));
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = static_cast<float>((x[j] - mean) * inv) * gain[j] + bias[j];
  }
}

void dense_forward(std::span<const float> x, std::span<const float> w,
                   std::span<const float> b, Activation act, std::span<float> y) {
  kernels::affine(x, w, b, y);
  apply_activation(act, y);
}

bool Layer::step(LayerState& state, std::span<const float> x,
                 std::vector<float>& y) const {
  if (state.flushed) throw std::logic_error("layer '" + spec_.name + "' already flushed");
  if (x.size() != static_cast<std::size_t>(spec_.in)) {
    throw std::invalid_argument("layer '" + spec_.name + "' expects width " +
                                std::to_string(spec_.in) + ", got " +
                                std::to_string(x.size()));
  }
  return do_step(state, x, y);
}

std::vector<std::vector<float>> Layer::flush(LayerState& state) const {
  if (state.flushed) throw std::logic_error("layer '" + spec_.name + "' flushed twice");
  std::vector<std::vector<float>> out;
  const std::vector<float> zeros(static_cast<std::size_t>(spec_.in), 0.0f);
  for (int m = 0; m < spec_.lookahead; ++m) {
    std::vector<float> y;
    if (do_step(state, zeros, y)) out.push_back(std::move(y));
  }
  state.flushed = true;
  return out;
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Bundle& bundle,
                                  std::string_view model_name) {
  validate_layer_spec(spec);
  if (spec.kind == "dense") return std::make_unique<Dense>(spec, bundle, model_name);
  if (spec.kind == "conv1d") return std::make_unique<Conv1d>(spec, bundle, model_name);
  if (spec.kind == "lstm") return std::make_unique<Lstm>(spec, bundle, model_name);
  if (spec.kind == "layer_norm") return std::make_unique<LayerNorm>(spec, bundle, model_name);
  if (spec.kind == "conformer") return std::make_unique<Conformer>(spec, bundle, model_name);
  throw BundleError(BundleError::Kind::kFormat, "unknown layer kind '" + spec.kind + "'");
}

Sequential::Sequential(const ModelSpec& model, const Bundle& bundle,
                       std::size_t first, std::size_t last) {
  if (first >= last || last > model.layers.size()) {
    throw BundleError(BundleError::Kind::kTopology,
                      "model '" + model.name + "' has too few layers");
  }
  for (std::size_t i = first; i < last; ++i) {
    const auto& spec = model.layers[i];
    if (!layers_.empty() && layers_.back()->out_width() != spec.in) {
      throw BundleError(BundleError::Kind::kTopology,
                        "model '" + model.name + "': layer '" + spec.name +
                            "' input width does not match the previous layer");
    }
    layers_.push_back(make_layer(spec, bundle, model.name));
  }
}

Sequential::State Sequential::make_state() const {
  State s;
  for (const auto& l : layers_) s.layers.push_back(l->make_state());
  return s;
}

std::optional<std::vector<float>> Sequential::step(State& state,
                                                   std::span<const float> x) const {
  if (state.flushed) throw std::logic_error("sequential stack already flushed");
  std::vector<float> cur(x.begin(), x.end());
  std::vector<float> next;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i]->step(state.layers[i], cur, next)) return std::nullopt;
    cur.swap(next);
  }
  return cur;
}

std::vector<std::vector<float>> Sequential::flush(State& state) const {
  if (state.flushed) throw std::logic_error("sequential stack flushed twice");
  std::vector<std::vector<float>> carry;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    std::vector<std::vector<float>> emitted;
    std::vector<float> y;
    for (const auto& x : carry) {
      if (layers_[i]->step(state.layers[i], x, y)) emitted.push_back(y);
    }
    for (auto& v : layers_[i]->flush(state.layers[i])) emitted.push_back(std::move(v));
    carry = std::move(emitted);
  }
  state.flushed = true;
  return carry;
}

int Sequential::lookahead() const {
  int total = 0;
  for (const auto& l : layers_) total += l->lookahead();
  return total;
}

int Sequential::in_width() const { return layers_.front()->in_width(); }
int Sequential::out_width() const { return layers_.back()->out_width(); }

}  // namespace alovc::nn
