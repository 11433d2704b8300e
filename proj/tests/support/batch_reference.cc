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

#include "batch_reference.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace alovc::testing {
namespace {

using nn::Activation;

std::span<const float> get(const nn::Bundle& b, std::string_view model, const std::string& layer,
                           const std::string& param) {
  return b.tensor(std::string(model) + "/" + layer + "/" + param);
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void activate(Activation act, std::vector<double>& v) {
  switch (act) {
    case Activation::kNone:
      break;
    case Activation::kRelu:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      break;
    case Activation::kTanh:
      for (double& x : v) x = std::tanh(x);
      break;
    case Activation::kSigmoid:
      for (double& x : v) x = sig(x);
      break;
    case Activation::kSoftmax: {
      double m = -std::numeric_limits<double>::infinity();
      for (double x : v) m = std::max(m, x);
      double s = 0.0;
      for (double& x : v) s += (x = std::exp(x - m));
      for (double& x : v) x /= s;
      break;
    }
  }
}

std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

// y[t] = x[t] W + b for every t.
Seq affine_seq(const Seq& x, std::span<const float> w, std::span<const float> b, int out,
               Activation act) {
  Seq y;
  for (const auto& row : x) {
    std::vector<double> acc(b.begin(), b.end());
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (int j = 0; j < out; ++j) acc[j] += static_cast<double>(row[i]) * w[i * out + j];
    }
    activate(act, acc);
    y.push_back(to_float(acc));
  }
  return y;
}

// Output p reads inputs p - (K - 1 - L) .. p + L, zeros outside [0, T).
Seq conv_seq(const Seq& x, std::span<const float> w, std::span<const float> b, int kernel,
             int lookahead, int in, int out, Activation act) {
  const auto t_len = static_cast<long>(x.size());
  Seq y;
  for (long p = 0; p < t_len; ++p) {
    std::vector<double> acc(b.begin(), b.end());
    for (int k = 0; k < kernel; ++k) {
      const long src = p - (kernel - 1 - lookahead) + k;
      if (src < 0 || src >= t_len) continue;
      for (int i = 0; i < in; ++i) {
        const double xv = x[src][i];
        for (int j = 0; j < out; ++j) acc[j] += xv * w[(static_cast<std::size_t>(k) * in + i) * out + j];
      }
    }
    activate(act, acc);
    y.push_back(to_float(acc));
  }
  return y;
}

Seq lstm_seq(const Seq& x, std::span<const float> w_ih, std::span<const float> w_hh,
             std::span<const float> bias, int in, int hidden) {
  std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
  Seq y;
  for (const auto& row : x) {
    std::vector<double> z(bias.begin(), bias.end());
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < 4 * hidden; ++j) z[j] += static_cast<double>(row[i]) * w_ih[i * 4 * hidden + j];
    }
    for (int i = 0; i < hidden; ++i) {
      for (int j = 0; j < 4 * hidden; ++j) z[j] += h[i] * w_hh[i * 4 * hidden + j];
    }
    for (int j = 0; j < hidden; ++j) {
      const double ig = sig(z[j]);
      const double fg = sig(z[hidden + j]);
      const double g = std::tanh(z[2 * hidden + j]);
      const double og = sig(z[3 * hidden + j]);
      c[j] = fg * c[j] + ig * g;
      h[j] = og * std::tanh(c[j]);
    }
    y.push_back(to_float(h));
  }
  return y;
}

Seq norm_seq(const Seq& x, std::span<const float> gain, std::span<const float> bias) {
  Seq y;
  for (const auto& row : x) {
    const double n = static_cast<double>(row.size());
    double mean = 0.0;
    for (float v : row) mean += v;
    mean /= n;
    double var = 0.0;
    for (float v : row) var += (v - mean) * (v - mean);
    var /= n;
    const double denom = std::sqrt(std::max(var, 1e-5));
    std::vector<float> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      out[j] = static_cast<float>((row[j] - mean) / denom * gain[j] + bias[j]);
    }
    y.push_back(out);
  }
  return y;
}

void add_scaled(Seq& r, const Seq& u, float scale) {
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (std::size_t j = 0; j < r[t].size(); ++j) r[t][j] += scale * u[t][j];
  }
}

void swish_seq(Seq& x) {
  for (auto& row : x) {
    for (float& v : row) v = static_cast<float>(v * sig(v));
  }
}

Seq conformer_seq(const nn::LayerSpec& s, const nn::Bundle& b, std::string_view model,
                  const Seq& x) {
  const int d = s.in;
  const int ff = s.hidden;
  auto g = [&](const std::string& p) { return get(b, model, s.name, p); };
  auto feed_forward = [&](const Seq& r, const std::string& p) {
    Seq t = norm_seq(r, g(p + ".norm.gain"), g(p + ".norm.bias"));
    Seq h = affine_seq(t, g(p + ".w1"), g(p + ".b1"), ff, Activation::kNone);
    swish_seq(h);
    return affine_seq(h, g(p + ".w2"), g(p + ".b2"), d, Activation::kNone);
  };
  Seq r = x;
  add_scaled(r, feed_forward(r, "ff1"), 0.5f);

  Seq t = norm_seq(r, g("conv.norm.gain"), g("conv.norm.bias"));
  Seq pw = affine_seq(t, g("conv.pw1.weight"), g("conv.pw1.bias"), 2 * d, Activation::kNone);
  Seq glu;
  for (const auto& row : pw) {
    std::vector<float> o(d);
    for (int j = 0; j < d; ++j) o[j] = static_cast<float>(row[j] * sig(row[d + j]));
    glu.push_back(o);
  }
  const auto dw = g("conv.dw.weight");
  const auto dwb = g("conv.dw.bias");
  Seq conv;
  for (long p = 0; p < static_cast<long>(glu.size()); ++p) {
    std::vector<float> o(d);
    for (int j = 0; j < d; ++j) {
      double acc = dwb[j];
      for (int k = 0; k < s.kernel; ++k) {
        const long src = p - (s.kernel - 1) + k;
        if (src >= 0) acc += static_cast<double>(dw[k * d + j]) * glu[src][j];
      }
      o[j] = static_cast<float>(acc);
    }
    conv.push_back(o);
  }
  Seq u = norm_seq(conv, g("conv.dw_norm.gain"), g("conv.dw_norm.bias"));
  swish_seq(u);
  add_scaled(r, affine_seq(u, g("conv.pw2.weight"), g("conv.pw2.bias"), d, Activation::kNone), 1.0f);

  add_scaled(r, feed_forward(r, "ff2"), 0.5f);
  return norm_seq(r, g("out_norm.gain"), g("out_norm.bias"));
}

}  // namespace

Seq batch_layer(const nn::LayerSpec& s, const nn::Bundle& b, std::string_view model, const Seq& x) {
  if (s.kind == "dense") {
    return affine_seq(x, get(b, model, s.name, "weight"), get(b, model, s.name, "bias"), s.out,
                      s.activation);
  }
  if (s.kind == "conv1d") {
    return conv_seq(x, get(b, model, s.name, "weight"), get(b, model, s.name, "bias"), s.kernel,
                    s.lookahead, s.in, s.out, s.activation);
  }
  if (s.kind == "lstm") {
    return lstm_seq(x, get(b, model, s.name, "w_ih"), get(b, model, s.name, "w_hh"),
                    get(b, model, s.name, "bias"), s.in, s.out);
  }
  if (s.kind == "layer_norm") {
    return norm_seq(x, get(b, model, s.name, "gain"), get(b, model, s.name, "bias"));
  }
  if (s.kind == "conformer") return conformer_seq(s, b, model, x);
  throw std::invalid_argument("batch_layer: unknown kind " + s.kind);
}

Seq batch_model(const nn::ModelSpec& model, const nn::Bundle& bundle, const Seq& x,
                std::size_t first, std::size_t last) {
  Seq cur = x;
  for (std::size_t i = first; i < last; ++i) cur = batch_layer(model.layers[i], bundle, model.name, cur);
  return cur;
}

Seq random_sequence(std::size_t frames, int width, std::uint64_t seed, float scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-scale, scale);
  Seq s(frames, std::vector<float>(static_cast<std::size_t>(width)));
  for (auto& row : s) {
    for (float& v : row) v = u(rng);
  }
  return s;
}

double max_abs_diff(const Seq& a, const Seq& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != b[t].size()) return std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a[t].size(); ++j) {
      m = std::max(m, std::abs(static_cast<double>(a[t][j]) - b[t][j]));
    }
  }
  return m;
}

}  // namespace alovc::testing
