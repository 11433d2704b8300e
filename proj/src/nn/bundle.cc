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

#include "alovc/nn/bundle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>

#include <json.hpp>

#include "alovc/audio_io.h"
#include "alovc/errors.h"

namespace alovc::nn {
namespace {

using json = nlohmann::json;
using Kind = BundleError::Kind;

constexpr int kFormatVersion = 1;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_floats(std::vector<std::uint8_t>& out, std::span<const float> v) {
  const std::size_t base = out.size();
  out.resize(base + v.size() * 4);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data() + base, v.data(), v.size() * 4);
  } else {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(v[i]);
      for (int b = 0; b < 4; ++b) out[base + 4 * i + b] = (bits >> (8 * b)) & 0xff;
    }
  }
}

void read_floats(const std::uint8_t* src, std::span<float> dst) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst.data(), src, dst.size() * 4);
  } else {
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::bit_cast<float>(read_u32(src + 4 * i));
    }
  }
}

json layer_to_json(const LayerSpec& l) {
  return json{{"name", l.name},
              {"kind", l.kind},
              {"in", l.in},
              {"out", l.out},
              {"kernel", l.kernel},
              {"lookahead", l.lookahead},
              {"hidden", l.hidden},
              {"activation", std::string(activation_name(l.activation))}};
}

LayerSpec layer_from_json(const json& j) {
  LayerSpec l;
  l.name = j.at("name").get<std::string>();
  l.kind = j.at("kind").get<std::string>();
  l.in = j.at("in").get<int>();
  l.out = j.at("out").get<int>();
  l.kernel = j.value("kernel", 1);
  l.lookahead = j.value("lookahead", 0);
  l.hidden = j.value("hidden", 0);
  l.activation = parse_activation(j.value("activation", std::string("none")));
  return l;
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kNone: return "none";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftmax: return "softmax";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "none";
}

Activation parse_activation(std::string_view name) {
  if (name == "none") return Activation::kNone;
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "softmax") return Activation::kSoftmax;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw BundleError(Kind::kFormat, "unknown activation '" + std::string(name) + "'");
}

int ModelSpec::lookahead() const {
  int total = 0;
  for (const auto& l : layers) total += l.lookahead;
  return total;
}

const LayerSpec& ModelSpec::layer(std::string_view layer_name) const {
  for (const auto& l : layers) {
    if (l.name == layer_name) return l;
  }
  throw BundleError(Kind::kTopology, "model '" + name + "' has no layer '" +
                                         std::string(layer_name) + "'");
}

void validate_layer_spec(const LayerSpec& l) {
  auto fail = [&](const std::string& why) {
    throw BundleError(Kind::kFormat, "layer '" + l.name + "': " + why);
  };
  if (l.name.empty() || l.name.find('/') != std::string::npos) {
    fail("layer names must be non-empty and contain no '/'");
  }
  if (l.in <= 0 || l.out <= 0) fail("widths must be positive");
  if (l.kernel <= 0) fail("kernel must be positive");
  if (l.lookahead < 0) fail("lookahead must be non-negative");
  if (l.kind != "conv1d" && l.lookahead != 0) fail("only conv1d may look ahead");
  if (l.kind == "dense") {
    if (l.kernel != 1) fail("dense kernel must be 1");
  } else if (l.kind == "conv1d") {
    if (l.lookahead >= l.kernel) fail("lookahead must be smaller than kernel");
    if (l.activation == Activation::kSoftmax) fail("conv1d cannot use softmax");
  } else if (l.kind == "lstm") {
    if (l.kernel != 1 || l.activation != Activation::kNone) {
      fail("lstm takes no kernel or activation");
    }
  } else if (l.kind == "layer_norm") {
    if (l.in != l.out) fail("layer_norm must preserve width");
    if (l.in < 2) fail("layer_norm needs width >= 2");
  } else if (l.kind == "conformer") {
    if (l.in != l.out) fail("conformer must preserve width");
    if (l.hidden <= 0) fail("conformer needs a feed-forward width");
    if (l.in < 2) fail("conformer needs width >= 2");
  } else {
    fail("unknown kind '" + l.kind + "'");
  }
}

std::vector<std::pair<std::string, Shape>> expected_tensors(const LayerSpec& l) {
  const int in = l.in;
  const int out = l.out;
  if (l.kind == "dense") return {{"weight", {in, out}}, {"bias", {out}}};
  if (l.kind == "conv1d") {
    return {{"weight", {l.kernel, in, out}}, {"bias", {out}}};
  }
  if (l.kind == "lstm") {
    return {{"w_ih", {in, 4 * out}}, {"w_hh", {out, 4 * out}}, {"bias", {4 * out}}};
  }
  if (l.kind == "layer_norm") return {{"gain", {in}}, {"bias", {in}}};
  if (l.kind == "conformer") {
    const int d = in;
    const int ff = l.hidden;
    std::vector<std::pair<std::string, Shape>> t;
    for (const char* half : {"ff1", "ff2"}) {
      const std::string p = half;
      t.push_back({p + ".norm.gain", {d}});
      t.push_back({p + ".norm.bias", {d}});
      t.push_back({p + ".w1", {d, ff}});
      t.push_back({p + ".b1", {ff}});
      t.push_back({p + ".w2", {ff, d}});
      t.push_back({p + ".b2", {d}});
      if (p == "ff1") {
        t.push_back({"conv.norm.gain", {d}});
        t.push_back({"conv.norm.bias", {d}});
        t.push_back({"conv.pw1.weight", {d, 2 * d}});
        t.push_back({"conv.pw1.bias", {2 * d}});
        t.push_back({"conv.dw.weight", {l.kernel, d}});
        t.push_back({"conv.dw.bias", {d}});
        t.push_back({"conv.dw_norm.gain", {d}});
        t.push_back({"conv.dw_norm.bias", {d}});
        t.push_back({"conv.pw2.weight", {d, d}});
        t.push_back({"conv.pw2.bias", {d}});
      }
    }
    t.push_back({"out_norm.gain", {d}});
    t.push_back({"out_norm.bias", {d}});
    return t;
  }
  throw BundleError(Kind::kFormat, "unknown layer kind '" + l.kind + "'");
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

void Bundle::add_model(ModelSpec model) {
  if (model.name.empty() || model.name.find('/') != std::string::npos) {
    throw BundleError(Kind::kFormat, "invalid model name '" + model.name + "'");
  }
  for (const auto& m : models_) {
    if (m.name == model.name) {
      throw BundleError(Kind::kFormat, "duplicate model '" + model.name + "'");
    }
  }
  for (const auto& l : model.layers) {
    validate_layer_spec(l);
    for (auto& [param, shape] : expected_tensors(l)) {
      Tensor t;
      t.name = tensor_name(model.name, l.name, param);
      if (index_.count(t.name)) {
        throw BundleError(Kind::kFormat, "duplicate tensor '" + t.name + "'");
      }
      t.data.assign(element_count(shape), ends_with(param, "gain") ? 1.0f : 0.0f);
      t.shape = std::move(shape);
      index_.emplace(t.name, tensors_.size());
      tensors_.push_back(std::move(t));
    }
  }
  models_.push_back(std::move(model));
}

bool Bundle::has_model(std::string_view topology) const {
  for (const auto& m : models_) {
    if (m.topology == topology) return true;
  }
  return false;
}

const ModelSpec& Bundle::model(std::string_view topology) const {
  for (const auto& m : models_) {
    if (m.topology == topology) return m;
  }
  throw BundleError(Kind::kTopology, "bundle has no model with topology '" +
                                         std::string(topology) + "'");
}

const Tensor& Bundle::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw BundleError(Kind::kShape, "missing tensor '" + std::string(name) + "'");
  }
  return tensors_[it->second];
}

std::span<const float> Bundle::tensor(std::string_view name) const {
  return find(name).data;
}

std::span<float> Bundle::mutable_tensor(std::string_view name) {
  find(name);
  return tensors_[index_.at(std::string(name))].data;
}

bool Bundle::has_tensor(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

std::size_t Bundle::param_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

std::size_t Bundle::param_count(std::string_view model_name) const {
  const std::string prefix = std::string(model_name) + "/";
  std::size_t n = 0;
  for (const auto& t : tensors_) {
    if (t.name.compare(0, prefix.size(), prefix) == 0) n += t.data.size();
  }
  return n;
}

std::string Bundle::header_text() const {
  json models = json::array();
  for (const auto& m : models_) {
    json layers = json::array();
    for (const auto& l : m.layers) layers.push_back(layer_to_json(l));
    models.push_back(json{{"name", m.name},
                          {"topology", m.topology},
                          {"meta", m.meta},
                          {"layers", layers}});
  }
  json tensors = json::array();
  std::size_t offset = 0;
  for (const auto& t : tensors_) {
    tensors.push_back(json{{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data.size() * 4;
  }
  json header{{"format", "alovc-bundle"},
              {"version", kFormatVersion},
              {"param_count", param_count()},
              {"models", models},
              {"tensors", tensors}};
  return header.dump();
}

std::vector<std::uint8_t> Bundle::save() const {
  const std::string header = header_text();
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int b = 0; b < 4; ++b) out.push_back((len >> (8 * b)) & 0xff);
  out.insert(out.end(), header.begin(), header.end());
  out.reserve(out.size() + param_count() * 4);
  for (const auto& t : tensors_) append_floats(out, t.data);
  return out;
}

Bundle Bundle::load(std::span<const std::uint8_t> bytes) {
  const std::size_t prefix = kMagic.size() + 4;
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw BundleError(Kind::kFormat, "bad magic: not a weight bundle");
  }
  if (bytes.size() < prefix) {
    throw BundleError(Kind::kTruncated, "bundle truncated inside header length");
  }
  const std::uint32_t header_len = read_u32(bytes.data() + kMagic.size());
  if (bytes.size() < prefix + header_len) {
    throw BundleError(Kind::kTruncated, "bundle truncated inside header");
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes.data() + prefix),
                              header_len);

  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw BundleError(Kind::kFormat, std::string("malformed header: ") + e.what());
  }

  Bundle bundle;
  std::size_t declared_count = 0;
  std::vector<json> manifest;
  try {
    if (header.at("format") != "alovc-bundle") {
      throw BundleError(Kind::kFormat, "header format is not alovc-bundle");
    }
    if (header.at("version").get<int>() != kFormatVersion) {
      throw BundleError(Kind::kFormat, "unsupported bundle version");
    }
    declared_count = header.at("param_count").get<std::size_t>();
    for (const auto& jm : header.at("models")) {
      ModelSpec m;
      m.name = jm.at("name").get<std::string>();
      m.topology = jm.at("topology").get<std::string>();
      m.meta = jm.value("meta", std::map<std::string, std::string>{});
      for (const auto& jl : jm.at("layers")) m.layers.push_back(layer_from_json(jl));
      bundle.add_model(std::move(m));
    }
    manifest = header.at("tensors").get<std::vector<json>>();
  } catch (const json::exception& e) {
    throw BundleError(Kind::kFormat, std::string("malformed header: ") + e.what());
  }

  // The manifest must name exactly the tensors the layers declare, with the
  // declared shapes, laid out contiguously in manifest order.
  std::vector<Tensor> ordered;
  ordered.reserve(manifest.size());
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t offset = 0;
  std::size_t manifest_count = 0;
  try {
    for (const auto& jt : manifest) {
      const auto name = jt.at("name").get<std::string>();
      const auto shape = jt.at("shape").get<Shape>();
      const auto at = jt.at("offset").get<std::size_t>();
      auto it = bundle.index_.find(name);
      if (it == bundle.index_.end()) {
        throw BundleError(Kind::kFormat, "manifest names unknown tensor '" + name + "'");
      }
      if (seen.count(name)) {
        throw BundleError(Kind::kFormat, "tensor listed twice: '" + name + "'");
      }
      const Tensor& expected = bundle.tensors_[it->second];
      if (shape != expected.shape) {
        throw BundleError(Kind::kShape, "tensor '" + name +
                                            "' shape disagrees with layer widths");
      }
      if (at != offset) {
        throw BundleError(Kind::kFormat, "tensor '" + name + "' offset is not contiguous");
      }
      seen.emplace(name, ordered.size());
      ordered.push_back(Tensor{name, shape, std::vector<float>(element_count(shape))});
      offset += element_count(shape) * 4;
      manifest_count += element_count(shape);
    }
  } catch (const json::exception& e) {
    throw BundleError(Kind::kFormat, std::string("malformed manifest: ") + e.what());
  }
  for (const auto& t : bundle.tensors_) {
    if (!seen.count(t.name)) {
      throw BundleError(Kind::kShape, "manifest is missing tensor '" + t.name + "'");
    }
  }
  if (declared_count != manifest_count) {
    throw BundleError(Kind::kConsistency,
                      "header param_count " + std::to_string(declared_count) +
                          " != manifest sum " + std::to_string(manifest_count));
  }
  const std::size_t payload = bytes.size() - prefix - header_len;
  if (payload < offset) {
    throw BundleError(Kind::kTruncated,
                      "payload has " + std::to_string(payload) + " bytes, manifest needs " +
                          std::to_string(offset));
  }
  if (payload > offset) {
    throw BundleError(Kind::kFormat, "trailing bytes after payload");
  }
  const std::uint8_t* data = bytes.data() + prefix + header_len;
  for (auto& t : ordered) {
    read_floats(data, t.data);
    data += t.data.size() * 4;
  }
  bundle.tensors_ = std::move(ordered);
  bundle.index_ = std::move(seen);
  return bundle;
}

void Bundle::write_file(const std::filesystem::path& path) const {
  write_file_bytes(path, save());
}

Bundle Bundle::read_file(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const IoError& e) {
    throw BundleError(Kind::kFormat, e.what());
  }
  return load(bytes);
}

void randomize(Bundle& bundle, std::uint64_t seed, float scale) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](float lo, float hi) {
    // 24 random mantissa bits; portable across standard libraries.
    const float u = static_cast<float>(rng() >> 40) / 16777216.0f;
    return lo + (hi - lo) * u;
  };
  for (const auto& t : bundle.tensors()) {
    auto data = bundle.mutable_tensor(t.name);
    if (ends_with(t.name, "gain")) {
      for (float& v : data) v = uniform(0.9f, 1.1f);
    } else if (t.shape.size() == 1) {
      for (float& v : data) v = uniform(-0.1f, 0.1f);
    } else {
      // Fan-in: every dimension but the last (output) one.
      std::size_t fan_in = 1;
      for (std::size_t d = 0; d + 1 < t.shape.size(); ++d) fan_in *= t.shape[d];
      if (t.name.find("conv.dw.weight") != std::string::npos) fan_in = t.shape[0];
      const float a = scale * std::sqrt(3.0f / static_cast<float>(fan_in));
      for (float& v : data) v = uniform(-a, a);
    }
  }
}

void zero_tensors(Bundle& bundle, std::string_view prefix) {
  for (const auto& t : bundle.tensors()) {
    if (std::string_view(t.name).substr(0, prefix.size()) == prefix) {
      auto data = bundle.mutable_tensor(t.name);
      std::fill(data.begin(), data.end(), 0.0f);
    }
  }
}

}  // namespace alovc::nn
