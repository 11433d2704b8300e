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

#include "alovc/prosody.h"

#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <string>

#include "alovc/audio_io.h"
#include "alovc/errors.h"

namespace alovc {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double clamp_f0(double f0) { return std::clamp(f0, 40.0, 500.0); }

}  // namespace

PitchStats estimate_stats(std::span<const ProsodyFrame> track, std::size_t min_voiced) {
  // Sums are taken relative to the first voiced value, so a constant track
  // gives mu = log f0 and sigma = 0 exactly.
  PitchStats s;
  double shift = 0.0;
  double sum = 0.0;
  for (const auto& f : track) {
    if (f.vuf == 0 || f.f0 <= 0.0) continue;
    const double x = std::log(f.f0);
    if (s.n_voiced == 0) shift = x;
    sum += x - shift;
    ++s.n_voiced;
  }
  if (s.n_voiced == 0) {
    throw ProfileError(ProfileError::Reason::kNoVoicedSpeech, "no voiced speech");
  }
  if (s.n_voiced < min_voiced) {
    throw ProfileError(ProfileError::Reason::kTooFewVoicedFrames,
                       "only " + std::to_string(s.n_voiced) + " voiced frames, need " +
                           std::to_string(min_voiced));
  }
  const double offset = sum / static_cast<double>(s.n_voiced);
  s.mu = shift + offset;
  double ss = 0.0;
  for (const auto& f : track) {
    if (f.vuf == 0 || f.f0 <= 0.0) continue;
    const double d = (std::log(f.f0) - shift) - offset;
    ss += d * d;
  }
  s.sigma = std::sqrt(ss / static_cast<double>(s.n_voiced));
  return s;
}

double convert_f0(double f0_src, const PitchStats& src, const PitchStats& trg) {
  if (!(f0_src > 0.0)) throw std::invalid_argument("convert_f0: f0_src must be positive");
  const double x = std::log(f0_src);
  if (src.sigma == 0.0) {
    if (std::abs(x - src.mu) <= 1e-12) return std::exp(trg.mu);
    throw ProfileError(ProfileError::Reason::kDegenerateSource,
                       "source pitch spread is zero");
  }
  return std::exp((x - src.mu) * (trg.sigma / src.sigma) + trg.mu);
}

std::string format_stats(const PitchStats& stats) {
  return "mu=" + format_double(stats.mu) + "\nsigma=" + format_double(stats.sigma) +
         "\nn_voiced=" + std::to_string(stats.n_voiced) + "\n";
}

PitchStats parse_stats(std::string_view text) {
  PitchStats s;
  bool have_mu = false, have_sigma = false, have_n = false;
  auto fail = [](const std::string& why) {
    return ProfileError(ProfileError::Reason::kMismatch, "stats file: " + why);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected key=value, got '" + std::string(line) + "'");
    const std::string key(line.substr(0, eq));
    const std::string value(line.substr(eq + 1));
    try {
      std::size_t used = 0;
      if (key == "mu") {
        s.mu = std::stod(value, &used);
        have_mu = true;
      } else if (key == "sigma") {
        s.sigma = std::stod(value, &used);
        have_sigma = true;
      } else if (key == "n_voiced") {
        s.n_voiced = std::stoull(value, &used);
        have_n = true;
      } else {
        throw fail("unknown key '" + key + "'");
      }
      if (used != value.size()) throw fail("bad value for '" + key + "'");
    } catch (const std::logic_error&) {
      throw fail("bad value for '" + key + "'");
    }
  }
  if (!have_mu || !have_sigma || !have_n) throw fail("needs mu, sigma and n_voiced");
  if (!std::isfinite(s.mu) || !(s.sigma >= 0.0) || s.n_voiced == 0) {
    throw fail("values out of range");
  }
  return s;
}

void write_stats(const std::filesystem::path& path, const PitchStats& stats) {
  const std::string text = format_stats(stats);
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

PitchStats read_stats(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_stats({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

PitchConverter::PitchConverter(const PitchStats& target, std::optional<PitchStats> fixed_source)
    : target_(target), fixed_(fixed_source) {}

void PitchConverter::reset() {
  n_ = 0;
  mean_ = 0.0;
  m2_ = 0.0;
}

PitchStats PitchConverter::source() const {
  if (fixed_) return *fixed_;
  PitchStats s;
  s.n_voiced = n_;
  s.mu = mean_;
  s.sigma = n_ > 0 ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0;
  return s;
}

ProsodyFrame PitchConverter::convert(const ProsodyFrame& src) {
  if (src.vuf == 0 || src.f0 <= 0.0) return src;
  const double x = std::log(src.f0);
  if (!fixed_) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  const PitchStats s = source();
  double y;
  if (s.sigma > 0.0 && (fixed_ || n_ >= kMinVoicedFrames)) {
    y = (x - s.mu) * (target_.sigma / s.sigma) + target_.mu;
  } else {
    y = x - s.mu + target_.mu;
  }
  ProsodyFrame out = src;
  out.f0 = clamp_f0(std::exp(y));
  return out;
}

PitchPredictor::PitchPredictor(const nn::Bundle& bundle) {
  if (!bundle.has_model("pitch_predictor")) {
    throw BundleError(BundleError::Kind::kTopology, "bundle has no 'pitch_predictor' model");
  }
  const auto& spec = bundle.model("pitch_predictor");
  net_ = nn::Sequential(spec, bundle);
  if (net_.lookahead() != 0 || net_.in_width() != 2 || net_.out_width() != 2) {
    throw BundleError(BundleError::Kind::kTopology,
                      "pitch predictor must be causal and map 2 -> 2");
  }
}

PredictorOutput PitchPredictor::step(State& state, double f0_trg, int vuf,
                                     double fallback_f0) const {
  const bool voiced = vuf != 0 && f0_trg > 0.0;
  const float in[2] = {voiced ? static_cast<float>(std::log(f0_trg)) : 0.0f,
                       voiced ? 1.0f : 0.0f};
  const auto p = *net_.step(state, in);
  PredictorOutput out;
  out.variance = {p[0], p[1]};
  out.vuf = nn::sigmoid(p[1]) > 0.5f ? 1 : 0;
  if (out.vuf) {
    const double base = voiced ? f0_trg : fallback_f0;
    out.f0 = clamp_f0(std::exp(std::log(base) + static_cast<double>(p[0])));
  }
  return out;
}

}  // namespace alovc
