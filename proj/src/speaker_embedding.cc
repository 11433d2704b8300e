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

#include "alovc/speaker_embedding.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "alovc/errors.h"
#include "alovc/frontend.h"

namespace alovc {
namespace {

ProfileError parse_error(const std::string& why) {
  return ProfileError(ProfileError::Reason::kEmbeddingParse, "embedding: " + why);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::string_view embedding_tag_name(EmbeddingTag tag) {
  switch (tag) {
    case EmbeddingTag::kDvector:
      return "dvector";
    case EmbeddingTag::kEcapa:
      return "ecapa";
    case EmbeddingTag::kStub:
      return "stub";
  }
  return "stub";
}

void normalize_embedding(std::vector<double>& v) {
  double ss = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw parse_error("non-finite value");
    ss += x * x;
  }
  if (ss == 0.0) {
    throw ProfileError(ProfileError::Reason::kZeroEmbedding, "embedding is a zero vector");
  }
  const double norm = std::sqrt(ss);
  // Already unit up to rounding: leave the bits alone so written embeddings
  // read back exactly.
  if (std::abs(norm - 1.0) <= 1e-14) return;
  for (double& x : v) x /= norm;
}

SpeakerEmbedding parse_embedding(std::string_view text) {
  SpeakerEmbedding e;
  e.tag = EmbeddingTag::kStub;
  bool first = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (first) {
        const std::string_view body = trim(line.substr(1));
        if (body.starts_with("tag=")) {
          const auto name = trim(body.substr(4));
          if (name == "dvector") e.tag = EmbeddingTag::kDvector;
          else if (name == "ecapa") e.tag = EmbeddingTag::kEcapa;
          else if (name == "stub") e.tag = EmbeddingTag::kStub;
          else throw parse_error("unknown tag '" + std::string(name) + "'");
        }
      }
      first = false;
      continue;
    }
    first = false;
    const std::string s(line);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(s, &used);
    } catch (const std::logic_error&) {
      throw parse_error("line " + std::to_string(line_no) + " is not a number");
    }
    if (used != s.size()) throw parse_error("line " + std::to_string(line_no) + " is not a number");
    e.values.push_back(v);
  }
  if (e.values.empty()) throw parse_error("no values");
  normalize_embedding(e.values);
  return e;
}

SpeakerEmbedding load_embedding(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_embedding({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

std::string format_embedding(const SpeakerEmbedding& e) {
  std::string out = "# tag=" + std::string(embedding_tag_name(e.tag)) + "\n";
  char buf[32];
  for (double v : e.values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

void write_embedding(const std::filesystem::path& path, const SpeakerEmbedding& e) {
  const std::string text = format_embedding(e);
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

SpeakerEmbedding stub_embedding(const Audio& audio) {
  if (audio.samples.size() < static_cast<std::size_t>(audio.sample_rate)) {
    throw ProfileError(ProfileError::Reason::kTooShort,
                       "reference audio must be at least 1 s long");
  }
  const FrameConfig fc;
  const std::size_t n = frame_count(audio.samples.size(), fc);
  const PitchConfig pc;
  Mfcc39 mfcc;
  MfccHistory hist;

  std::array<double, bark::kNumBands> band_sum{};
  std::array<double, kNumCeps> cep_sum{};
  double lf_sum = 0.0, lf_ss = 0.0;
  std::size_t voiced = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t end = t * fc.hop + fc.window;
    const std::size_t begin = end > static_cast<std::size_t>(pc.history) ? end - pc.history : 0;
    const std::span<const float> recent(audio.samples.data() + begin, end - begin);
    const auto frame = recent.subspan(recent.size() - fc.window);
    auto& spec = mfcc.spectrum();
    const auto power = spec.compute(frame);
    const auto bands = band_log_energies(power, spec.window_energy());
    const auto cep = mfcc.cepstrum(power);
    for (int k = 0; k < bark::kNumBands; ++k) band_sum[k] += bands[k];
    for (int k = 0; k < kNumCeps; ++k) cep_sum[k] += cep[k];
    const ProsodyFrame p = detect_pitch(recent, pc, audio.sample_rate);
    if (p.vuf) {
      const double lf = std::log(p.f0);
      lf_sum += lf;
      lf_ss += lf * lf;
      ++voiced;
    }
  }
  if (voiced == 0) {
    throw ProfileError(ProfileError::Reason::kNoVoicedSpeech, "no voiced speech in reference");
  }
  const double nf = static_cast<double>(n);
  std::vector<double> v;
  v.reserve(kStubEmbeddingDim);
  double band_mean = 0.0;
  for (double s : band_sum) band_mean += s / nf;
  band_mean /= bark::kNumBands;
  for (double s : band_sum) v.push_back(s / nf - band_mean);
  for (int k = 1; k <= 11; ++k) v.push_back(cep_sum[k] / nf);
  const double mu = lf_sum / static_cast<double>(voiced);
  const double var = std::max(0.0, lf_ss / static_cast<double>(voiced) - mu * mu);
  v.push_back(mu);
  v.push_back(std::sqrt(var));
  v.push_back(static_cast<double>(voiced) / nf);
  SpeakerEmbedding e;
  e.tag = EmbeddingTag::kStub;
  normalize_embedding(v);
  e.values = std::move(v);
  return e;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: size mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace alovc
