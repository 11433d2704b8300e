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

// Log-F0 statistics, the mean/variance pitch transform and the causal pitch
// predictor.
//
// Statistics use voiced frames only, natural log of F0 in Hz, and the
// population standard deviation.

#ifndef ALOVC_PROSODY_H_
#define ALOVC_PROSODY_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "alovc/frontend.h"
#include "alovc/nn/layers.h"

namespace alovc {

// Fewest voiced frames accepted for a one-shot reference.
inline constexpr std::size_t kMinVoicedFrames = 10;

struct PitchStats {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t n_voiced = 0;

  bool operator==(const PitchStats&) const = default;
};

// Throws ProfileError(kNoVoicedSpeech) without voiced frames and
// ProfileError(kTooFewVoicedFrames) with fewer than `min_voiced`.
PitchStats estimate_stats(std::span<const ProsodyFrame> track,
                          std::size_t min_voiced = 1);

// exp((log f0_src - mu_src) * sigma_trg / sigma_src + mu_trg). With
// src.sigma == 0 only f0_src == exp(mu_src) is defined (maps to
// exp(mu_trg)); anything else throws ProfileError(kDegenerateSource).
double convert_f0(double f0_src, const PitchStats& src, const PitchStats& trg);

// Text form: "mu=<v>\nsigma=<v>\nn_voiced=<n>\n". Values round-trip exactly.
std::string format_stats(const PitchStats& stats);
PitchStats parse_stats(std::string_view text);  // throws ProfileError
void write_stats(const std::filesystem::path& path, const PitchStats& stats);
PitchStats read_stats(const std::filesystem::path& path);

// Streaming source-to-target pitch mapping. Source statistics are either
// fixed up front or accumulated causally from the voiced frames seen so far.
// While fewer than kMinVoicedFrames have been seen, or the source spread is
// zero, the map degrades to a pure mean shift.
class PitchConverter {
 public:
  explicit PitchConverter(const PitchStats& target,
                          std::optional<PitchStats> fixed_source = std::nullopt);

  // Unvoiced frames pass through untouched.
  ProsodyFrame convert(const ProsodyFrame& src);
  void reset();

  const PitchStats& target() const { return target_; }
  // Source statistics in effect after the last convert() call.
  PitchStats source() const;

 private:
  PitchStats target_;
  std::optional<PitchStats> fixed_;
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct PredictorOutput {
  double f0 = 0.0;  // refined target F0, 0 when vuf == 0
  int vuf = 0;
  std::array<float, 2> variance{};  // raw projection output
};

// Four causal convs + LSTM + 2-D projection over (log F0 or 0, VUF).
// The projection is the pitch-variance feature; its first entry is a log-F0
// residual and its second a voicing logit.
class PitchPredictor {
 public:
  using State = nn::Sequential::State;

  // Throws BundleError(kTopology) unless the bundle holds a zero-lookahead
  // "pitch_predictor" model mapping 2 -> 2.
  explicit PitchPredictor(const nn::Bundle& bundle);

  State make_state() const { return net_.make_state(); }

  // `fallback_f0` is the base used when the input frame is unvoiced but the
  // predictor voices it.
  PredictorOutput step(State& state, double f0_trg, int vuf,
                       double fallback_f0 = 100.0) const;

 private:
  nn::Sequential net_;
};

}  // namespace alovc

#endif  // ALOVC_PROSODY_H_
