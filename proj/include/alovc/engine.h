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

// End-to-end streaming conversion: front end -> acoustic model -> pitch
// mapping and predictor -> conversion network -> vocoder (or feature
// export), with latency accounting and a real-time-factor benchmark.
//
// Timing: analysis frame t covers source samples [160t, 160t+400). Its
// converted audio occupies output samples [160t, 160t+160), so output sample
// k stands for source time k + 200 (the window centre). Output for frame t
// is produced once frame t+1 has been analysed. At the end of the stream a
// tail of more than half a hop past the last full window is zero-padded into
// one flush frame, so output length is (full windows + flush frames) * hop.

#ifndef ALOVC_ENGINE_H_
#define ALOVC_ENGINE_H_

#include <array>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alovc/acoustic_model.h"
#include "alovc/conversion_model.h"
#include "alovc/frontend.h"
#include "alovc/prosody.h"
#include "alovc/speaker_embedding.h"
#include "alovc/vocoder.h"

namespace alovc {

// Algorithmic (lookahead-only) latency, assembled from per-stage
// declarations.
struct LatencyBudget {
  static constexpr double kReferenceLatencyMs = 47.5;

  double window_centering_ms = 0.0;
  double acoustic_lookahead_ms = 0.0;
  double conversion_lookahead_ms = 0.0;
  double vocoder_lookahead_ms = 0.0;
  double hop_ms = 0.0;
  double reference_ms = kReferenceLatencyMs;

  double total_algorithmic_ms() const {
    return window_centering_ms + acoustic_lookahead_ms + conversion_lookahead_ms +
           vocoder_lookahead_ms;
  }
};

LatencyBudget latency_budget(const FrameConfig& frame, int acoustic_frames,
                             int conversion_frames, double vocoder_ms);

// Spread below which a reference counts as monotone.
inline constexpr double kDegeneratePitchSigma = 1e-3;

struct TargetProfile {
  SpeakerEmbedding embedding;
  PitchStats stats;
  bool degenerate_pitch = false;
};

// Frame-by-frame pitch track of a whole recording.
std::vector<ProsodyFrame> pitch_track(const Audio& audio, const PitchConfig& cfg = {});

// Embedding from `embedding_path` when given, else the built-in stub.
// Throws InputError below one second and ProfileError from the statistics
// or embedding steps (fewer than kMinVoicedFrames voiced frames included).
TargetProfile prepare_target(const Audio& reference,
                             const std::optional<std::filesystem::path>& embedding_path);

// Manifest: "embedding=<path>\nstats=<path>\n", paths relative to the
// manifest's directory. write_profile places "<stem>.embedding" and
// "<stem>.stats" beside the manifest.
void write_profile(const std::filesystem::path& manifest, const TargetProfile& profile);
TargetProfile read_profile(const std::filesystem::path& manifest);
// Embedding text followed by stats text; equal profiles give equal bytes.
std::string serialize_profile(const TargetProfile& profile);

// Networks shared (read-only) by any number of streams.
struct EngineModels {
  explicit EngineModels(const nn::Bundle& bundle, VufMode mode = VufMode::kStrict);

  AcousticModel acoustic;
  PitchPredictor predictor;
  ConversionModel conversion;
};

enum class OutputMode { kSimpleVocoder, kExportFeatures };

struct EngineConfig {
  FrameConfig frame;
  PitchConfig pitch;
  MfccConfig mfcc;
  VocoderConfig vocoder;
  OutputMode output = OutputMode::kSimpleVocoder;
  // Fixed source statistics; otherwise they are accumulated causally.
  std::optional<PitchStats> source_stats;
};

enum class Stage {
  kInputOutput,
  kPpgExtraction,
  kPitchConversion,
  kSpeechConversion,
  kWaveformGeneration,
};
inline constexpr int kNumStages = 5;
std::string_view stage_name(Stage s);

// One conversion stream. Samples may arrive in chunks of any size; output
// depends only on the concatenated input.
class Stream {
 public:
  Stream(const EngineModels& models, const TargetProfile& profile,
         const EngineConfig& cfg = {});

  // Appends every output sample that became available.
  void push(std::span<const float> chunk, std::vector<float>& out);
  // Drains lookahead with zero-padded future. Throws InputError when fewer
  // than one window of samples was pushed, std::logic_error when repeated.
  void finish(std::vector<float>& out);

  // Every synthesized frame, flush frame included.
  const std::vector<VocoderFrame>& frames() const { return frames_; }
  // Full analysis windows only.
  std::size_t frames_analyzed() const { return next_frame_ - flush_frames_; }
  std::size_t flush_frames() const { return flush_frames_; }
  LatencyBudget latency() const;
  // Accumulated seconds per stage.
  const std::array<double, kNumStages>& stage_seconds() const { return stage_s_; }
  void add_stage_time(Stage s, double seconds) { stage_s_[static_cast<int>(s)] += seconds; }

 private:
  void analyze_frame(std::vector<float>& out);
  void emit(const PpgOutput& ppg, std::vector<float>& out);

  const EngineModels& models_;
  EngineConfig cfg_;
  double fallback_f0_;
  FrontEnd front_;
  AcousticModel::State acoustic_;
  PitchConverter converter_;
  PitchPredictor::State predictor_;
  ConversionModel::State conversion_;
  Vocoder vocoder_;
  std::vector<float> buffer_;
  std::size_t buffer_start_ = 0;  // absolute index of buffer_[0]
  std::size_t received_ = 0;
  std::size_t next_frame_ = 0;
  std::size_t flush_frames_ = 0;
  std::deque<PitchFeatures> pending_;
  std::vector<VocoderFrame> frames_;
  std::array<double, kNumStages> stage_s_{};
  bool finished_ = false;
};

struct RunMetrics {
  double rtf = 0.0;
  double wall_ms = 0.0;
  double audio_s = 0.0;
  std::map<std::string, double> per_stage_ms;  // mean ms per frame
  std::size_t frames_processed = 0;  // full analysis windows
  std::size_t flush_frames = 0;
  double reported_latency_ms = 0.0;
  LatencyBudget latency;
  std::vector<double> rtf_samples;  // one per benchmark repetition
};

struct RunResult {
  std::vector<float> audio;           // empty in feature-export mode
  std::vector<VocoderFrame> frames;
  RunMetrics metrics;
};

// Feeds `source` in chunks of the given sizes (cycled; empty = one chunk).
RunResult run_streaming(const Audio& source, const TargetProfile& profile,
                        const EngineModels& models, const EngineConfig& cfg = {},
                        std::span<const std::size_t> chunk_sizes = {});

struct BenchOptions {
  double seconds = 5.0;
  int repetitions = 5;
  std::size_t chunk_size = 160;
  bool pin_cpu = true;
};

// Single-thread, CPU-pinned conversion of a synthetic source. Each
// repetition covers WAV decode, streaming conversion and WAV encode; the
// reported RTF is the median, the stage breakdown comes from that run.
RunMetrics bench(const nn::Bundle& bundle, const BenchOptions& opt = {});

}  // namespace alovc

#endif  // ALOVC_ENGINE_H_
