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

#include "alovc/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "alovc/errors.h"
#include "alovc/kernels.h"
#include "alovc/synth.h"

#ifdef __linux__
#include <sched.h>
#endif

namespace alovc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void pin_to_current_cpu() {
#ifdef __linux__
  const int cpu = sched_getcpu();
  if (cpu < 0) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  sched_setaffinity(0, sizeof set, &set);
#endif
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

LatencyBudget latency_budget(const FrameConfig& frame, int acoustic_frames,
                             int conversion_frames, double vocoder_ms) {
  LatencyBudget b;
  b.hop_ms = frame.hop_ms();
  b.window_centering_ms = 0.5 * 1000.0 * frame.window / frame.sample_rate;
  b.acoustic_lookahead_ms = acoustic_frames * b.hop_ms;
  b.conversion_lookahead_ms = conversion_frames * b.hop_ms;
  b.vocoder_lookahead_ms = vocoder_ms;
  return b;
}

std::vector<ProsodyFrame> pitch_track(const Audio& audio, const PitchConfig& cfg) {
  const FrameConfig fc;
  const std::size_t n = frame_count(audio.samples.size(), fc);
  std::vector<ProsodyFrame> track;
  track.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t end = t * fc.hop + fc.window;
    const std::size_t begin = end > static_cast<std::size_t>(cfg.history) ? end - cfg.history : 0;
    track.push_back(detect_pitch({audio.samples.data() + begin, end - begin}, cfg, fc.sample_rate));
  }
  return track;
}

TargetProfile prepare_target(const Audio& reference,
                             const std::optional<std::filesystem::path>& embedding_path) {
  if (reference.samples.size() < static_cast<std::size_t>(reference.sample_rate)) {
    throw ProfileError(ProfileError::Reason::kTooShort,
                       "reference audio must be at least 1 s long");
  }
  TargetProfile p;
  const auto track = pitch_track(reference);
  p.stats = estimate_stats(track, kMinVoicedFrames);
  p.degenerate_pitch = p.stats.sigma < kDegeneratePitchSigma;
  p.embedding = embedding_path ? load_embedding(*embedding_path) : stub_embedding(reference);
  return p;
}

void write_profile(const std::filesystem::path& manifest, const TargetProfile& profile) {
  const auto stem = manifest.stem().string();
  const auto dir = manifest.parent_path();
  const std::string emb = stem + ".embedding";
  const std::string stats = stem + ".stats";
  write_embedding(dir / emb, profile.embedding);
  write_stats(dir / stats, profile.stats);
  write_text(manifest, "embedding=" + emb + "\nstats=" + stats + "\n");
}

TargetProfile read_profile(const std::filesystem::path& manifest) {
  const std::string text = read_text(manifest);
  std::optional<std::filesystem::path> emb, stats;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    if (eq == std::string::npos) {
      throw ProfileError(ProfileError::Reason::kMismatch, "profile manifest: bad line '" + line + "'");
    }
    std::filesystem::path value = line.substr(eq + 1);
    if (value.is_relative()) value = manifest.parent_path() / value;
    if (key == "embedding") emb = value;
    else if (key == "stats") stats = value;
    else throw ProfileError(ProfileError::Reason::kMismatch, "profile manifest: unknown key '" + key + "'");
  }
  if (!emb || !stats) {
    throw ProfileError(ProfileError::Reason::kMismatch, "profile manifest needs embedding= and stats=");
  }
  TargetProfile p;
  p.embedding = load_embedding(*emb);
  p.stats = read_stats(*stats);
  p.degenerate_pitch = p.stats.sigma < kDegeneratePitchSigma;
  return p;
}

std::string serialize_profile(const TargetProfile& profile) {
  return format_embedding(profile.embedding) + format_stats(profile.stats);
}

EngineModels::EngineModels(const nn::Bundle& bundle, VufMode mode)
    : acoustic(bundle), predictor(bundle), conversion(bundle, mode) {
  if (acoustic.ppg_dim() != conversion.ppg_dim()) {
    throw BundleError(BundleError::Kind::kTopology,
                      "acoustic PPG width " + std::to_string(acoustic.ppg_dim()) +
                          " != conversion input " + std::to_string(conversion.ppg_dim()));
  }
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kInputOutput:
      return "input_output";
    case Stage::kPpgExtraction:
      return "ppg_extraction";
    case Stage::kPitchConversion:
      return "pitch_conversion";
    case Stage::kSpeechConversion:
      return "speech_conversion";
    case Stage::kWaveformGeneration:
      return "waveform_generation";
  }
  return "";
}

Stream::Stream(const EngineModels& models, const TargetProfile& profile, const EngineConfig& cfg)
    : models_(models),
      cfg_(cfg),
      fallback_f0_(std::exp(profile.stats.mu)),
      front_(cfg.frame, cfg.pitch, cfg.mfcc),
      acoustic_(models.acoustic.make_state()),
      converter_(profile.stats, cfg.source_stats),
      predictor_(models.predictor.make_state()),
      conversion_(models.conversion.make_state(profile.embedding.values)),
      vocoder_(cfg.vocoder) {}

LatencyBudget Stream::latency() const {
  return latency_budget(cfg_.frame, models_.acoustic.lookahead(), models_.conversion.lookahead(),
                        cfg_.vocoder.lookahead_ms);
}

void Stream::push(std::span<const float> chunk, std::vector<float>& out) {
  if (finished_) throw std::logic_error("stream already finished");
  auto t0 = Clock::now();
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
  received_ += chunk.size();
  add_stage_time(Stage::kInputOutput, seconds_since(t0));
  const auto hop = static_cast<std::size_t>(cfg_.frame.hop);
  const auto window = static_cast<std::size_t>(cfg_.frame.window);
  while (received_ >= next_frame_ * hop + window) analyze_frame(out);

  // Keep only the pitch history the next frame needs.
  t0 = Clock::now();
  const std::size_t next_end = next_frame_ * hop + window;
  const auto history = static_cast<std::size_t>(std::max(cfg_.pitch.history, cfg_.frame.window));
  const std::size_t keep_from = next_end > history ? next_end - history : 0;
  if (keep_from > buffer_start_ + 8192) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(keep_from - buffer_start_));
    buffer_start_ = keep_from;
  }
  add_stage_time(Stage::kInputOutput, seconds_since(t0));
}

void Stream::analyze_frame(std::vector<float>& out) {
  const auto hop = static_cast<std::size_t>(cfg_.frame.hop);
  const auto window = static_cast<std::size_t>(cfg_.frame.window);
  const auto history = static_cast<std::size_t>(std::max(cfg_.pitch.history, cfg_.frame.window));
  const std::size_t end = next_frame_ * hop + window;
  const std::size_t begin = std::max(buffer_start_, end > history ? end - history : 0);
  const std::span<const float> recent(buffer_.data() + (begin - buffer_start_), end - begin);
  ++next_frame_;

  auto t0 = Clock::now();
  const AnalysisFrame a = front_.process(recent);
  auto ppg = models_.acoustic.step(acoustic_, a.acoustic);
  add_stage_time(Stage::kPpgExtraction, seconds_since(t0));

  t0 = Clock::now();
  const ProsodyFrame converted = converter_.convert(a.prosody);
  const PredictorOutput pred =
      models_.predictor.step(predictor_, converted.f0, converted.vuf, fallback_f0_);
  PitchFeatures pf;
  pf.variance = pred.variance;
  if (models_.conversion.mode() == VufMode::kStrict) {
    pf.f0 = converted.f0;
    pf.vuf = converted.vuf;
    pf.correlation = a.prosody.correlation;
  } else {
    pf.f0 = pred.vuf ? pred.f0 : fallback_f0_;
    pf.vuf = pred.vuf;
    pf.correlation = a.prosody.correlation;
  }
  pending_.push_back(pf);
  add_stage_time(Stage::kPitchConversion, seconds_since(t0));

  if (ppg) emit(*ppg, out);
}

void Stream::emit(const PpgOutput& ppg, std::vector<float>& out) {
  const PitchFeatures pf = pending_.front();
  pending_.pop_front();
  auto t0 = Clock::now();
  const VocoderFrame vf = models_.conversion.step(conversion_, ppg.ppg, pf);
  frames_.push_back(vf);
  add_stage_time(Stage::kSpeechConversion, seconds_since(t0));
  if (cfg_.output == OutputMode::kSimpleVocoder) {
    t0 = Clock::now();
    vocoder_.synthesize(vf, out);
    add_stage_time(Stage::kWaveformGeneration, seconds_since(t0));
  }
}

void Stream::finish(std::vector<float>& out) {
  if (finished_) throw std::logic_error("stream already finished");
  if (next_frame_ == 0) {
    throw InputError("input too short: " + std::to_string(received_) +
                     " samples, need at least " + std::to_string(cfg_.frame.window));
  }
  finished_ = true;
  // A tail longer than half a hop past the last full window gets one more,
  // zero-padded frame so the output stays within half a hop of the source.
  const auto hop = static_cast<std::size_t>(cfg_.frame.hop);
  const auto window = static_cast<std::size_t>(cfg_.frame.window);
  const std::size_t tail = received_ - ((next_frame_ - 1) * hop + window);
  if (2 * tail > hop) {
    buffer_.resize(buffer_.size() + (hop - tail), 0.0f);
    ++flush_frames_;
    analyze_frame(out);
  }
  auto t0 = Clock::now();
  auto owed = models_.acoustic.flush(acoustic_);
  add_stage_time(Stage::kPpgExtraction, seconds_since(t0));
  for (const auto& ppg : owed) emit(ppg, out);
}

RunResult run_streaming(const Audio& source, const TargetProfile& profile,
                        const EngineModels& models, const EngineConfig& cfg,
                        std::span<const std::size_t> chunk_sizes) {
  if (source.sample_rate != kSampleRate) {
    throw InputError("expected 16000 Hz, got " + std::to_string(source.sample_rate) + " Hz");
  }
  const auto t0 = Clock::now();
  RunResult r;
  Stream stream(models, profile, cfg);
  const auto& s = source.samples;
  std::size_t pos = 0, ci = 0;
  while (pos < s.size()) {
    std::size_t len = s.size() - pos;
    if (!chunk_sizes.empty()) {
      len = std::min(len, std::max<std::size_t>(1, chunk_sizes[ci++ % chunk_sizes.size()]));
    }
    stream.push({s.data() + pos, len}, r.audio);
    pos += len;
  }
  stream.finish(r.audio);
  const double wall = seconds_since(t0);

  r.frames = stream.frames();
  auto& m = r.metrics;
  m.frames_processed = stream.frames_analyzed();
  m.flush_frames = stream.flush_frames();
  m.audio_s = source.duration_s();
  m.wall_ms = 1000.0 * wall;
  m.rtf = wall / m.audio_s;
  m.latency = stream.latency();
  m.reported_latency_ms = m.latency.total_algorithmic_ms();
  for (int i = 0; i < kNumStages; ++i) {
    m.per_stage_ms[std::string(stage_name(static_cast<Stage>(i)))] =
        1000.0 * stream.stage_seconds()[i] / static_cast<double>(m.frames_processed);
  }
  return r;
}

RunMetrics bench(const nn::Bundle& bundle, const BenchOptions& opt) {
  if (opt.repetitions < 1) throw std::invalid_argument("bench needs at least one repetition");
  if (!(opt.seconds >= 0.1)) throw std::invalid_argument("bench needs at least 0.1 s of audio");
  setenv("ALOVC_THREADS", "1", 1);
  kernels::set_num_threads(1);
  if (opt.pin_cpu) pin_to_current_cpu();

  const EngineModels models(bundle);
  const Audio reference = synth::speech_like(3.0, 220.0, 7);
  TargetProfile profile = prepare_target(reference, std::nullopt);
  const auto dim = static_cast<std::size_t>(models.conversion.speaker_dim());
  if (profile.embedding.dim() != dim) {
    // Timing does not depend on the embedding's values; any unit vector of
    // the right width will do.
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = std::cos(0.37 * static_cast<double>(i + 1));
    normalize_embedding(v);
    profile.embedding.values = std::move(v);
  }
  const auto wav = encode_wav(synth::speech_like(opt.seconds, 120.0, 11).samples);
  const std::size_t chunk = std::max<std::size_t>(1, opt.chunk_size);

  std::vector<RunMetrics> runs;
  for (int rep = 0; rep < opt.repetitions; ++rep) {
    const auto t0 = Clock::now();
    auto t_io = Clock::now();
    const Audio source = decode_wav(wav);
    double io_s = seconds_since(t_io);
    std::vector<float> out;
    out.reserve(source.samples.size());
    Stream stream(models, profile);
    for (std::size_t pos = 0; pos < source.samples.size(); pos += chunk) {
      const std::size_t len = std::min(chunk, source.samples.size() - pos);
      stream.push({source.samples.data() + pos, len}, out);
    }
    stream.finish(out);
    t_io = Clock::now();
    const auto encoded = encode_wav(out);
    io_s += seconds_since(t_io);
    stream.add_stage_time(Stage::kInputOutput, io_s);
    const double wall = seconds_since(t0);
    if (encoded.empty()) throw std::logic_error("bench produced no output");

    RunMetrics m;
    m.frames_processed = stream.frames_analyzed();
    m.flush_frames = stream.flush_frames();
  m.flush_frames = stream.flush_frames();
    m.audio_s = source.duration_s();
    m.wall_ms = 1000.0 * wall;
    m.rtf = wall / m.audio_s;
    m.latency = stream.latency();
    m.reported_latency_ms = m.latency.total_algorithmic_ms();
    for (int i = 0; i < kNumStages; ++i) {
      m.per_stage_ms[std::string(stage_name(static_cast<Stage>(i)))] =
          1000.0 * stream.stage_seconds()[i] / static_cast<double>(m.frames_processed);
    }
    runs.push_back(std::move(m));
  }
  std::vector<double> rtfs;
  for (const auto& m : runs) rtfs.push_back(m.rtf);
  const double med = median(rtfs);
  // Stage breakdown from the run closest to the median.
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (std::abs(runs[i].rtf - med) < std::abs(runs[best].rtf - med)) best = i;
  }
  RunMetrics result = runs[best];
  result.rtf = med;
  result.rtf_samples = rtfs;
  return result;
}

}  // namespace alovc
