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

// alovc: command-line front end for the streaming conversion engine.
//
// Exit codes: 0 ok, 1 usage, 2 input format, 3 weight bundle, 4 target
// profile, 5 file I/O. All results go to stdout as key=value lines.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "alovc/config.h"
#include "alovc/engine.h"
#include "alovc/errors.h"
#include "alovc/kernels.h"
#include "alovc/model_config.h"

namespace fs = std::filesystem;
using namespace alovc;

namespace {

void kv(const std::string& key, const std::string& value) {
  std::printf("%s=%s\n", key.c_str(), value.c_str());
}

void kv(const std::string& key, double value, int precision = 6) {
  std::printf("%s=%.*f\n", key.c_str(), precision, value);
}

void kv(const std::string& key, std::size_t value) {
  std::printf("%s=%zu\n", key.c_str(), value);
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing ") + flag);
  if (!fs::is_regular_file(path)) throw IoError(std::string(flag) + ": no such file '" + path + "'");
}

nn::Bundle load_weights(const std::string& path) {
  if (path.empty()) {
    throw BundleError(BundleError::Kind::kFormat, "missing --weights: a weight bundle is required");
  }
  if (!fs::is_regular_file(path)) {
    throw BundleError(BundleError::Kind::kFormat, "--weights: no such file '" + path + "'");
  }
  return nn::Bundle::read_file(path);
}

VufMode parse_vuf_mode(const std::string& s) {
  if (s == "strict") return VufMode::kStrict;
  if (s == "predicted") return VufMode::kPredicted;
  throw UsageError("vuf_mode must be strict or predicted, got '" + s + "'");
}

PeriodEncoding parse_period_encoding(const std::string& s) {
  if (s == "samples") return PeriodEncoding::kSamples;
  if (s == "normalized") return PeriodEncoding::kNormalized;
  throw UsageError("period_encoding must be samples or normalized, got '" + s + "'");
}

void print_latency(const LatencyBudget& b) {
  kv("latency_window_centering_ms", b.window_centering_ms, 1);
  kv("latency_acoustic_lookahead_ms", b.acoustic_lookahead_ms, 1);
  kv("latency_conversion_lookahead_ms", b.conversion_lookahead_ms, 1);
  kv("latency_vocoder_lookahead_ms", b.vocoder_lookahead_ms, 1);
  kv("latency_algorithmic_ms", b.total_algorithmic_ms(), 1);
  kv("latency_reference_ms", b.reference_ms, 1);
  kv("latency_minus_reference_ms", b.total_algorithmic_ms() - b.reference_ms, 1);
}

void print_stages(const RunMetrics& m) {
  for (int i = 0; i < kNumStages; ++i) {
    const std::string name(stage_name(static_cast<Stage>(i)));
    kv("stage_" + name + "_ms_per_frame", m.per_stage_ms.at(name), 4);
  }
}

void print_stats(const PitchStats& s) {
  kv("mu", s.mu, 9);
  kv("sigma", s.sigma, 9);
  kv("n_voiced", s.n_voiced);
  kv("log", "natural");
  kv("std", "population");
  kv("degenerate_pitch", std::string(s.sigma < kDegeneratePitchSigma ? "1" : "0"));
}

struct ConvertArgs {
  std::string source, target_ref, profile, embedding, weights, out, features, source_stats;
  std::optional<long> chunk_size;
  std::string vuf_mode, period_encoding;
  std::optional<double> vocoder_lookahead_ms;
};

int cmd_convert(const ConvertArgs& a, CliConfig cfg) {
  if (!a.weights.empty()) cfg.set("weights", a.weights);
  if (a.chunk_size) cfg.set("chunk_size", std::to_string(*a.chunk_size));
  if (!a.vuf_mode.empty()) cfg.set("vuf_mode", a.vuf_mode);
  if (!a.period_encoding.empty()) cfg.set("period_encoding", a.period_encoding);
  if (!a.source_stats.empty()) cfg.set("source_stats", a.source_stats);
  if (a.vocoder_lookahead_ms) cfg.set("vocoder_lookahead_ms", std::to_string(*a.vocoder_lookahead_ms));

  // Validate everything before any work.
  if (a.out.empty() && a.features.empty()) throw UsageError("need --out and/or --export-features");
  if (a.target_ref.empty() == a.profile.empty()) {
    throw UsageError("give exactly one of --target-ref and --profile");
  }
  const VufMode mode = parse_vuf_mode(cfg.get("vuf_mode"));
  const PeriodEncoding enc = parse_period_encoding(cfg.get("period_encoding"));
  const long chunk = cfg.get_int("chunk_size");
  if (chunk < 0) throw UsageError("chunk_size must be >= 0");
  const long threads = cfg.get_int("threads");
  if (threads < 1) throw UsageError("threads must be >= 1");
  require_file(a.source, "--source");
  if (!a.target_ref.empty()) require_file(a.target_ref, "--target-ref");
  if (!a.profile.empty()) require_file(a.profile, "--profile");
  if (!a.embedding.empty()) require_file(a.embedding, "--embedding");
  if (!cfg.get("source_stats").empty()) require_file(cfg.get("source_stats"), "source_stats");

  const nn::Bundle bundle = load_weights(cfg.get("weights"));
  const EngineModels models(bundle, mode);
  const Audio source = read_wav(a.source);
  TargetProfile profile;
  if (!a.profile.empty()) {
    profile = read_profile(a.profile);
  } else {
    std::optional<fs::path> emb;
    if (!a.embedding.empty()) emb = a.embedding;
    profile = prepare_target(read_wav(a.target_ref), emb);
  }

  kernels::set_num_threads(static_cast<int>(threads));
  EngineConfig ec;
  ec.pitch.f0_min = cfg.get_double("f0_min");
  ec.pitch.f0_max = cfg.get_double("f0_max");
  ec.pitch.voicing_threshold = cfg.get_double("voicing_threshold");
  ec.vocoder.lookahead_ms = cfg.get_double("vocoder_lookahead_ms");
  ec.vocoder.seed = static_cast<std::uint64_t>(cfg.get_int("vocoder_seed"));
  ec.output = a.out.empty() ? OutputMode::kExportFeatures : OutputMode::kSimpleVocoder;
  if (!cfg.get("source_stats").empty()) ec.source_stats = read_stats(cfg.get("source_stats"));

  const std::size_t sizes[] = {static_cast<std::size_t>(chunk)};
  const auto r = run_streaming(source, profile, models, ec,
                               chunk > 0 ? std::span<const std::size_t>(sizes)
                                         : std::span<const std::size_t>());
  if (!a.out.empty()) write_wav(a.out, r.audio);
  if (!a.features.empty()) export_lpcnet_features(r.frames, a.features, enc);

  kv("frames_processed", r.metrics.frames_processed);
  kv("flush_frames", r.metrics.flush_frames);
  kv("source_duration_s", source.duration_s(), 3);
  if (!a.out.empty()) kv("output_duration_s", static_cast<double>(r.audio.size()) / kSampleRate, 3);
  if (!a.features.empty()) kv("feature_bytes", r.frames.size() * kFeatureRecordFloats * 4);
  kv("vuf_mode", cfg.get("vuf_mode"));
  kv("speaker_embedding_tag", std::string(embedding_tag_name(profile.embedding.tag)));
  kv("rtf", r.metrics.rtf, 2);
  kv("wall_ms", r.metrics.wall_ms, 1);
  print_stages(r.metrics);
  print_latency(r.metrics.latency);
  return 0;
}

int cmd_stats(const std::string& ref, const std::string& out) {
  require_file(ref, "--ref");
  if (out.empty()) throw UsageError("missing --out");
  const Audio audio = read_wav(ref);
  const PitchStats s = estimate_stats(pitch_track(audio), kMinVoicedFrames);
  write_stats(out, s);
  print_stats(s);
  return 0;
}

int cmd_profile(const std::string& ref, const std::string& embedding, const std::string& out) {
  require_file(ref, "--ref");
  if (!embedding.empty()) require_file(embedding, "--embedding");
  if (out.empty()) throw UsageError("missing --out");
  std::optional<fs::path> emb;
  if (!embedding.empty()) emb = embedding;
  const TargetProfile p = prepare_target(read_wav(ref), emb);
  write_profile(out, p);
  print_stats(p.stats);
  kv("embedding_dim", p.embedding.dim());
  kv("embedding_tag", std::string(embedding_tag_name(p.embedding.tag)));
  return 0;
}

int cmd_bench(const std::string& weights, std::optional<double> seconds, std::optional<int> reps,
              CliConfig cfg) {
  if (!weights.empty()) cfg.set("weights", weights);
  if (seconds) cfg.set("bench_seconds", std::to_string(*seconds));
  if (reps) cfg.set("bench_reps", std::to_string(*reps));
  BenchOptions opt;
  opt.seconds = cfg.get_double("bench_seconds");
  opt.repetitions = static_cast<int>(cfg.get_int("bench_reps"));
  if (opt.repetitions < 1) throw UsageError("--reps must be >= 1");
  if (!(opt.seconds >= 0.1)) throw UsageError("--seconds must be >= 0.1");
  const nn::Bundle bundle = load_weights(cfg.get("weights"));
  const RunMetrics m = bench(bundle, opt);

  kv("threads", std::size_t{1});
  kv("seconds", opt.seconds, 2);
  kv("reps", static_cast<std::size_t>(opt.repetitions));
  kv("frames_processed", m.frames_processed);
  std::string samples;
  char buf[32];
  for (double r : m.rtf_samples) {
    std::snprintf(buf, sizeof buf, "%s%.4f", samples.empty() ? "" : ",", r);
    samples += buf;
  }
  kv("rtf_samples", samples);
  kv("rtf", m.rtf, 2);
  kv("rtf_reference", 0.78, 2);
  print_stages(m);
  print_latency(m.latency);
  return 0;
}

int cmd_inspect(const std::string& weights) {
  const nn::Bundle b = load_weights(weights);
  std::size_t manifest_sum = 0;
  for (const auto& t : b.tensors()) manifest_sum += t.data.size();
  kv("models", b.models().size());
  for (const auto& m : b.models()) {
    const std::string p = "model." + m.name;
    kv(p + ".topology", m.topology);
    kv(p + ".layers", m.layers.size());
    kv(p + ".lookahead_frames", static_cast<std::size_t>(m.lookahead()));
    kv(p + ".param_count", b.param_count(m.name));
    for (const auto& l : m.layers) {
      std::string desc = l.kind + " " + std::to_string(l.in) + "->" + std::to_string(l.out);
      if (l.kind == "conv1d" || l.kind == "conformer") desc += " kernel=" + std::to_string(l.kernel);
      if (l.lookahead) desc += " lookahead=" + std::to_string(l.lookahead);
      if (l.hidden) desc += " hidden=" + std::to_string(l.hidden);
      if (l.activation != nn::Activation::kNone) {
        desc += " activation=" + std::string(nn::activation_name(l.activation));
      }
      kv(p + ".layer." + l.name, desc);
    }
    for (const auto& [k, v] : m.meta) kv(p + ".meta." + k, v);
  }
  kv("param_count", b.param_count());
  kv("manifest_sum", manifest_sum);
  kv("reference_acoustic_params", std::size_t{2700000});
  kv("reference_conversion_params", std::size_t{5600000});
  return 0;
}

int cmd_gen_weights(const std::string& out, const std::string& scale, std::uint64_t seed,
                    bool zero) {
  if (out.empty()) throw UsageError("missing --out");
  ModelConfig mc;
  if (scale == "toy") mc = ModelConfig::toy();
  else if (scale == "full") mc = ModelConfig::full();
  else throw UsageError("--scale must be toy or full");
  const nn::Bundle b = zero ? make_bundle(mc) : make_random_bundle(mc, seed);
  b.write_file(out);
  kv("path", out);
  kv("param_count", b.param_count());
  for (const auto& m : b.models()) kv("model." + m.name + ".param_count", b.param_count(m.name));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming low-latency one-shot voice conversion"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "convert a source WAV to the target voice");
  convert->add_option("--source", ca.source, "16 kHz mono 16-bit source WAV");
  convert->add_option("--target-ref", ca.target_ref, "target reference WAV (>= 1 s)");
  convert->add_option("--profile", ca.profile, "target profile manifest (instead of --target-ref)");
  convert->add_option("--embedding", ca.embedding, "speaker embedding file (default: built-in stub)");
  convert->add_option("--weights", ca.weights, "weight bundle");
  convert->add_option("--out", ca.out, "output WAV");
  convert->add_option("--export-features", ca.features, "write 20-float feature records here");
  convert->add_option("--chunk-size", ca.chunk_size, "samples per streaming chunk (0 = whole file)");
  convert->add_option("--vuf-mode", ca.vuf_mode, "strict or predicted");
  convert->add_option("--period-encoding", ca.period_encoding, "samples or normalized");
  convert->add_option("--source-stats", ca.source_stats, "fixed source pitch statistics file");
  convert->add_option("--vocoder-lookahead-ms", ca.vocoder_lookahead_ms,
                      "declared vocoder lookahead for latency reports");

  std::string stats_ref, stats_out;
  auto* stats = app.add_subcommand("stats", "write log-F0 statistics of a reference WAV");
  stats->add_option("--ref", stats_ref, "reference WAV");
  stats->add_option("--out", stats_out, "stats file");

  std::string prof_ref, prof_emb, prof_out;
  auto* profile = app.add_subcommand("profile", "write a target profile (embedding + stats)");
  profile->add_option("--ref", prof_ref, "reference WAV");
  profile->add_option("--embedding", prof_emb, "speaker embedding file (default: built-in stub)");
  profile->add_option("--out", prof_out, "profile manifest path");

  std::string bench_weights;
  std::optional<double> bench_seconds;
  std::optional<int> bench_reps;
  auto* benchc = app.add_subcommand("bench", "single-core real-time-factor benchmark");
  benchc->add_option("--weights", bench_weights, "weight bundle");
  benchc->add_option("--seconds", bench_seconds, "input duration (default 5)");
  benchc->add_option("--reps", bench_reps, "repetitions (default 5)");

  std::string inspect_weights;
  auto* inspect = app.add_subcommand("inspect", "print bundle topology and parameter counts");
  inspect->add_option("--weights", inspect_weights, "weight bundle");

  std::string gen_out, gen_scale = "toy";
  std::uint64_t gen_seed = 1;
  bool gen_zero = false;
  auto* gen = app.add_subcommand("gen-weights", "write a random or zero weight bundle");
  gen->add_option("--out", gen_out, "bundle path");
  gen->add_option("--scale", gen_scale, "toy or full");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_flag("--zero", gen_zero, "all-zero weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorClass::kUsage);
  }

  try {
    CliConfig cfg = config_path.empty() ? CliConfig() : CliConfig::load(config_path);
    if (*convert) return cmd_convert(ca, cfg);
    if (*stats) return cmd_stats(stats_ref, stats_out);
    if (*profile) return cmd_profile(prof_ref, prof_emb, prof_out);
    if (*benchc) return cmd_bench(bench_weights, bench_seconds, bench_reps, cfg);
    if (*inspect) return cmd_inspect(inspect_weights);
    if (*gen) return cmd_gen_weights(gen_out, gen_scale, gen_seed, gen_zero);
  } catch (const Error& e) {
    std::fprintf(stderr, "alovc: %s\n", e.what());
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "alovc: %s\n", e.what());
    return static_cast<int>(ErrorClass::kUsage);
  }
  return static_cast<int>(ErrorClass::kUsage);
}
