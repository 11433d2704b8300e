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

#include "alovc/frontend.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "alovc/errors.h"
#include "alovc/kernels.h"

namespace alovc {
namespace {

constexpr double kPcmScale = 32768.0;

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

void check_finite(std::span<const float> samples, const char* what) {
  for (float s : samples) {
    if (!std::isfinite(s)) {
      throw InputError(std::string(what) + ": non-finite sample");
    }
  }
}

}  // namespace

void FrameConfig::validate() const {
  if (sample_rate != 16000) {
    throw InputError("expected 16000 Hz, got " + std::to_string(sample_rate) +
                     " Hz");
  }
  if (window <= 0 || hop <= 0) throw InputError("window and hop must be positive");
  if (hop > window) throw InputError("hop must not exceed window");
}

std::size_t frame_count(std::size_t n_samples, const FrameConfig& cfg) {
  cfg.validate();
  const auto window = static_cast<std::size_t>(cfg.window);
  if (n_samples < window) {
    throw InputError("input too short: " + std::to_string(n_samples) +
                     " samples, need at least " + std::to_string(window));
  }
  return (n_samples - window) / static_cast<std::size_t>(cfg.hop) + 1;
}

struct PowerSpectrum::Fft {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
};

PowerSpectrum::PowerSpectrum(int window)
    : window_(window), hann_(window), fft_(std::make_unique<Fft>()) {
  if (window <= 0 || window > kFftSize) {
    throw InputError("analysis window must be in [1, 512] samples");
  }
  for (int n = 0; n < window; ++n) {
    hann_[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / window);
    window_energy_ += hann_[n] * hann_[n];
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  fft_->in = fftw_alloc_real(kFftSize);
  fft_->out = fftw_alloc_complex(kNumBins);
  fft_->plan = fftw_plan_dft_r2c_1d(kFftSize, fft_->in, fft_->out,
                                    FFTW_ESTIMATE);
}

PowerSpectrum::~PowerSpectrum() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(fft_->plan);
  fftw_free(fft_->in);
  fftw_free(fft_->out);
}

std::span<const double> PowerSpectrum::compute(std::span<const float> frame) {
  if (frame.size() != static_cast<std::size_t>(window_)) {
    throw InputError("frame length " + std::to_string(frame.size()) +
                     " != window " + std::to_string(window_));
  }
  check_finite(frame, "spectrum");
  for (int n = 0; n < window_; ++n) {
    fft_->in[n] = hann_[n] * kPcmScale * frame[n];
  }
  std::fill(fft_->in + window_, fft_->in + kFftSize, 0.0);
  fftw_execute(fft_->plan);
  for (int k = 0; k < kNumBins; ++k) {
    const double re = fft_->out[k][0];
    const double im = fft_->out[k][1];
    power_[k] = re * re + im * im;
  }
  return power_;
}

MelFilterbank::MelFilterbank(const MfccConfig& cfg, int sample_rate)
    : cfg_(cfg) {
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(cfg.f_max);
  const int n = cfg.num_mels;
  std::vector<double> edges(n + 2);
  for (int i = 0; i < n + 2; ++i) {
    edges[i] = mel_lo + (mel_hi - mel_lo) * i / (n + 1);
  }
  weights_.assign(n, std::vector<double>(PowerSpectrum::kNumBins, 0.0));
  for (int m = 0; m < n; ++m) {
    const double lo = edges[m];
    const double center = edges[m + 1];
    const double hi = edges[m + 2];
    for (int k = 0; k < PowerSpectrum::kNumBins; ++k) {
      const double mel = hz_to_mel(PowerSpectrum::bin_hz(k, sample_rate));
      double w = 0.0;
      if (mel > lo && mel <= center) {
        w = (mel - lo) / (center - lo);
      } else if (mel > center && mel < hi) {
        w = (hi - mel) / (hi - center);
      }
      weights_[m][k] = w;
    }
  }
}

std::vector<double> MelFilterbank::log_energies(
    std::span<const double> power) const {
  std::vector<double> out(weights_.size());
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) e += weights_[m][k] * power[k];
    out[m] = std::log(std::max(e, cfg_.log_floor));
  }
  return out;
}

Mfcc39::Mfcc39(const MfccConfig& cfg, const FrameConfig& frame)
    : spectrum_(frame.window), mel_(cfg, frame.sample_rate) {}

std::array<double, kNumCeps> Mfcc39::cepstrum(
    std::span<const double> power) const {
  const std::vector<double> logs = mel_.log_energies(power);
  std::vector<double> ceps(logs.size());
  bark::dct2(logs, ceps);
  std::array<double, kNumCeps> out{};
  std::copy_n(ceps.begin(), kNumCeps, out.begin());
  return out;
}

std::array<float, kFeatureDim> Mfcc39::compute(std::span<const float> frame,
                                               MfccHistory& history) {
  const auto c = cepstrum(spectrum_.compute(frame));
  std::array<float, kFeatureDim> out{};
  for (int i = 0; i < kNumCeps; ++i) {
    const double delta = c[i] - history.prev1[i];
    const double prev_delta = history.prev1[i] - history.prev2[i];
    out[i] = static_cast<float>(c[i]);
    out[kNumCeps + i] = static_cast<float>(delta);
    out[2 * kNumCeps + i] = static_cast<float>(delta - prev_delta);
  }
  history.prev2 = history.prev1;
  history.prev1 = c;
  return out;
}

ProsodyFrame detect_pitch(std::span<const float> recent, const PitchConfig& cfg,
                          int sample_rate) {
  const auto history = static_cast<std::size_t>(cfg.history);
  const auto min_lag =
      static_cast<std::size_t>(std::ceil(sample_rate / cfg.f0_max));
  const auto max_lag =
      static_cast<std::size_t>(std::floor(sample_rate / cfg.f0_min));
  const std::size_t seg_len = history - max_lag;
  const std::size_t seg_start = max_lag;

  // Left zero-pad to the full history length.
  std::vector<double> buf(history, 0.0);
  const std::size_t take = std::min(history, recent.size());
  for (std::size_t i = 0; i < take; ++i) {
    const float s = recent[recent.size() - take + i];
    buf[history - take + i] = std::isfinite(s) ? s : 0.0;
  }

  std::vector<double> prefix(history + 1, 0.0);
  for (std::size_t i = 0; i < history; ++i) {
    prefix[i + 1] = prefix[i] + buf[i] * buf[i];
  }
  const double seg_energy = prefix[seg_start + seg_len] - prefix[seg_start];
  if (!(seg_energy > 0.0)) return {};

  const std::size_t num_lags = max_lag - min_lag + 1;
  std::vector<double> corr(num_lags);
  kernels::lagged_dot(buf, seg_start, seg_len, min_lag, corr);
  for (std::size_t k = 0; k < num_lags; ++k) {
    const std::size_t lag = min_lag + k;
    const double lag_energy =
        prefix[seg_start - lag + seg_len] - prefix[seg_start - lag];
    const double denom = std::sqrt(seg_energy * lag_energy);
    corr[k] = denom > 0.0 ? corr[k] / denom : 0.0;
  }

  const double peak = *std::max_element(corr.begin(), corr.end());
  ProsodyFrame out;
  out.correlation = std::clamp(peak, 0.0, 1.0);
  if (!(peak > cfg.voicing_threshold)) {
    return out;
  }
  std::size_t best = 0;
  for (std::size_t k = 0; k < num_lags; ++k) {
    const bool left_ok = k == 0 || corr[k] >= corr[k - 1];
    const bool right_ok = k + 1 == num_lags || corr[k] >= corr[k + 1];
    if (left_ok && right_ok && corr[k] >= cfg.octave_ratio * peak) {
      best = k;
      break;
    }
  }
  double lag = static_cast<double>(min_lag + best);
  if (best > 0 && best + 1 < num_lags) {
    const double a = corr[best - 1];
    const double b = corr[best];
    const double c = corr[best + 1];
    const double curvature = a - 2.0 * b + c;
    if (curvature < 0.0) lag += 0.5 * (a - c) / curvature;
  }
  out.correlation = std::clamp(corr[best], 0.0, 1.0);
  out.vuf = out.correlation > cfg.voicing_threshold ? 1 : 0;
  out.f0 = out.vuf ? std::clamp(sample_rate / lag, cfg.f0_min, cfg.f0_max) : 0.0;
  return out;
}

std::array<double, bark::kNumBands> band_log_energies(
    std::span<const double> power, double window_energy, double log_floor,
    int sample_rate) {
  std::array<double, bark::kNumBands> out{};
  for (int b = 0; b < bark::kNumBands; ++b) {
    double e = 0.0;
    double wsum = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double w =
          bark::band_weight(b, PowerSpectrum::bin_hz(static_cast<int>(k), sample_rate));
      e += w * power[k];
      wsum += w;
    }
    const double mean = wsum > 0.0 ? e / (wsum * window_energy) : 0.0;
    out[b] = std::log(std::max(mean, log_floor));
  }
  return out;
}

std::array<double, bark::kNumBands> bands_to_bscc(
    std::span<const double> band_log_energies) {
  std::array<double, bark::kNumBands> out{};
  bark::dct2(band_log_energies, out);
  return out;
}

std::array<double, bark::kNumBands> bscc_analyze(std::span<const float> frame) {
  thread_local PowerSpectrum spectrum(400);
  if (frame.size() != static_cast<std::size_t>(spectrum.window())) {
    throw InputError("bscc_analyze expects a 400-sample frame");
  }
  const auto power = spectrum.compute(frame);
  return bands_to_bscc(band_log_energies(power, spectrum.window_energy()));
}

FrontEnd::FrontEnd(const FrameConfig& frame, const PitchConfig& pitch,
                   const MfccConfig& mfcc)
    : frame_(frame), pitch_(pitch), mfcc_(mfcc, frame) {
  frame_.validate();
}

AnalysisFrame FrontEnd::process(std::span<const float> recent,
                                bool keep_samples) {
  const auto window = static_cast<std::size_t>(frame_.window);
  if (recent.size() < window) {
    throw InputError("front end needs at least one window of samples");
  }
  const auto frame = recent.subspan(recent.size() - window);
  AnalysisFrame out;
  out.acoustic.index = next_index_++;
  out.acoustic.features = mfcc_.compute(frame, history_);
  if (keep_samples) out.acoustic.samples.assign(frame.begin(), frame.end());
  out.prosody = detect_pitch(recent, pitch_, frame_.sample_rate);
  return out;
}

void FrontEnd::reset() {
  history_ = {};
  next_index_ = 0;
}

}  // namespace alovc
