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

#include "alovc/vocoder.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>

#include "alovc/audio_io.h"
#include "alovc/errors.h"

namespace alovc {
namespace {

constexpr double kPcmScale = 32768.0;
constexpr double kPowerFloor = 1e-10;

// Autocorrelation lags 0..order of a real process whose power spectrum is
// sampled at 161 bins spanning [0, pi].
std::array<double, kLpcOrder + 1> autocorrelation(const std::array<double, kLinearBins>& p) {
  constexpr int kLast = kLinearBins - 1;
  std::array<double, kLpcOrder + 1> r{};
  for (int k = 0; k <= kLpcOrder; ++k) {
    double acc = p[0] + p[kLast] * (k % 2 == 0 ? 1.0 : -1.0);
    for (int b = 1; b < kLast; ++b) {
      acc += 2.0 * p[b] * std::cos(std::numbers::pi * b * k / kLast);
    }
    r[k] = acc / (2.0 * kLast);
  }
  return r;
}

// True when every pole of 1/A(z) lies strictly inside radius `rho`.
bool poles_inside(const std::array<double, kLpcOrder>& a, double rho) {
  std::array<double, kLpcOrder + 1> c{};  // 1-based predictor coefficients
  double scale = 1.0;
  for (int i = 1; i <= kLpcOrder; ++i) {
    scale /= rho;
    c[i] = a[i - 1] * scale;
  }
  for (int m = kLpcOrder; m >= 1; --m) {
    const double k = c[m];
    if (!(std::abs(k) < 1.0)) return false;
    const double den = 1.0 - k * k;
    std::array<double, kLpcOrder + 1> prev{};
    for (int j = 1; j < m; ++j) prev[j] = (c[j] + k * c[m - j]) / den;
    c = prev;
  }
  return true;
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

float get_f32(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return std::bit_cast<float>(bits);
}

}  // namespace

BandVector bscc_to_spectrum(std::span<const double> bscc) {
  if (bscc.size() != bark::kNumBands) {
    throw std::invalid_argument("bscc_to_spectrum expects 18 coefficients");
  }
  BandVector out{};
  bark::idct2(bscc, out);
  return out;
}

std::array<double, kLinearBins> bands_to_power(std::span<const double> bands) {
  const auto& c = bark::kBandCenterHz;
  std::array<double, kLinearBins> p{};
  int k = 0;
  for (int b = 0; b < kLinearBins; ++b) {
    const double hz = 50.0 * b;
    while (k + 2 < bark::kNumBands && hz > c[k + 1]) ++k;
    double v;
    if (hz <= c[0]) {
      v = bands[0];
    } else if (hz >= c[bark::kNumBands - 1]) {
      v = bands[bark::kNumBands - 1];
    } else {
      const double t = (hz - c[k]) / (c[k + 1] - c[k]);
      v = bands[k] + t * (bands[k + 1] - bands[k]);
    }
    p[b] = std::max(std::exp(v), kPowerFloor);
  }
  return p;
}

LpcCoeffs spectrum_to_lpc(std::span<const double> band_log_energies, double bandwidth) {
  if (band_log_energies.size() != bark::kNumBands) {
    throw std::invalid_argument("spectrum_to_lpc expects 18 band energies");
  }
  const auto r = autocorrelation(bands_to_power(band_log_energies));
  LpcCoeffs lpc;
  std::array<double, kLpcOrder> a{};
  double err = r[0];
  for (int i = 0; i < kLpcOrder; ++i) {
    double acc = r[i + 1];
    for (int j = 0; j < i; ++j) acc -= a[j] * r[i - j];
    const double k = acc / err;
    if (!(std::abs(k) < 1.0) || !(err > 0.0)) break;
    std::array<double, kLpcOrder> next = a;
    next[i] = k;
    for (int j = 0; j < i; ++j) next[j] = a[j] - k * a[i - 1 - j];
    a = next;
    err *= 1.0 - k * k;
  }
  double g = 1.0;
  for (int i = 0; i < kLpcOrder; ++i) {
    g *= bandwidth;
    lpc.a[i] = a[i] * g;
  }
  lpc.gain = err;
  return lpc;
}

double max_pole_radius(const LpcCoeffs& lpc) {
  double hi = 1.0;
  for (double v : lpc.a) hi += std::abs(v);
  double lo = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (poles_inside(lpc.a, mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

double lpc_response(const LpcCoeffs& lpc, double hz, int sample_rate) {
  const double w = 2.0 * std::numbers::pi * hz / sample_rate;
  std::complex<double> a(1.0, 0.0);
  for (int i = 0; i < kLpcOrder; ++i) a -= lpc.a[i] * std::polar(1.0, -w * (i + 1));
  return lpc.gain / std::norm(a);
}

Vocoder::Vocoder(const VocoderConfig& cfg) : cfg_(cfg), rng_(static_cast<std::uint32_t>(cfg.seed)) {
  if (cfg_.frame_size <= 0 || cfg_.subframes <= 0 || cfg_.frame_size % cfg_.subframes != 0) {
    throw std::invalid_argument("vocoder frame size must split evenly into subframes");
  }
}

void Vocoder::reset() {
  rng_.seed(static_cast<std::uint32_t>(cfg_.seed));
  noise_.reset();
  prev_bands_ = {};
  have_prev_ = false;
  memory_ = {};
  phase_ = 0.0;
  was_voiced_ = false;
}

void Vocoder::synthesize(const VocoderFrame& frame, std::vector<float>& out) {
  const BandVector bands = bscc_to_spectrum(frame.bscc);
  if (!have_prev_) {
    prev_bands_ = bands;
    have_prev_ = true;
  }
  const bool voiced = frame.f0 > 0.0;
  const double c = voiced ? std::clamp(frame.correlation, 0.0, 1.0) : 0.0;
  const double pulse_mix = std::sqrt(c);
  const double noise_mix = std::sqrt(1.0 - c);
  if (voiced && !was_voiced_) phase_ = 0.0;

  // Voiced excitation: one pulse per period with its energy dispersed over
  // the period (harmonics below Nyquist with Schroeder phases), unit power.
  int harmonics = 0;
  double amp = 0.0;
  if (voiced) {
    const double step = frame.f0 / kSampleRate;  // cycles per sample
    const double spread = 0.5 / step;            // harmonics up to Nyquist
    harmonics = std::max(1, static_cast<int>(std::ceil(spread)) - 1);
    amp = std::sqrt(2.0 / harmonics);
    harmonics_.resize(harmonics);
    rotation_.resize(harmonics);
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    for (int k = 1; k <= harmonics; ++k) {
      const double disperse = std::numbers::pi * k * k / spread;
      harmonics_[k - 1] = std::polar(1.0, kTwoPi * k * phase_ + disperse);
      rotation_[k - 1] = std::polar(1.0, kTwoPi * k * step);
    }
    phase_ = std::fmod(phase_ + cfg_.frame_size * step, 1.0);
  }

  const int sub = cfg_.frame_size / cfg_.subframes;
  BandVector interp{};
  for (int s = 0; s < cfg_.subframes; ++s) {
    const double w = static_cast<double>(s + 1) / cfg_.subframes;
    for (int k = 0; k < bark::kNumBands; ++k) {
      interp[k] = prev_bands_[k] + w * (bands[k] - prev_bands_[k]);
    }
    const LpcCoeffs lpc = spectrum_to_lpc(interp, cfg_.bandwidth);
    const double g = std::sqrt(lpc.gain);
    for (int n = s * sub; n < (s + 1) * sub; ++n) {
      double pulse = 0.0;
      for (int k = 0; k < harmonics; ++k) {
        pulse += harmonics_[k].real();
        harmonics_[k] *= rotation_[k];
      }
      const double e = pulse_mix * amp * pulse + noise_mix * noise_(rng_);
      double y = g * e;
      for (int i = 0; i < kLpcOrder; ++i) y += lpc.a[i] * memory_[i];
      std::copy_backward(memory_.begin(), memory_.end() - 1, memory_.end());
      memory_[0] = y;
      out.push_back(static_cast<float>(y / kPcmScale));
    }
  }
  prev_bands_ = bands;
  was_voiced_ = voiced;
}

FeatureRecord feature_record(const VocoderFrame& frame, PeriodEncoding enc, int sample_rate) {
  FeatureRecord r{};
  for (int k = 0; k < bark::kNumBands; ++k) r[k] = static_cast<float>(frame.bscc[k]);
  const double period = frame.f0 > 0.0 ? sample_rate / frame.f0 : 0.0;
  r[18] = static_cast<float>(enc == PeriodEncoding::kSamples ? period : (period - 100.0) / 50.0);
  r[19] = static_cast<float>(frame.correlation);
  return r;
}

std::vector<std::uint8_t> encode_features(std::span<const VocoderFrame> frames, PeriodEncoding enc) {
  std::vector<std::uint8_t> out;
  out.reserve(frames.size() * kFeatureRecordFloats * 4);
  for (const auto& f : frames) {
    for (float v : feature_record(f, enc)) put_f32(out, v);
  }
  return out;
}

void export_lpcnet_features(std::span<const VocoderFrame> frames,
                            const std::filesystem::path& path, PeriodEncoding enc) {
  write_file_bytes(path, encode_features(frames, enc));
}

std::vector<FeatureRecord> decode_features(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kRecordBytes = kFeatureRecordFloats * 4;
  if (bytes.size() % kRecordBytes != 0) {
    throw InputError("feature file size " + std::to_string(bytes.size()) +
                     " is not a multiple of 80 bytes");
  }
  std::vector<FeatureRecord> out(bytes.size() / kRecordBytes);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int j = 0; j < kFeatureRecordFloats; ++j) {
      out[i][j] = get_f32(bytes.data() + i * kRecordBytes + 4 * j);
    }
  }
  return out;
}

std::vector<FeatureRecord> read_lpcnet_features(const std::filesystem::path& path) {
  return decode_features(read_file_bytes(path));
}

}  // namespace alovc
