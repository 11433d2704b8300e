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

// Deterministic source-filter synthesis from Bark cepstra, and the 20-float
// per-frame feature file consumed by external LPCNet-style synthesizers.
//
// Band log energies are in the front end's units: natural log of the mean
// power per Hz bin of the 16-bit-scaled signal, so a white process of
// variance s^2 has log(s^2) in every band.

#ifndef ALOVC_VOCODER_H_
#define ALOVC_VOCODER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "alovc/bark.h"
#include "alovc/conversion_model.h"

namespace alovc {

inline constexpr int kLpcOrder = 16;
inline constexpr int kLinearBins = 161;  // 0..8000 Hz in 50 Hz steps

using BandVector = std::array<double, bark::kNumBands>;

// Inverse of the analysis DCT: cepstrum -> band log energies.
BandVector bscc_to_spectrum(std::span<const double> bscc);

// Piecewise-linear interpolation of band log energies over the band centers,
// exponentiated to linear power and floored at 1e-10.
std::array<double, kLinearBins> bands_to_power(std::span<const double> band_log_energies);

// Prediction polynomial A(z) = 1 - sum_i a[i] z^-(i+1); the synthesis filter
// is sqrt(gain) / A(z) for unit-variance excitation.
struct LpcCoeffs {
  std::array<double, kLpcOrder> a{};
  double gain = 0.0;  // prediction error power
};

// Autocorrelation of the interpolated power spectrum, Levinson-Durbin to
// order 16, then a[i] *= bandwidth^(i+1).
LpcCoeffs spectrum_to_lpc(std::span<const double> band_log_energies,
                          double bandwidth = 0.995);

// Largest pole magnitude of 1 / A(z).
double max_pole_radius(const LpcCoeffs& lpc);

// Power response gain / |A(e^{jw})|^2 at `hz`.
double lpc_response(const LpcCoeffs& lpc, double hz, int sample_rate = 16000);

struct VocoderConfig {
  int frame_size = 160;
  int subframes = 4;  // spectral envelope interpolated between frames
  double bandwidth = 0.995;
  std::uint64_t seed = 0x5eed;
  // Declared future context of the active vocoder (ms). This synthesizer
  // needs none; 30 emulates an LPCNet-class vocoder in latency reports.
  double lookahead_ms = 0.0;
};

class Vocoder {
 public:
  explicit Vocoder(const VocoderConfig& cfg = {});

  // Appends `frame_size` samples in [-1, 1) units.
  void synthesize(const VocoderFrame& frame, std::vector<float>& out);
  std::vector<float> synthesize(const VocoderFrame& frame) {
    std::vector<float> out;
    synthesize(frame, out);
    return out;
  }
  void reset();

  const VocoderConfig& config() const { return cfg_; }

 private:
  VocoderConfig cfg_;
  std::mt19937 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  BandVector prev_bands_{};
  bool have_prev_ = false;
  std::array<double, kLpcOrder> memory_{};  // y[n-1], y[n-2], ...
  double phase_ = 0.0;  // pitch phase in cycles, continuous across voiced frames
  bool was_voiced_ = false;
  std::vector<std::complex<double>> harmonics_;  // per-harmonic phasors
  std::vector<std::complex<double>> rotation_;
};

// Feature file: per frame, 20 little-endian float32 values: 18 BSCCs, pitch
// period, correlation. Period is 16000 / f0 samples (0 when unvoiced); the
// normalized encoding stores (period - 100) / 50 instead.
enum class PeriodEncoding { kSamples, kNormalized };

inline constexpr int kFeatureRecordFloats = 20;
using FeatureRecord = std::array<float, kFeatureRecordFloats>;

FeatureRecord feature_record(const VocoderFrame& frame,
                             PeriodEncoding enc = PeriodEncoding::kSamples,
                             int sample_rate = 16000);
std::vector<std::uint8_t> encode_features(std::span<const VocoderFrame> frames,
                                          PeriodEncoding enc = PeriodEncoding::kSamples);
void export_lpcnet_features(std::span<const VocoderFrame> frames,
                            const std::filesystem::path& path,
                            PeriodEncoding enc = PeriodEncoding::kSamples);
// Throws InputError when the size is not a multiple of 80 bytes.
std::vector<FeatureRecord> decode_features(std::span<const std::uint8_t> bytes);
std::vector<FeatureRecord> read_lpcnet_features(const std::filesystem::path& path);

}  // namespace alovc

#endif  // ALOVC_VOCODER_H_
