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

// Per-frame acoustic analysis of a 16 kHz stream: 39-D MFCC features, an
// autocorrelation pitch/voicing tracker, and Bark-band cepstra.
//
// All spectral analysis works on samples scaled to 16-bit PCM units and a
// periodic Hann window of `FrameConfig::window` samples, zero-padded to a
// 512-point FFT.

#ifndef ALOVC_FRONTEND_H_
#define ALOVC_FRONTEND_H_

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "alovc/bark.h"

namespace alovc {

struct FrameConfig {
  int sample_rate = 16000;
  int window = 400;  // 25 ms
  int hop = 160;     // 10 ms

  // Throws InputError when the configuration is unusable.
  void validate() const;
  double hop_ms() const { return 1000.0 * hop / sample_rate; }
};

// Number of full windows in `n_samples`. Throws InputError ("too short")
// when fewer than `cfg.window` samples are given.
std::size_t frame_count(std::size_t n_samples, const FrameConfig& cfg = {});

inline constexpr int kNumCeps = 13;
inline constexpr int kFeatureDim = 3 * kNumCeps;

struct AcousticFrame {
  std::size_t index = 0;
  std::array<float, kFeatureDim> features{};
  std::vector<float> samples;
};

struct ProsodyFrame {
  double f0 = 0.0;  // Hz, 0 when unvoiced
  int vuf = 0;
  double correlation = 0.0;
};

struct PitchConfig {
  double f0_min = 40.0;
  double f0_max = 500.0;
  double voicing_threshold = 0.3;
  // The smallest-lag local peak reaching this fraction of the global peak
  // wins, so exact period multiples never beat the period itself.
  double octave_ratio = 0.9;
  // Samples of history handed to the tracker (two analysis windows).
  int history = 800;
};

struct MfccConfig {
  int num_mels = 40;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;
};

// Hann-windowed power spectrum |X[k]|^2, k in [0, fft_size / 2].
class PowerSpectrum {
 public:
  static constexpr int kFftSize = 512;
  static constexpr int kNumBins = kFftSize / 2 + 1;

  explicit PowerSpectrum(int window = 400);
  ~PowerSpectrum();
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;

  // `frame` in [-1, 1) units, length == window. Throws InputError on
  // non-finite input.
  std::span<const double> compute(std::span<const float> frame);

  int window() const { return window_; }
  double window_energy() const { return window_energy_; }
  static double bin_hz(int k, int sample_rate = 16000) {
    return static_cast<double>(k) * sample_rate / kFftSize;
  }

 private:
  int window_;
  std::vector<double> hann_;
  double window_energy_ = 0.0;
  struct Fft;
  std::unique_ptr<Fft> fft_;
  std::array<double, kNumBins> power_{};
};

// Triangular mel filterbank (HTK mel scale, triangles in the mel domain).
class MelFilterbank {
 public:
  explicit MelFilterbank(const MfccConfig& cfg = {}, int sample_rate = 16000);
  // Natural log of each band energy, floored at cfg.log_floor.
  std::vector<double> log_energies(std::span<const double> power) const;
  int num_bands() const { return static_cast<int>(weights_.size()); }

 private:
  MfccConfig cfg_;
  std::vector<std::vector<double>> weights_;  // [band][bin]
};

// The two most recent 13-D MFCC vectors; zeros at stream start.
struct MfccHistory {
  std::array<double, kNumCeps> prev1{};  // c_{t-1}
  std::array<double, kNumCeps> prev2{};  // c_{t-2}
};

// 13 MFCCs (c0..c12) of one frame followed by causal backward differences
// (delta_t = c_t - c_{t-1}, delta2_t = delta_t - delta_{t-1}). Updates
// `history` in place.
class Mfcc39 {
 public:
  explicit Mfcc39(const MfccConfig& cfg = {}, const FrameConfig& frame = {});

  std::array<float, kFeatureDim> compute(std::span<const float> frame,
                                         MfccHistory& history);
  // Cepstrum from a precomputed power spectrum.
  std::array<double, kNumCeps> cepstrum(std::span<const double> power) const;

  PowerSpectrum& spectrum() { return spectrum_; }

 private:
  PowerSpectrum spectrum_;
  MelFilterbank mel_;
};

// Normalized autocorrelation tracker over the last `cfg.history` samples
// (fewer are zero-padded on the left). Zero-energy input is unvoiced with
// correlation 0.
ProsodyFrame detect_pitch(std::span<const float> recent,
                          const PitchConfig& cfg = {},
                          int sample_rate = 16000);

// Mean power per bin in each Bark band, normalized by the window energy so
// that white noise of variance s^2 (PCM16 units) gives s^2 in every band.
// Natural log, floored at `log_floor`.
std::array<double, bark::kNumBands> band_log_energies(
    std::span<const double> power, double window_energy,
    double log_floor = 1e-10, int sample_rate = 16000);

// DCT-II (orthonormal) of the band log energies of a window-length frame.
std::array<double, bark::kNumBands> bscc_analyze(std::span<const float> frame);
std::array<double, bark::kNumBands> bands_to_bscc(
    std::span<const double> band_log_energies);

// Analysis results for one hop.
struct AnalysisFrame {
  AcousticFrame acoustic;
  ProsodyFrame prosody;
};

// Single-stream, stateful front end (delta history). Independent instances
// may run on different threads.
class FrontEnd {
 public:
  FrontEnd(const FrameConfig& frame = {}, const PitchConfig& pitch = {},
           const MfccConfig& mfcc = {});

  // `recent` holds the most recent samples ending at the current window's
  // last sample; its last `window` samples are the analysis frame and up to
  // `pitch.history` samples feed the pitch tracker.
  AnalysisFrame process(std::span<const float> recent, bool keep_samples = false);

  void reset();
  std::size_t frames_processed() const { return next_index_; }
  const FrameConfig& frame_config() const { return frame_; }
  const PitchConfig& pitch_config() const { return pitch_; }

 private:
  FrameConfig frame_;
  PitchConfig pitch_;
  Mfcc39 mfcc_;
  MfccHistory history_;
  std::size_t next_index_ = 0;
};

}  // namespace alovc

#endif  // ALOVC_FRONTEND_H_
