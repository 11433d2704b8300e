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

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "alovc/errors.h"
#include "alovc/synth.h"
#include "alovc/vocoder.h"

namespace alovc {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<float> sawtooth(double hz, std::size_t n, double amp = 0.5) {
  std::vector<float> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = std::fmod(hz * static_cast<double>(i) / 16000.0, 1.0);
    s[i] = static_cast<float>(amp * (2.0 * phase - 1.0));
  }
  return s;
}

std::vector<float> noise(std::size_t n, std::uint64_t seed, double rms = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, rms);
  std::vector<float> s(n);
  for (float& v : s) v = static_cast<float>(g(rng));
  return s;
}

// --- frame_count -------------------------------------------------------------

std::size_t brute_force_frames(std::size_t n, std::size_t window, std::size_t hop) {
  std::size_t count = 0;
  for (std::size_t start = 0; start + window <= n; start += hop) ++count;
  return count;
}

TEST(FrameCount, Examples) {
  EXPECT_EQ(frame_count(400), 1u);
  EXPECT_EQ(frame_count(80000), 498u);
  EXPECT_EQ(frame_count(560), 2u);
  EXPECT_EQ(brute_force_frames(80000, 400, 160), 498u);
}

TEST(FrameCount, MatchesBruteForceOverRange) {
  for (std::size_t n = 400; n <= 4000; ++n) {
    ASSERT_EQ(frame_count(n), brute_force_frames(n, 400, 160)) << n;
  }
}

TEST(FrameCount, TooShortIsAnError) {
  try {
    frame_count(399);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("too short"), std::string::npos);
  }
}

TEST(FrameConfig, RejectsBadConfigurations) {
  EXPECT_THROW((FrameConfig{16000, 400, 0}.validate()), InputError);
  EXPECT_THROW((FrameConfig{16000, 160, 400}.validate()), InputError);
  EXPECT_THROW((FrameConfig{8000, 400, 160}.validate()), InputError);
  EXPECT_NO_THROW((FrameConfig{}.validate()));
}

// --- mfcc39 ------------------------------------------------------------------

TEST(Mfcc39, ZeroFrameHasZeroDeltas) {
  // The zero frame's cepstrum is not zero (log floor), so differences vanish
  // once the history itself holds zero-frame cepstra.
  Mfcc39 mfcc;
  MfccHistory h;
  const std::vector<float> zero(400, 0.0f);
  const auto f0 = mfcc.compute(zero, h);
  const auto f1 = mfcc.compute(zero, h);
  const auto f2 = mfcc.compute(zero, h);
  for (int i = 0; i < kNumCeps; ++i) {
    EXPECT_EQ(f1[kNumCeps + i], 0.0f) << i;
    EXPECT_EQ(f1[2 * kNumCeps + i], -f0[kNumCeps + i]) << i;
  }
  for (int i = kNumCeps; i < kFeatureDim; ++i) EXPECT_EQ(f2[i], 0.0f) << i;

  MfccHistory same;
  same.prev1 = same.prev2 = mfcc.cepstrum(mfcc.spectrum().compute(zero));
  const auto z = mfcc.compute(zero, same);
  for (int i = kNumCeps; i < kFeatureDim; ++i) EXPECT_EQ(z[i], 0.0f) << i;
}

TEST(Mfcc39, StreamStartDeltaEqualsCepstrum) {
  Mfcc39 mfcc;
  MfccHistory h;
  const auto frame = noise(400, 1);
  const auto f = mfcc.compute(frame, h);
  for (int i = 0; i < kNumCeps; ++i) {
    EXPECT_EQ(f[kNumCeps + i], f[i]);
    EXPECT_EQ(f[2 * kNumCeps + i], f[i]);
  }
}

TEST(Mfcc39, BackwardDifferences) {
  Mfcc39 mfcc;
  MfccHistory h;
  const auto a = mfcc.compute(noise(400, 1), h);
  const auto b = mfcc.compute(noise(400, 2, 0.3), h);
  const auto c = mfcc.compute(sawtooth(150, 400), h);
  for (int i = 0; i < kNumCeps; ++i) {
    const double d_b = static_cast<double>(b[i]) - a[i];
    const double d_c = static_cast<double>(c[i]) - b[i];
    EXPECT_NEAR(b[kNumCeps + i], d_b, 1e-4);
    EXPECT_NEAR(c[kNumCeps + i], d_c, 1e-4);
    EXPECT_NEAR(c[2 * kNumCeps + i], d_c - d_b, 1e-4);
  }
}

TEST(Mfcc39, OutputDependsOnlyOnFrameAndHistory) {
  Mfcc39 m1, m2;
  MfccHistory h1, h2;
  m1.compute(noise(400, 7), h1);
  m2.compute(noise(400, 7), h2);
  const auto frame = noise(400, 8);
  const auto a = m1.compute(frame, h1);
  const auto b = m2.compute(frame, h2);
  EXPECT_EQ(a, b);
}

TEST(Mfcc39, NonFiniteInputIsAnError) {
  Mfcc39 mfcc;
  MfccHistory h;
  auto frame = noise(400, 1);
  frame[17] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(mfcc.compute(frame, h), InputError);
  frame[17] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(mfcc.compute(frame, h), InputError);
}

TEST(Mfcc39, FullScaleSineMatchesOfflineReference) {
  std::ifstream in(std::string(ALOVC_TEST_DATA_DIR) + "/mfcc_1khz_sine.txt");
  ASSERT_TRUE(in) << "golden file missing";
  std::vector<double> golden;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    golden.push_back(std::stod(line.substr(line.find('=') + 1)));
  }
  ASSERT_EQ(golden.size(), static_cast<std::size_t>(kNumCeps));

  std::vector<float> frame(400);
  for (int n = 0; n < 400; ++n) {
    frame[n] = static_cast<float>(32767.0 / 32768.0 * std::sin(2.0 * kPi * 1000.0 * n / 16000.0));
  }
  Mfcc39 mfcc;
  const auto spectrum = mfcc.spectrum().compute(frame);
  const auto c = mfcc.cepstrum(spectrum);
  for (int i = 0; i < kNumCeps; ++i) EXPECT_NEAR(c[i], golden[i], 1e-3) << "c" << i;

  MfccHistory h;
  const auto f = mfcc.compute(frame, h);
  for (int i = 1; i < kNumCeps; ++i) EXPECT_NEAR(f[i], golden[i], 1e-3) << "c" << i;
}

// --- detect_pitch ------------------------------------------------------------

class SawtoothPitch : public ::testing::TestWithParam<double> {};

TEST_P(SawtoothPitch, WithinOneLagStep) {
  const double hz = GetParam();
  const auto s = sawtooth(hz, 800);
  const ProsodyFrame p = detect_pitch(s);
  const double period = 16000.0 / hz;
  EXPECT_EQ(p.vuf, 1);
  EXPECT_GE(p.f0, 16000.0 / (period + 1.0));
  EXPECT_LE(p.f0, 16000.0 / (period - 1.0));
  EXPECT_GT(p.correlation, 0.3);
  EXPECT_LE(p.correlation, 1.0);
}

INSTANTIATE_TEST_SUITE_P(Frequencies, SawtoothPitch, ::testing::Values(80.0, 120.0, 200.0, 320.0));

TEST(DetectPitch, TwoHundredHertzSawtooth) {
  const ProsodyFrame p = detect_pitch(sawtooth(200, 800));
  EXPECT_EQ(p.vuf, 1);
  EXPECT_GE(p.f0, 198.0);
  EXPECT_LE(p.f0, 202.0);
}

TEST(DetectPitch, WhiteNoiseIsUnvoiced) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ProsodyFrame p = detect_pitch(noise(800, seed));
    EXPECT_EQ(p.vuf, 0) << seed;
    EXPECT_EQ(p.f0, 0.0) << seed;
  }
}

TEST(DetectPitch, SilenceIsUnvoicedWithZeroCorrelation) {
  const ProsodyFrame p = detect_pitch(std::vector<float>(800, 0.0f));
  EXPECT_EQ(p.vuf, 0);
  EXPECT_EQ(p.f0, 0.0);
  EXPECT_EQ(p.correlation, 0.0);
}

TEST(DetectPitch, ShortHistoryIsZeroPadded) {
  const auto s = sawtooth(200, 800);
  const std::vector<float> tail(s.end() - 400, s.end());
  const ProsodyFrame p = detect_pitch(tail);
  std::vector<float> padded(400, 0.0f);
  padded.insert(padded.end(), tail.begin(), tail.end());
  const ProsodyFrame q = detect_pitch(padded);
  EXPECT_EQ(p.f0, q.f0);
  EXPECT_EQ(p.correlation, q.correlation);
}

TEST(DetectPitch, FrameInvariantsHoldOnMixedSignal) {
  const Audio a = synth::speech_like(2.0, 150.0, 3);
  for (std::size_t end = 400; end <= a.samples.size(); end += 160) {
    const std::size_t start = end >= 800 ? end - 800 : 0;
    const ProsodyFrame p =
        detect_pitch(std::span<const float>(a.samples).subspan(start, end - start));
    if (p.vuf == 1) {
      EXPECT_GE(p.f0, 40.0);
      EXPECT_LE(p.f0, 500.0);
    } else {
      EXPECT_EQ(p.f0, 0.0);
    }
    EXPECT_GE(p.correlation, 0.0);
    EXPECT_LE(p.correlation, 1.0);
  }
}

// --- bscc_analyze ------------------------------------------------------------

TEST(BsccAnalyze, ZeroFrameOnlyCoefficientZero) {
  const auto c = bscc_analyze(std::vector<float>(400, 0.0f));
  EXPECT_NEAR(c[0], std::sqrt(18.0) * std::log(1e-10), 1e-9);
  for (int k = 1; k < bark::kNumBands; ++k) EXPECT_NEAR(c[k], 0.0, 1e-9) << k;
}

TEST(BsccAnalyze, GainOnlyMovesCoefficientZero) {
  for (double g : {2.0, 0.5, 4.0, 0.125}) {  // exact in float
    const auto frame = noise(400, 11);
    std::vector<float> scaled(frame);
    for (float& v : scaled) v = static_cast<float>(v * g);
    const auto a = bscc_analyze(frame);
    const auto b = bscc_analyze(scaled);
    // Power scales by g^2 in every band: a constant log offset of 2 log g.
    EXPECT_NEAR(b[0] - a[0], std::sqrt(18.0) * 2.0 * std::log(g), 1e-9) << g;
    for (int k = 1; k < bark::kNumBands; ++k) EXPECT_NEAR(b[k], a[k], 1e-9) << g << " " << k;
  }
}

TEST(BsccAnalyze, Deterministic) {
  const auto frame = noise(400, 12);
  EXPECT_EQ(bscc_analyze(frame), bscc_analyze(frame));
}

TEST(BsccAnalyze, RejectsWrongLengthAndNonFinite) {
  EXPECT_THROW(bscc_analyze(std::vector<float>(399, 0.0f)), InputError);
  auto frame = noise(400, 13);
  frame[0] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(bscc_analyze(frame), InputError);
}

// Noise confined to one band's peak region: after bscc_to_spectrum the
// strongest band is that band.
class BandNoise : public ::testing::TestWithParam<int> {};

TEST_P(BandNoise, RoundTripPeaksInBand) {
  const int band = GetParam();
  const double centre = bark::kBandCenterHz[band];
  const double half = band < 9 ? 40.0 : 120.0;
  std::mt19937_64 rng(static_cast<std::uint64_t>(band));
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  std::vector<float> frame(400, 0.0f);
  for (double f = centre - half; f <= centre + half; f += 10.0) {
    const double phase = ph(rng);
    for (int n = 0; n < 400; ++n) {
      frame[n] += static_cast<float>(0.02 * std::sin(2.0 * kPi * f * n / 16000.0 + phase));
    }
  }
  const auto bands = bscc_to_spectrum(bscc_analyze(frame));
  int best = 0;
  for (int k = 1; k < bark::kNumBands; ++k) {
    if (bands[k] > bands[best]) best = k;
  }
  EXPECT_EQ(best, band);
  // The interpolated linear spectrum also peaks at that band's centre bin.
  const auto power = bands_to_power(bands);
  int peak_bin = 0;
  for (int b = 1; b < kLinearBins; ++b) {
    if (power[b] > power[peak_bin]) peak_bin = b;
  }
  EXPECT_NEAR(peak_bin * 50.0, centre, 1.0);
}

INSTANTIATE_TEST_SUITE_P(Bands, BandNoise, ::testing::Values(2, 5, 8, 10, 13, 15));

// --- FrontEnd ----------------------------------------------------------------

TEST(FrontEnd, EmitsIndexedFiniteFrames) {
  FrontEnd fe;
  const Audio a = synth::speech_like(1.0, 140.0, 5);
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t end = 160 * t + 400;
    const std::size_t start = end >= 800 ? end - 800 : 0;
    const auto f = fe.process(std::span<const float>(a.samples).subspan(start, end - start), true);
    EXPECT_EQ(f.acoustic.index, t);
    EXPECT_EQ(f.acoustic.samples.size(), 400u);
    for (float v : f.acoustic.features) EXPECT_TRUE(std::isfinite(v));
  }
  EXPECT_EQ(fe.frames_processed(), 20u);
  fe.reset();
  EXPECT_EQ(fe.frames_processed(), 0u);
}

TEST(FrontEnd, RejectsShortInput) {
  FrontEnd fe;
  EXPECT_THROW(fe.process(std::vector<float>(300, 0.0f)), InputError);
}

}  // namespace
}  // namespace alovc
