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

#include "alovc/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace alovc::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double resonance(double f, const Formant& fm) {
  const double a = fm.hz * fm.hz - f * f;
  const double b = fm.bandwidth_hz * f;
  return fm.hz * fm.hz / std::sqrt(a * a + b * b);
}

std::size_t sample_count(double seconds) {
  return static_cast<std::size_t>(std::llround(seconds * kSampleRate));
}

// Harmonic synthesis with a per-sample f0 contour.
std::vector<float> harmonic(const std::vector<double>& f0, const std::vector<Formant>& formants,
                            double tilt, double peak) {
  const std::size_t n = f0.size();
  std::vector<double> y(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phase += kTwoPi * f0[i] / kSampleRate;
    if (phase > kTwoPi * 1e6) phase = std::fmod(phase, kTwoPi);
    if (f0[i] <= 0.0) continue;
    const int harmonics = static_cast<int>(7900.0 / f0[i]);
    double acc = 0.0;
    for (int h = 1; h <= harmonics; ++h) {
      double g = std::pow(static_cast<double>(h), -tilt);
      for (const auto& fm : formants) g *= resonance(h * f0[i], fm);
      acc += g * std::sin(h * phase);
    }
    y[i] = acc;
  }
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  std::vector<float> out(n);
  const double scale = m > 0.0 ? peak / m : 0.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(y[i] * scale);
  return out;
}

}  // namespace

Audio vowel(const VowelSpec& spec) {
  const std::size_t n = sample_count(spec.seconds);
  std::vector<double> f0(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    f0[i] = spec.f0 * (1.0 + spec.vibrato_depth * std::sin(kTwoPi * spec.vibrato_hz * t));
  }
  Audio a;
  a.samples = harmonic(f0, spec.formants, spec.tilt, spec.peak);
  return a;
}

Audio white_noise(double seconds, double rms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, rms);
  Audio a;
  a.samples.resize(sample_count(seconds));
  for (float& s : a.samples) s = static_cast<float>(std::clamp(nd(rng), -1.0, 0.999));
  return a;
}

Audio silence(double seconds) {
  Audio a;
  a.samples.assign(sample_count(seconds), 0.0f);
  return a;
}

Audio speech_like(double seconds, double base_f0, std::uint64_t seed) {
  const std::size_t n = sample_count(seconds);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> f0(n, 0.0);
  std::vector<Formant> formants = {{600.0, 80.0}, {1600.0, 100.0}, {2800.0, 150.0}};
  std::size_t i = 0;
  while (i < n) {
    const auto voiced_len = static_cast<std::size_t>((0.25 + 0.35 * u(rng)) * kSampleRate);
    const double start = base_f0 * (0.85 + 0.3 * u(rng));
    const double end = base_f0 * (0.85 + 0.3 * u(rng));
    for (std::size_t k = 0; k < voiced_len && i < n; ++k, ++i) {
      f0[i] = start + (end - start) * static_cast<double>(k) / static_cast<double>(voiced_len);
    }
    const auto gap = static_cast<std::size_t>((0.05 + 0.1 * u(rng)) * kSampleRate);
    i += gap;
  }
  Audio a;
  a.samples = harmonic(f0, formants, 1.0, 0.5);
  std::normal_distribution<double> nd(0.0, 0.01);
  for (float& s : a.samples) s = static_cast<float>(s + nd(rng));
  return a;
}

}  // namespace alovc::synth
