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

// Deterministic synthetic signals: additive-harmonic vowels with resonant
// formants, and white noise. Used by the benchmark, demos and tests.

#ifndef ALOVC_SYNTH_H_
#define ALOVC_SYNTH_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "alovc/audio_io.h"

namespace alovc::synth {

struct Formant {
  double hz;
  double bandwidth_hz;
};

struct VowelSpec {
  double f0 = 120.0;
  std::vector<Formant> formants = {{600.0, 80.0}, {1600.0, 100.0}};
  double seconds = 1.0;
  double peak = 0.5;  // peak amplitude in [-1, 1) units
  // Harmonic h of the source is weighted by h^-tilt; 0 is an impulse train.
  double tilt = 0.0;
  // Optional relative pitch modulation: f0(t) = f0 * (1 + depth * sin(2 pi rate t)).
  double vibrato_depth = 0.0;
  double vibrato_hz = 5.0;
};

// Sum of harmonics of f0 below 8 kHz, each weighted by the product of
// second-order resonance magnitudes, phase-continuous under vibrato.
Audio vowel(const VowelSpec& spec);

Audio white_noise(double seconds, double rms, std::uint64_t seed);

Audio silence(double seconds);

// Alternates voiced vowel segments with quiet noise gaps; pitch glides so
// the log-F0 spread is non-zero.
Audio speech_like(double seconds, double base_f0, std::uint64_t seed);

}  // namespace alovc::synth

#endif  // ALOVC_SYNTH_H_
