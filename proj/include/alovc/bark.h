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

// 18-band Bark-like layout shared by cepstral analysis and the vocoder.
//
// Band centers follow the LPCNet 16 kHz layout (200 Hz steps up to 1.6 kHz,
// then widening). Each band is a triangle between its neighbours' centers;
// the triangles sum to one at every frequency in [0, 8000] Hz.

#ifndef ALOVC_BARK_H_
#define ALOVC_BARK_H_

#include <array>
#include <span>

namespace alovc::bark {

inline constexpr int kNumBands = 18;

inline constexpr std::array<double, kNumBands> kBandCenterHz = {
    0,    200,  400,  600,  800,  1000, 1200, 1400, 1600,
    2000, 2400, 2800, 3200, 4000, 4800, 5600, 6800, 8000};

// Triangular weight of band `k` at frequency `hz`.
double band_weight(int k, double hz);

// Orthonormal DCT-II and its inverse (DCT-III), any length.
void dct2(std::span<const double> in, std::span<double> out);
void idct2(std::span<const double> in, std::span<double> out);

}  // namespace alovc::bark

#endif  // ALOVC_BARK_H_
