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

#include "alovc/bark.h"

#include <cassert>
#include <cmath>
#include <numbers>

namespace alovc::bark {

double band_weight(int k, double hz) {
  const double c = kBandCenterHz[k];
  if (hz == c) return 1.0;
  if (hz < c) {
    if (k == 0) return 0.0;
    const double lo = kBandCenterHz[k - 1];
    return hz > lo ? (hz - lo) / (c - lo) : 0.0;
  }
  if (k == kNumBands - 1) return 0.0;
  const double hi = kBandCenterHz[k + 1];
  return hz < hi ? (hi - hz) / (hi - c) : 0.0;
}

void dct2(std::span<const double> in, std::span<double> out) {
  assert(in.size() == out.size());
  const std::size_t n = in.size();
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += in[i] * std::cos(std::numbers::pi * k * (i + 0.5) / n);
    }
    out[k] = acc * (k == 0 ? s0 : sk);
  }
}

void idct2(std::span<const double> in, std::span<double> out) {
  assert(in.size() == out.size());
  const std::size_t n = in.size();
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = in[0] * s0;
    for (std::size_t k = 1; k < n; ++k) {
      acc += in[k] * sk * std::cos(std::numbers::pi * k * (i + 0.5) / n);
    }
    out[i] = acc;
  }
}

}  // namespace alovc::bark
