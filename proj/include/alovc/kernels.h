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

// Data-parallel inner loops shared by the network runtime and the front end.
//
// Every kernel exists twice: a serial reference in `serial::` and an OpenMP
// version in `omp::`. The OpenMP versions split work over output elements
// only, so each output is accumulated in exactly the serial order and the two
// variants are bit-identical. The dispatching entry points pick the OpenMP
// path when more than one thread is configured and the problem is large
// enough to amortize a parallel region.

#ifndef ALOVC_KERNELS_H_
#define ALOVC_KERNELS_H_

#include <cstddef>
#include <span>

namespace alovc::kernels {

// Number of threads used by the dispatching kernels. Initialized from the
// ALOVC_THREADS environment variable (default 1).
int num_threads();
void set_num_threads(int n);

// Work (multiply-adds) below which dispatch always stays serial.
inline constexpr std::size_t kParallelMinWork = 1 << 16;

namespace serial {

// y = x * W + b, W stored input-major: W[i * y.size() + j].
void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y);

// out[k] = sum_{n < len} buf[start + n] * buf[start + n - (min_lag + k)].
void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out);

}  // namespace serial

namespace omp {

void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y, int threads);

void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out,
                int threads);

}  // namespace omp

void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y);

void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out);

}  // namespace alovc::kernels

#endif  // ALOVC_KERNELS_H_
