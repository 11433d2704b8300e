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

#include "alovc/kernels.h"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdlib>

namespace alovc::kernels {
namespace {

int threads_from_env() {
  const char* env = std::getenv("ALOVC_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{threads_from_env()};
  return threads;
}

// Inner body shared by both affine variants: accumulates columns [j0, j1).
inline void affine_columns(std::span<const float> x, std::span<const float> w,
                           std::span<const float> b, std::span<float> y,
                           std::size_t j0, std::size_t j1) {
  const std::size_t cols = y.size();
  float* out = y.data();
  std::fill(out + j0, out + j1, 0.0f);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const float xi = x[i];
    const float* row = w.data() + i * cols;
    for (std::size_t j = j0; j < j1; ++j) out[j] += xi * row[j];
  }
  if (!b.empty()) {
    for (std::size_t j = j0; j < j1; ++j) out[j] += b[j];
  }
}

inline double lag_sum(std::span<const double> buf, std::size_t start,
                      std::size_t len, std::size_t lag) {
  const double* a = buf.data() + start;
  const double* c = buf.data() + start - lag;
  double acc = 0.0;
  for (std::size_t n = 0; n < len; ++n) acc += a[n] * c[n];
  return acc;
}

}  // namespace

int num_threads() { return thread_setting().load(std::memory_order_relaxed); }

void set_num_threads(int n) {
  thread_setting().store(std::max(1, n), std::memory_order_relaxed);
}

namespace serial {

void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y) {
  assert(w.size() == x.size() * y.size());
  assert(b.empty() || b.size() == y.size());
  affine_columns(x, w, b, y, 0, y.size());
}

void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out) {
  assert(start >= min_lag + out.size() - 1);
  assert(start + len <= buf.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = lag_sum(buf, start, len, min_lag + k);
}

}  // namespace serial

namespace omp {

void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y, int threads) {
  assert(w.size() == x.size() * y.size());
  assert(b.empty() || b.size() == y.size());
  const std::size_t cols = y.size();
#pragma omp parallel num_threads(threads)
  {
    const std::size_t nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t id = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t chunk = (cols + nt - 1) / nt;
    const std::size_t j0 = std::min(cols, id * chunk);
    const std::size_t j1 = std::min(cols, j0 + chunk);
    if (j0 < j1) affine_columns(x, w, b, y, j0, j1);
  }
}

void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out,
                int threads) {
  assert(start >= min_lag + out.size() - 1);
  assert(start + len <= buf.size());
  const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long k = 0; k < n; ++k)
    out[k] = lag_sum(buf, start, len, min_lag + static_cast<std::size_t>(k));
}

}  // namespace omp

void affine(std::span<const float> x, std::span<const float> w,
            std::span<const float> b, std::span<float> y) {
  const int threads = num_threads();
  if (threads > 1 && x.size() * y.size() >= kParallelMinWork) {
    omp::affine(x, w, b, y, threads);
  } else {
    serial::affine(x, w, b, y);
  }
}

void lagged_dot(std::span<const double> buf, std::size_t start,
                std::size_t len, std::size_t min_lag, std::span<double> out) {
  const int threads = num_threads();
  if (threads > 1 && len * out.size() >= kParallelMinWork) {
    omp::lagged_dot(buf, start, len, min_lag, out, threads);
  } else {
    serial::lagged_dot(buf, start, len, min_lag, out);
  }
}

}  // namespace alovc::kernels
