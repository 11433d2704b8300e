#!/usr/bin/env python3
# Copyright 2026 The alovc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Offline MFCC reference for the 1 kHz full-scale sine golden file.

Written against numpy/scipy only, from the documented front-end conventions:
periodic Hann window of 400 samples, zero-padded 512-point FFT, samples in
16-bit PCM units, 40 HTK-mel triangles over 0-8000 Hz (triangles built in
the mel domain), natural log floored at 1e-10, orthonormal DCT-II, c0..c12.

Usage: mfcc_reference.py > tests/data/mfcc_1khz_sine.txt
"""

import numpy as np
from scipy.fft import dct
from scipy.signal import get_window

SR = 16000
WINDOW = 400
NFFT = 512
NUM_MELS = 40
NUM_CEPS = 13


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + hz / 700.0)


def mel_weights():
    edges = np.linspace(hz_to_mel(0.0), hz_to_mel(8000.0), NUM_MELS + 2)
    bin_mel = hz_to_mel(np.arange(NFFT // 2 + 1) * SR / NFFT)
    w = np.zeros((NUM_MELS, NFFT // 2 + 1))
    for m in range(NUM_MELS):
        lo, c, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (bin_mel > lo) & (bin_mel <= c)
        falling = (bin_mel > c) & (bin_mel < hi)
        w[m, rising] = (bin_mel[rising] - lo) / (c - lo)
        w[m, falling] = (hi - bin_mel[falling]) / (hi - c)
    return w


def mfcc(frame):
    x = frame.astype(np.float64) * 32768.0 * get_window("hann", WINDOW, fftbins=True)
    spec = np.fft.rfft(x, NFFT)
    power = spec.real ** 2 + spec.imag ** 2
    logmel = np.log(np.maximum(mel_weights() @ power, 1e-10))
    return dct(logmel, type=2, norm="ortho")[:NUM_CEPS]


def main():
    n = np.arange(WINDOW)
    # Full scale for 16-bit PCM; samples are stored as float32 by the engine.
    frame = (32767.0 / 32768.0 * np.sin(2.0 * np.pi * 1000.0 * n / SR)).astype(np.float32)
    print("# 1 kHz sine, amplitude 32767/32768, phase 0, 400 samples; c0..c12")
    for i, c in enumerate(mfcc(frame)):
        print(f"c{i}={c:.10f}")


if __name__ == "__main__":
    main()
