// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The jamloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "jamloc/dsp/fft.hpp"
#include "jamloc/sim/snapshot.hpp"

namespace jamloc::dsp {

// Four channels of double-precision complex baseband.
using Channels = std::array<std::vector<Complex>, kPatches>;

Channels to_channels(const IQSnapshot& snapshot);

inline constexpr double kSpecMinDb = -195.69;
inline constexpr double kSpecMaxDb = -19.89;
inline constexpr double kPowerFloor = 1e-20;

// Clamp to [min_db, max_db] then map linearly onto [0, 1].
double minmax_db(double db, double min_db = kSpecMinDb, double max_db = kSpecMaxDb);

// One patch: 1024-point FFT -> 10 log10(|X|^2/N + 1e-20) -> clamp/min-max ->
// fftshift. Result is row-major 32x32 (cell i at row i/32, col i%32).
std::vector<double> spectrogram_channel(std::span<const Complex> x, double min_db = kSpecMinDb,
                                        double max_db = kSpecMaxDb);
// [4,32,32] flattened.
std::vector<double> spectrogram(const Channels& channels, double min_db = kSpecMinDb, double max_db = kSpecMaxDb);

// Hann-windowed averaged periodogram in dB, natural FFT bin order.
std::vector<double> welch_psd(std::span<const Complex> x, std::size_t segment = 256, std::size_t overlap = 128);

struct StftResult {
  std::size_t bins = 0;    // F, rows (fftshifted: row bins/2 is DC)
  std::size_t frames = 0;  // T, columns
  std::vector<double> magnitude;  // row-major [F, T]
};

// Periodic-Hann STFT magnitudes; frames start at t*hop while they fit.
StftResult stft(std::span<const Complex> x, std::size_t window = 128, std::size_t hop = 64);

// c[0] = 0, c[n] = c[n-1] + arg(x[n] conj(x[n-1])); zero-magnitude pairs add 0.
std::vector<double> cfo_accumulated(std::span<const Complex> x);

// Periodic Hann window of length n.
std::vector<double> hann(std::size_t n);

}  // namespace jamloc::dsp
