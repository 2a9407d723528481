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

#include "jamloc/dsp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jamloc/error.hpp"

namespace jamloc::dsp {

Channels to_channels(const IQSnapshot& snapshot) {
  Channels out;
  for (std::size_t k = 0; k < kPatches; ++k) {
    auto src = snapshot.channel(k);
    out[k].assign(src.begin(), src.end());
  }
  return out;
}

double minmax_db(double db, double min_db, double max_db) {
  const double c = std::clamp(db, min_db, max_db);
  return (c - min_db) / (max_db - min_db);
}

std::vector<double> spectrogram_channel(std::span<const Complex> x, double min_db, double max_db) {
  if (x.size() != 1024) {
    throw ShapeError("spectrogram: expected 1024 samples per patch, got " + std::to_string(x.size()));
  }
  const auto spectrum = fft(x);
  const double n = static_cast<double>(x.size());
  std::vector<double> cells(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double db = 10.0 * std::log10(std::norm(spectrum[i]) / n + kPowerFloor);
    cells[i] = minmax_db(db, min_db, max_db);
  }
  return fftshift<double>(cells);
}

std::vector<double> spectrogram(const Channels& channels, double min_db, double max_db) {
  std::vector<double> out;
  out.reserve(kPatches * 1024);
  for (const auto& ch : channels) {
    auto cells = spectrogram_channel(ch, min_db, max_db);
    out.insert(out.end(), cells.begin(), cells.end());
  }
  return out;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

std::vector<double> welch_psd(std::span<const Complex> x, std::size_t segment, std::size_t overlap) {
  if (segment == 0 || segment > x.size()) {
    throw DomainError("welch_psd: segment " + std::to_string(segment) + " exceeds signal length " +
                      std::to_string(x.size()));
  }
  if (overlap >= segment) throw DomainError("welch_psd: overlap must be smaller than the segment");
  const auto w = hann(segment);
  double w_energy = 0.0;
  for (double v : w) w_energy += v * v;
  const std::size_t step = segment - overlap;
  std::vector<double> acc(segment, 0.0);
  std::size_t count = 0;
  std::vector<Complex> buf(segment);
  for (std::size_t start = 0; start + segment <= x.size(); start += step) {
    for (std::size_t i = 0; i < segment; ++i) buf[i] = x[start + i] * w[i];
    const auto spec = fft(buf);
    for (std::size_t i = 0; i < segment; ++i) acc[i] += std::norm(spec[i]) / w_energy;
    ++count;
  }
  std::vector<double> out(segment);
  for (std::size_t i = 0; i < segment; ++i) {
    out[i] = 10.0 * std::log10(acc[i] / static_cast<double>(count) + kPowerFloor);
  }
  return out;
}

StftResult stft(std::span<const Complex> x, std::size_t window, std::size_t hop) {
  if (hop == 0) throw DomainError("stft: hop must be positive");
  if (!is_power_of_two(window)) throw DomainError("stft: window " + std::to_string(window) + " is not a power of two");
  if (window > x.size()) throw DomainError("stft: window longer than signal");
  const auto w = hann(window);
  StftResult r;
  r.bins = window;
  r.frames = (x.size() - window) / hop + 1;
  r.magnitude.assign(r.bins * r.frames, 0.0);
  std::vector<Complex> buf(window);
  for (std::size_t t = 0; t < r.frames; ++t) {
    for (std::size_t i = 0; i < window; ++i) buf[i] = x[t * hop + i] * w[i];
    const auto spec = fft(buf);
    for (std::size_t f = 0; f < window; ++f) {
      const std::size_t row = (f + window / 2) % window;  // shifted: DC at row window/2
      r.magnitude[row * r.frames + t] = std::abs(spec[f]);
    }
  }
  return r;
}

std::vector<double> cfo_accumulated(std::span<const Complex> x) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    const Complex prod = x[n] * std::conj(x[n - 1]);
    const double inc = (prod == Complex(0.0, 0.0)) ? 0.0 : std::arg(prod);
    c[n] = c[n - 1] + inc;
  }
  return c;
}

}  // namespace jamloc::dsp
