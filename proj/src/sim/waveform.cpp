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

#include "jamloc/sim/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jamloc/dsp/fft.hpp"
#include "jamloc/error.hpp"

namespace jamloc {

const char* to_string(JammerClass c) {
  switch (c) {
    case JammerClass::Chirp: return "Chirp";
    case JammerClass::FrequencyHopping: return "FrequencyHopping";
    case JammerClass::Modulated: return "Modulated";
    case JammerClass::Multitone: return "Multitone";
    case JammerClass::Pulsed: return "Pulsed";
    case JammerClass::Noise: return "Noise";
  }
  return "?";
}

}  // namespace jamloc

namespace jamloc::sim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Complex> chirp(std::size_t n, double fs, double bw, double period, double offset, double phase0) {
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = std::fmod(static_cast<double>(i) + offset, period);
    const double phase = kTwoPi / fs * (-0.5 * bw * tau + 0.5 * bw / period * tau * tau);
    x[i] = std::polar(1.0, phase + phase0);
  }
  return x;
}

}  // namespace

void JammerProfile::validate() const {
  if (bandwidth_hz < kMinBandwidthHz || bandwidth_hz > kMaxBandwidthHz) {
    throw DomainError("jammer bandwidth " + std::to_string(bandwidth_hz) + " Hz outside [0.2 MHz, 60 MHz]");
  }
  if (power_dbm < kMinPowerDbm || power_dbm > kMaxPowerDbm) {
    throw DomainError("jammer power " + std::to_string(power_dbm) + " dBm outside [-20, 10]");
  }
  if (hops < 1 || tones < 1) throw DomainError("jammer hops and tones must be positive");
  if (duty_cycle <= 0.0 || duty_cycle > 1.0) throw DomainError("pulse duty cycle must lie in (0,1]");
}

std::vector<Complex> gen_baseband(const JammerProfile& profile, std::size_t n, double fs, std::mt19937_64& rng,
                                  WaveformTiming timing) {
  if (!(profile.bandwidth_hz < fs)) {
    throw DomainError("gen_baseband: bandwidth " + std::to_string(profile.bandwidth_hz) +
                      " Hz must be below the sample rate " + std::to_string(fs) + " Hz");
  }
  if (n == 0) throw DomainError("gen_baseband: zero length");
  const double bw = profile.bandwidth_hz;
  const double period = static_cast<double>(timing.sweep_period ? timing.sweep_period : n);
  const double offset = timing.time_offset;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Complex> x;

  switch (profile.jammer_class) {
    case JammerClass::Chirp:
      x = chirp(n, fs, bw, period, offset, kTwoPi * uni(rng));
      break;
    case JammerClass::Pulsed: {
      x = chirp(n, fs, bw, period, offset, kTwoPi * uni(rng));
      const double pulse = std::max(2.0, profile.pulse_period_s * fs);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::fmod(static_cast<double>(i) + offset, pulse) >= profile.duty_cycle * pulse) x[i] = 0.0;
      }
      break;
    }
    case JammerClass::FrequencyHopping: {
      const double hop_len = period / profile.hops;
      std::vector<double> freqs;
      double phase = kTwoPi * uni(rng);
      x.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto hop = static_cast<std::size_t>((static_cast<double>(i) + offset) / hop_len);
        while (freqs.size() <= hop) freqs.push_back(bw * (uni(rng) - 0.5));
        x[i] = std::polar(1.0, phase);
        phase += kTwoPi * freqs[hop] / fs;
      }
      break;
    }
    case JammerClass::Modulated: {
      // QPSK at one symbol per 1/B seconds with rectangular pulses.
      const double phase0 = kTwoPi * uni(rng);
      std::uniform_int_distribution<int> sym(0, 3);
      std::vector<int> symbols;
      x.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>((static_cast<double>(i) + offset) * bw / fs);
        while (symbols.size() <= k) symbols.push_back(sym(rng));
        x[i] = std::polar(1.0, phase0 + std::numbers::pi / 4.0 + std::numbers::pi / 2.0 * symbols[k]);
      }
      break;
    }
    case JammerClass::Multitone: {
      x.assign(n, Complex(0.0, 0.0));
      const int m = profile.tones;
      for (int t = 0; t < m; ++t) {
        const double f = -0.5 * bw + bw * (t + 0.5) / m;
        const double phase0 = kTwoPi * uni(rng);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] += std::polar(1.0, phase0 + kTwoPi * f * (static_cast<double>(i) + offset) / fs);
        }
      }
      break;
    }
    case JammerClass::Noise: {
      std::size_t len = 1;
      while (len < n) len <<= 1;
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<Complex> white(len);
      for (auto& v : white) v = Complex(gauss(rng), gauss(rng));
      auto spec = dsp::fft(white);
      for (std::size_t k = 0; k < len; ++k) {
        const double f = (k < len / 2 ? static_cast<double>(k) : static_cast<double>(k) - len) * fs / len;
        if (std::abs(f) > 0.5 * bw) spec[k] = 0.0;
      }
      auto shaped = dsp::ifft(spec);
      x.assign(shaped.begin(), shaped.begin() + static_cast<std::ptrdiff_t>(n));
      break;
    }
  }

  double power = 0.0;
  for (const auto& v : x) power += std::norm(v);
  power /= static_cast<double>(n);
  if (!(power > 0.0)) throw DomainError("gen_baseband: waveform has no energy");
  const double g = 1.0 / std::sqrt(power);
  for (auto& v : x) v *= g;
  return x;
}

std::uint32_t subclass_for(JammerClass c, double bandwidth_hz) {
  const double lo = std::log10(kMinBandwidthHz), hi = std::log10(kMaxBandwidthHz);
  const double pos = (std::log10(std::clamp(bandwidth_hz, kMinBandwidthHz, kMaxBandwidthHz)) - lo) / (hi - lo);
  const auto bucket = std::min<std::uint32_t>(kSubclassBuckets - 1, static_cast<std::uint32_t>(pos * kSubclassBuckets));
  return static_cast<std::uint32_t>(c) * kSubclassBuckets + bucket;
}

}  // namespace jamloc::sim
