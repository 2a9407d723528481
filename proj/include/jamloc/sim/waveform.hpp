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

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "jamloc/sim/snapshot.hpp"

namespace jamloc::sim {

using Complex = std::complex<double>;

inline constexpr double kMinBandwidthHz = 0.2e6;
inline constexpr double kMaxBandwidthHz = 60e6;
inline constexpr double kMinPowerDbm = -20.0;
inline constexpr double kMaxPowerDbm = 10.0;

struct JammerProfile {
  JammerClass jammer_class = JammerClass::Chirp;
  std::uint32_t subclass = 0;
  double bandwidth_hz = 20e6;
  double power_dbm = 0.0;
  int hops = 4;              // FrequencyHopping: hops per snapshot
  int tones = 5;             // Multitone: tone count M
  double duty_cycle = 0.3;   // Pulsed
  double pulse_period_s = 2.56e-6;

  // Throws DomainError outside the bandwidth/power ranges.
  void validate() const;
};

struct WaveformTiming {
  std::size_t sweep_period = 0;  // chirp/pulse repetition in samples; 0 -> n
  double time_offset = 0.0;      // samples into the repetition at index 0
};

// Unit-average-power complex baseband of `n` samples at `fs`.
// Throws DomainError when bandwidth >= fs.
std::vector<Complex> gen_baseband(const JammerProfile& profile, std::size_t n, double fs, std::mt19937_64& rng,
                                  WaveformTiming timing = {});

// Surrogate subclass: class * 4 + log-spaced bandwidth bucket.
std::uint32_t subclass_for(JammerClass c, double bandwidth_hz);
inline constexpr std::uint32_t kSubclassBuckets = 4;

}  // namespace jamloc::sim
