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

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace jamloc {

inline constexpr std::size_t kPatches = 4;

enum class JammerClass : int { Chirp = 0, FrequencyHopping, Modulated, Multitone, Pulsed, Noise };
inline constexpr int kJammerClasses = 6;

const char* to_string(JammerClass c);

// Ground truth of one snapshot. Displacement is jammer minus antenna centre.
struct Label {
  double dx = 0.0, dy = 0.0, dz = 0.0;  // meters
  double azimuth_deg = 0.0;              // atan2(dy, dx), [-180, 180)
  double elevation_deg = 0.0;            // atan2(dz, hypot(dx, dy)), [-90, 90]
  int jammer_class = 0;
  std::uint32_t subclass = 0;

  static Label from_displacement(double dx, double dy, double dz, int jammer_class, std::uint32_t subclass) {
    Label l;
    l.dx = dx;
    l.dy = dy;
    l.dz = dz;
    l.azimuth_deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    if (l.azimuth_deg >= 180.0) l.azimuth_deg -= 360.0;
    l.elevation_deg = std::atan2(dz, std::hypot(dx, dy)) * 180.0 / std::numbers::pi;
    l.jammer_class = jammer_class;
    l.subclass = subclass;
    return l;
  }

  bool operator==(const Label&) const = default;
};

// Four patches of complex baseband samples stored channel-major.
struct IQSnapshot {
  std::size_t snapshot_len = 0;
  std::vector<std::complex<float>> samples;  // kPatches * snapshot_len
  Label label;
  std::string scenario_tag;

  std::span<const std::complex<float>> channel(std::size_t k) const {
    return std::span<const std::complex<float>>(samples).subspan(k * snapshot_len, snapshot_len);
  }
  std::span<std::complex<float>> channel(std::size_t k) {
    return std::span<std::complex<float>>(samples).subspan(k * snapshot_len, snapshot_len);
  }

  bool operator==(const IQSnapshot&) const = default;
};

}  // namespace jamloc
