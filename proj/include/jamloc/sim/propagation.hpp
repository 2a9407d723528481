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

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jamloc/dsp/spectral.hpp"
#include "jamloc/sim/geometry.hpp"
#include "jamloc/sim/waveform.hpp"

namespace jamloc::sim {

// Vertical absorber panel: xy segment a-b extruded over [z_min, z_max].
struct WallSegment {
  Vec3 a, b;
  double z_min = 0.0;
  double z_max = 3.0;
  double transmission_loss_db = 15.0;
  double reflection_coeff = 0.2;
};

// Infinite plane through `point` with normal `normal`.
struct PlanarReflector {
  std::string name;
  Vec3 point;
  Vec3 normal;
  double reflection_coeff = 0.3;
};

struct SceneConfig {
  Vec3 hall_extent{40.0, 33.0, 8.0};
  Vec3 antenna_position{20.0, 1.0, 1.5};
  std::vector<WallSegment> walls;
  std::vector<PlanarReflector> reflectors;
  double noise_floor_dbm = -90.0;
  double sample_rate = 1e8;
  std::size_t snapshot_len = 1024;
  bool add_noise = true;

  // Empty 40 x 33 x 8 m hall; floor, ceiling and the four walls reflect.
  static SceneConfig hall();
  double snapshot_duration() const { return static_cast<double>(snapshot_len) / sample_rate; }
};

struct Path {
  double length = 0.0;       // meters, source to array centre
  Vec3 direction;            // propagation direction at the array (unit)
  double gain = 1.0;         // reflection and wall-crossing amplitude factors
  int wall_crossings = 0;
  std::string via;           // "direct" or reflector name
};

// Line of sight plus first-order image-source reflections.
std::vector<Path> trace_paths(const SceneConfig& scene, const Vec3& jammer_pos);

// Image of `source` mirrored through the reflector plane.
Vec3 image_point(const PlanarReflector& plane, const Vec3& source);

// Product of 10^(-loss/20) over every wall the segment p-q crosses, skipping
// index `skip` (the wall a reflection happens on).
double crossing_gain(const SceneConfig& scene, const Vec3& p, const Vec3& q, int* crossings = nullptr,
                     std::ptrdiff_t skip = -1);

// Extra samples gen_baseband must provide in front of the snapshot so every
// traced path delay fits.
inline constexpr std::size_t kDelayPad = 256;

// Sum over paths of amplitude * steering * delayed waveform, plus AWGN at the
// scene noise floor. `waveform` is unit-power baseband of snapshot_len +
// kDelayPad samples; the snapshot observes samples [kDelayPad - d_p, ...).
// Throws DomainError when the jammer sits on the antenna or outside the hall.
dsp::Channels propagate_channels(const SceneConfig& scene, const ArrayGeometry& geometry, const Vec3& jammer_pos,
                                 std::span<const Complex> waveform, double tx_power_dbm, std::mt19937_64& rng);

IQSnapshot propagate(const SceneConfig& scene, const ArrayGeometry& geometry, const Vec3& jammer_pos,
                     std::span<const Complex> waveform, double tx_power_dbm, std::mt19937_64& rng,
                     const JammerProfile& profile, std::string scenario_tag = "Random");

double dbm_to_watts(double dbm);

}  // namespace jamloc::sim
