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

#include <cstdint>
#include <string>
#include <vector>

#include "jamloc/sim/propagation.hpp"
#include "jamloc/sim/trajectory.hpp"
#include "jamloc/sim/waveform.hpp"

namespace jamloc::sim {

// Mobile: every pose transmits `mobile` (the moving 20 MHz chirp jammer).
// Catalog: each pose draws a class, a log-uniform bandwidth and a uniform
// power from the full jammer ranges (the stationary generator recordings).
enum class ProfileMode { Mobile, Catalog };

struct SimConfig {
  std::string scenario = "Random";
  SceneConfig scene = SceneConfig::hall();
  ArrayGeometry geometry = ArrayGeometry::square();
  TrajectoryKind trajectory = TrajectoryKind::Circles;
  TrajectoryParams trajectory_params;
  std::vector<double> heights = default_heights();
  ProfileMode profile_mode = ProfileMode::Mobile;
  JammerProfile mobile;
  std::vector<JammerClass> classes{JammerClass::Chirp,     JammerClass::FrequencyHopping, JammerClass::Modulated,
                                   JammerClass::Multitone, JammerClass::Pulsed,           JammerClass::Noise};
  std::size_t max_snapshots = 0;  // evenly strided subset of poses; 0 keeps all
};

// Scenario tags of the held-out NLoS sets, in report order.
const std::vector<std::string>& heldout_tags();

// "Random", "Wall 1".."Wall 5", "Meander" or "Generator" at desk scale.
SimConfig scenario_preset(const std::string& tag);

// Scales pose counts to the recorded dataset sizes.
void apply_paper_scale(SimConfig& cfg);

// Poses of the configured trajectory after subsampling.
std::vector<Vec3> dataset_poses(const SimConfig& cfg);

// One snapshot per pose. Pose i draws from derive_rng(seed, i), so the
// result does not depend on `jobs`.
std::vector<IQSnapshot> make_dataset(const SimConfig& cfg, std::uint64_t seed, std::size_t jobs = 1);

// Deterministic shuffled split; returns (train, test).
std::pair<std::vector<IQSnapshot>, std::vector<IQSnapshot>> split_train_test(std::vector<IQSnapshot> all,
                                                                             double test_fraction,
                                                                             std::uint64_t seed);

}  // namespace jamloc::sim
