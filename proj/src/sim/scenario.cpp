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

#include "jamloc/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "jamloc/error.hpp"

namespace jamloc::sim {

const std::vector<std::string>& heldout_tags() {
  static const std::vector<std::string> tags{"Wall 1", "Wall 2", "Wall 3", "Wall 4", "Wall 5", "Meander"};
  return tags;
}

namespace {

WallSegment panel(double ax, double ay, double bx, double by, double z_max, double loss, double refl) {
  WallSegment w;
  w.a = {ax, ay, 0.0};
  w.b = {bx, by, 0.0};
  w.z_min = 0.0;
  w.z_max = z_max;
  w.transmission_loss_db = loss;
  w.reflection_coeff = refl;
  return w;
}

void grid_layout(SimConfig& c) {
  c.trajectory = TrajectoryKind::GridCircles;
  c.trajectory_params.radii = {0.5, 1.0, 1.5, 2.0, 2.5};
  c.trajectory_params.points_per_circle = 15;
  c.trajectory_params.grid_spacing = 10.0;
  c.max_snapshots = 300;
}

}  // namespace

SimConfig scenario_preset(const std::string& tag) {
  SimConfig c;
  c.scenario = tag;
  if (tag == "Random") return c;
  if (tag == "Generator") {
    c.profile_mode = ProfileMode::Catalog;
    c.trajectory_params.points_per_circle = 125;  // 2500 poses
    return c;
  }
  if (tag == "Wall 1") {
    grid_layout(c);
    c.scene.walls = {panel(16, 5, 24, 5, 3.0, 15.0, 0.2)};
  } else if (tag == "Wall 2") {
    grid_layout(c);
    c.scene.walls = {panel(14, 5, 26, 5, 3.0, 20.0, 0.2), panel(14, 5, 14, 11, 3.0, 20.0, 0.2),
                     panel(26, 5, 26, 11, 3.0, 20.0, 0.2)};
  } else if (tag == "Wall 3") {
    grid_layout(c);
    c.scene.walls = {panel(14, 6, 26, 6, 3.0, 15.0, 0.6), panel(14, 6, 14, 2, 3.0, 15.0, 0.6),
                     panel(26, 6, 26, 2, 3.0, 15.0, 0.6)};
  } else if (tag == "Wall 4") {
    grid_layout(c);
    c.scene.walls = {panel(8, 3, 32, 3, 4.0, 10.0, 0.6)};
  } else if (tag == "Wall 5") {
    grid_layout(c);
    c.scene.walls = {panel(8, 3, 32, 3, 4.0, 15.0, 0.2)};
  } else if (tag == "Meander") {
    c.trajectory = TrajectoryKind::Meander;
    c.scene.walls = {panel(8, 3, 32, 3, 4.0, 15.0, 0.2)};
    c.max_snapshots = 80;
  } else {
    throw ConfigError("unknown scenario '" + tag + "'");
  }
  return c;
}

void apply_paper_scale(SimConfig& cfg) {
  if (cfg.scenario == "Random") {
    cfg.trajectory_params.points_per_circle = 1447;  // 28,940 poses (23,140 + 5,790 recorded)
  } else if (cfg.scenario == "Generator") {
    cfg.trajectory_params.points_per_circle = 750;
  } else if (cfg.scenario == "Meander") {
    cfg.trajectory_params.points_per_row = 40;
    cfg.max_snapshots = 884;
  } else {
    cfg.trajectory_params.points_per_circle = 50;
    cfg.max_snapshots = 3620;
  }
}

std::vector<Vec3> dataset_poses(const SimConfig& cfg) {
  auto poses = gen_trajectory(cfg.trajectory, cfg.trajectory_params, cfg.heights);
  if (poses.empty()) throw DomainError("make_dataset: empty trajectory");
  if (cfg.max_snapshots && cfg.max_snapshots < poses.size()) {
    std::vector<Vec3> picked;
    picked.reserve(cfg.max_snapshots);
    for (std::size_t i = 0; i < cfg.max_snapshots; ++i) picked.push_back(poses[i * poses.size() / cfg.max_snapshots]);
    poses = std::move(picked);
  }
  return poses;
}

namespace {

IQSnapshot simulate_pose(const SimConfig& cfg, const Vec3& pos, std::uint64_t seed, std::size_t index) {
  auto rng = derive_rng(seed, index);
  JammerProfile profile = cfg.mobile;
  if (cfg.profile_mode == ProfileMode::Catalog) {
    if (cfg.classes.empty()) throw ConfigError("catalog profile mode needs at least one class");
    std::uniform_int_distribution<std::size_t> pick(0, cfg.classes.size() - 1);
    std::uniform_real_distribution<double> log_bw(std::log10(kMinBandwidthHz), std::log10(kMaxBandwidthHz));
    std::uniform_real_distribution<double> pw(kMinPowerDbm, kMaxPowerDbm);
    profile.jammer_class = cfg.classes[pick(rng)];
    profile.bandwidth_hz = std::pow(10.0, log_bw(rng));
    profile.power_dbm = pw(rng);
  }
  profile.subclass = subclass_for(profile.jammer_class, profile.bandwidth_hz);
  profile.validate();
  const std::size_t n = cfg.scene.snapshot_len;
  std::uniform_real_distribution<double> offset(0.0, static_cast<double>(n));
  WaveformTiming timing;
  timing.sweep_period = n;
  timing.time_offset = offset(rng);
  const auto wave = gen_baseband(profile, n + kDelayPad, cfg.scene.sample_rate, rng, timing);
  return propagate(cfg.scene, cfg.geometry, pos, wave, profile.power_dbm, rng, profile, cfg.scenario);
}

}  // namespace

std::vector<IQSnapshot> make_dataset(const SimConfig& cfg, std::uint64_t seed, std::size_t jobs) {
  const auto poses = dataset_poses(cfg);
  std::vector<IQSnapshot> out(poses.size());
  jobs = std::clamp<std::size_t>(jobs, 1, poses.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < poses.size(); ++i) out[i] = simulate_pose(cfg, poses[i], seed, i);
    return out;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < poses.size(); i += jobs) out[i] = simulate_pose(cfg, poses[i], seed, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::pair<std::vector<IQSnapshot>, std::vector<IQSnapshot>> split_train_test(std::vector<IQSnapshot> all,
                                                                             double test_fraction,
                                                                             std::uint64_t seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0) throw DomainError("split: test fraction must lie in (0,1)");
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto rng = derive_rng(seed, 0x5eed5eedULL);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(all.size())));
  std::vector<IQSnapshot> train, test;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < n_test ? test : train).push_back(std::move(all[order[k]]));
  }
  return {std::move(train), std::move(test)};
}

}  // namespace jamloc::sim
