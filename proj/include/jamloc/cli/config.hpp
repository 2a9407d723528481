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

#include <filesystem>
#include <string>
#include <vector>

#include "jamloc/model/fusion.hpp"
#include "jamloc/model/mcaff.hpp"
#include "jamloc/sim/scenario.hpp"
#include "jamloc/train/sweep.hpp"
#include "jamloc/train/trainer.hpp"

namespace jamloc::cli {

enum class Scale { Desk, Paper };
Scale scale_from_string(const std::string& s);

struct SimSection {
  std::string train_scenario = "Random";
  std::vector<std::string> heldout = sim::heldout_tags();
  double test_fraction = 0.2;
  double noise_floor_dbm = -90.0;
  double power_dbm = 0.0;
  double bandwidth_mhz = 20.0;
  std::size_t max_snapshots = 0;  // 0 keeps the preset count
};

struct ModelSection {
  model::ModelKind kind = model::ModelKind::Fusion;
  unsigned branches = model::kAllBranches;
  std::string mcaff_paths = "IQ+FFT+CFO+STFT";
  double dropout_pre = 0.1;
  double dropout_post = 0.0;
  bool with_classifier = false;
};

struct SweepSection {
  std::string grid = "both";  // gamma | dropout | both
  train::SweepObjective objective = train::SweepObjective::DeltaD;
};

// Text config: INI sections [sim], [features], [model], [train], [sweep]
// plus a top-level `seed`. Unknown keys are rejected as a group.
struct RunConfig {
  std::uint64_t seed = 1;
  SimSection sim;
  std::string normalization = "train_split";
  ModelSection model;
  train::TrainConfig train;
  SweepSection sweep;

  // Presets for every requested scenario, with [sim] overrides and scale.
  sim::SimConfig sim_config(const std::string& scenario, Scale scale) const;
  model::FusionConfig fusion_config() const;
  model::McaffConfig mcaff_config() const;
  std::unique_ptr<model::Model> make_model(std::uint64_t init_seed, double p_pre, double p_post) const;
  void apply_scale(Scale scale);
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
// Round-trips through parse_config.
std::string to_text(const RunConfig& cfg);

unsigned branches_from_string(const std::string& s);  // "spec,iq,aoa"
std::string branches_to_string(unsigned branches);

}  // namespace jamloc::cli
