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
#include <optional>
#include <string>

#include "jamloc/cli/config.hpp"

namespace jamloc::cli {

struct CommonOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::size_t jobs = 1;
  bool overwrite = false;
  Scale scale = Scale::Desk;
};

// Each command returns 0 on success and throws jamloc::Error on failure.
// Output directories are created; a nonempty one requires `overwrite`.

// Writes train.gjld (training split of sim.train_scenario) and test.gjld
// (its test split followed by every held-out scenario).
int cmd_simulate(const CommonOptions& opt);
// Reads train.gjld/test.gjld from `in`, writes train.feat/test.feat.
int cmd_featurize(const CommonOptions& opt, const std::filesystem::path& in);
// Trains n_seeds models; writes model.gjw (best seed), model_seed<k>.gjw,
// history_seed<k>.csv, seeds.csv, metrics.csv, per_position.csv, config.cfg.
int cmd_train(const CommonOptions& opt, const std::filesystem::path& data);
// Writes metrics.csv (one row per scenario tag), per_position.csv and, for
// models with a class head, confusion.csv.
int cmd_eval(const CommonOptions& opt, const std::filesystem::path& checkpoint, const std::filesystem::path& data);
// Runs the gamma and/or dropout grids; writes sweep.csv and config.cfg.
int cmd_sweep(const CommonOptions& opt, const std::filesystem::path& data);
// Aggregates the CSV files under `run_dir` into report.md and bins
// per-position errors into position_map.csv.
int cmd_report(const std::filesystem::path& run_dir);

// Feature bundles of a split: `<dir>/<split>.feat` when present, otherwise
// features extracted from `<dir>/<split>.gjld`. A regular file path is read
// directly.
std::vector<dsp::FeatureBundle> load_bundles(const std::filesystem::path& dir_or_file, const std::string& split);

}  // namespace jamloc::cli
