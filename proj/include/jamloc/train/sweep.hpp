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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jamloc/train/trainer.hpp"

namespace jamloc::train {

struct SweepCell {
  double gamma = 1.0;
  double p_pre = 0.0;   // dropout before concatenation
  double p_post = 0.0;  // dropout after the head hidden layer
};

const std::vector<double>& gamma_values();    // {1/1000, 1/100, 1/10, 1/5, 1, 10}
const std::vector<double>& dropout_values();  // {0.1, 0.3, 0.5}

// Six cells over gamma_values() at fixed dropout.
std::vector<SweepCell> gamma_grid(double p_pre = 0.1, double p_post = 0.0);
// Six cells: each dropout rate before concatenation, then each after the head.
std::vector<SweepCell> dropout_grid(double gamma = 1.0);

struct SweepRow {
  SweepCell cell;
  int seed = 0;
  MetricsReport metrics;
};

struct SweepSummary {
  SweepCell cell;
  int n_seeds = 0;
  MeanStd delta_d, mae_x, mae_y, mae_z, azimuth, elevation;
};

enum class SweepObjective { DeltaD, Azimuth };

struct SweepResult {
  std::vector<SweepRow> rows;  // cell-major, then seed
  std::vector<SweepSummary> summaries;
  std::size_t best = 0;
};

// Unique argmin of the objective mean; ties go to the smaller gamma, then the
// smaller p_pre + p_post, then the earlier cell.
std::size_t best_cell(std::span<const SweepSummary> summaries, SweepObjective objective = SweepObjective::DeltaD);

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows, std::span<const SweepCell> cells);

using ModelFactory = std::function<std::unique_ptr<model::Model>(const SweepCell&, std::uint64_t init_seed)>;

// Trains every (cell, seed) pair; seeds are base_seed + k. `jobs` threads run
// independent pairs; results do not depend on `jobs`.
SweepResult run_sweep(const ModelFactory& factory, std::span<const dsp::FeatureBundle> train,
                      std::span<const dsp::FeatureBundle> test, const dsp::NormalizationSpec& norm,
                      const TrainConfig& base, std::span<const SweepCell> cells, int n_seeds, std::uint64_t base_seed,
                      std::size_t jobs = 1, SweepObjective objective = SweepObjective::DeltaD);

}  // namespace jamloc::train
