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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jamloc/dsp/features.hpp"
#include "jamloc/model/common.hpp"
#include "jamloc/sim/geometry.hpp"
#include "jamloc/train/loss.hpp"
#include "jamloc/train/metrics.hpp"

namespace jamloc::train {

struct TrainConfig {
  double gamma = 1.0;
  RegressionLoss loss = RegressionLoss::Mse;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t batch_size = 64;
  int epochs = 30;
  int n_seeds = 3;
  std::vector<double> milestone_fractions{0.6, 0.85};  // of `epochs`
  double lr_decay_factor = 0.1;
  double clip_grad_norm = 5.0;  // global gradient norm cap; 0 disables
  // Best-checkpoint selection uses test samples carrying this tag (all test
  // samples when none do).
  std::string select_tag = "Random";
  bool evaluate_each_epoch = true;

  std::vector<int> milestones() const;
  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;  // mean batch loss
  std::optional<MetricsReport> test;
};

struct TrainResult {
  int best_epoch = -1;
  std::optional<MetricsReport> best_test;
  std::vector<EpochLog> history;
};

// Seeded mini-batch SGD. On return the model holds the parameters of the
// epoch with the lowest test delta_d (the last epoch when `test` is empty).
// Divergence raises NumericError naming epoch and step.
TrainResult train_model(model::Model& model, std::span<const dsp::FeatureBundle> train,
                        std::span<const dsp::FeatureBundle> test, const dsp::NormalizationSpec& norm,
                        const TrainConfig& cfg, std::uint64_t seed);

std::vector<model::Prediction> predict(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                                       const dsp::NormalizationSpec& norm, std::size_t batch_size = 64);

MetricsReport evaluate(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                       const dsp::NormalizationSpec& norm, std::size_t batch_size = 64);

struct PositionRecord {
  std::string scenario_tag;
  double x = 0.0, y = 0.0, z = 0.0;  // jammer position in hall coordinates
  double azimuth_error_deg = 0.0;
  double distance_error_m = 0.0;
};

struct ScenarioReport {
  std::string scenario_tag;
  MetricsReport metrics;
};

struct ScenarioEval {
  std::vector<ScenarioReport> reports;  // first-appearance order of tags
  std::vector<PositionRecord> positions;
  std::vector<model::Prediction> predictions;
};

// Per-tag metrics and per-sample position records. When `tags` is nonempty
// only those tags are evaluated and an absent tag raises ConfigError.
ScenarioEval scenario_eval(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                           const dsp::NormalizationSpec& norm, std::span<const std::string> tags = {},
                           const sim::Vec3& antenna = {20.0, 1.0, 1.5});

}  // namespace jamloc::train
