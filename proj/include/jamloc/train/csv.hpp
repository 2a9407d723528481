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
#include <span>
#include <string>

#include "jamloc/train/sweep.hpp"
#include "jamloc/train/trainer.hpp"

namespace jamloc::train {

// Fixed "%.6f" formatting so identical values give identical files.
std::string fmt(double v);

// metrics.csv: scenario,n,mae_x,mae_y,mae_z,delta_d,mean_euclidean,
// azimuth_mae,elevation_mae,accuracy_classes,accuracy_subclasses
void write_metrics_csv(const std::filesystem::path& path, std::span<const ScenarioReport> reports);
// sweep.csv: kind,gamma,p_pre,p_post,seed,delta_d,mae_x,mae_y,mae_z,
// azimuth_mae,elevation_mae,*_std. Rows with kind=run carry one seed;
// kind=summary rows carry the mean in the metric columns and the sample
// standard deviation in the *_std columns; kind=best repeats the chosen cell.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
// confusion.csv: truth,pred_0,...,pred_{n-1}
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m);
// per_position.csv: scenario,x,y,z,azimuth_error_deg,distance_error_m
void write_per_position_csv(const std::filesystem::path& path, std::span<const PositionRecord> records);

}  // namespace jamloc::train
