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
#include <span>
#include <string>
#include <vector>

#include "jamloc/model/common.hpp"
#include "jamloc/sim/snapshot.hpp"

namespace jamloc::train {

// Mean of min(|d|, period - |d|), d = (pred - truth) mod period.
double angular_mae(std::span<const double> pred_deg, std::span<const double> truth_deg, double period = 360.0);
// Mean |pred - truth| without wrap (elevation).
double linear_mae(std::span<const double> pred, std::span<const double> truth);
// sqrt(mae_x^2 + mae_y^2 + mae_z^2)
double dist_error(double mae_x, double mae_y, double mae_z);

struct MetricsReport {
  std::size_t n = 0;
  double mae_x = 0.0, mae_y = 0.0, mae_z = 0.0;
  double delta_d = 0.0;           // norm of the per-axis MAEs
  double mean_euclidean = 0.0;    // mean per-sample displacement error
  double azimuth_mae = 0.0;       // degrees
  double elevation_mae = 0.0;     // degrees
  std::optional<double> accuracy_classes;     // percent
  std::optional<double> accuracy_subclasses;  // percent
};

MetricsReport compute_metrics(std::span<const model::Prediction> preds, std::span<const Label> labels);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

// Rows index the truth, columns the prediction. Throws DomainError on ids
// outside [0,n).
ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> truths, std::size_t n);
double accuracy(const ConfusionMatrix& m);  // percent

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};
MeanStd mean_std(std::span<const double> v);

}  // namespace jamloc::train
