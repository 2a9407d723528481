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

#include "jamloc/model/common.hpp"

namespace jamloc::train {

using model::BatchInputs;
using model::ModelOutput;
using nn::Tensor;

enum class RegressionLoss { Mse, L1 };
const char* to_string(RegressionLoss l);
RegressionLoss regression_loss_from_string(const std::string& s);

struct LossConfig {
  double gamma = 1.0;  // weight of the displacement term
  RegressionLoss kind = RegressionLoss::Mse;
  bool use_classes = true;     // when the model emits class logits
  bool use_subclasses = true;  // when the model emits subclass logits
};

struct LossTerms {
  Tensor total;
  Tensor disp;       // unweighted
  Tensor azimuth;
  Tensor elevation;
  Tensor classes;     // undefined when unused
  Tensor subclasses;  // undefined when unused
};

// Representative of alpha/180 + 2k, k in {-1,0,1}, closest to `raw_pred`.
double circular_target(double raw_pred, double alpha_deg);

// gamma * L(disp) + L(azimuth, circular target) + L(elevation/90) + CE terms.
// Throws DomainError when gamma <= 0.
LossTerms compute_loss(const ModelOutput& out, const BatchInputs& in, const LossConfig& cfg);

}  // namespace jamloc::train
