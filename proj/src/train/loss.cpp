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

#include "jamloc/train/loss.hpp"

#include <cmath>

#include "jamloc/error.hpp"
#include "jamloc/nn/ops.hpp"

namespace jamloc::train {

namespace ops = nn::ops;

const char* to_string(RegressionLoss l) { return l == RegressionLoss::Mse ? "mse" : "l1"; }

RegressionLoss regression_loss_from_string(const std::string& s) {
  if (s == "mse") return RegressionLoss::Mse;
  if (s == "l1") return RegressionLoss::L1;
  throw ConfigError("unknown regression loss '" + s + "' (expected mse or l1)");
}

double circular_target(double raw_pred, double alpha_deg) {
  const double base = alpha_deg / 180.0;
  double best = base;
  for (double k : {-1.0, 1.0}) {
    const double cand = base + 2.0 * k;
    if (std::abs(cand - raw_pred) < std::abs(best - raw_pred)) best = cand;
  }
  return best;
}

LossTerms compute_loss(const ModelOutput& out, const BatchInputs& in, const LossConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw DomainError("loss: gamma must be positive");
  const std::size_t b = in.batch;
  if (out.disp.dim(0) != b || out.angle_raw.dim(0) != b) throw ShapeError("loss: batch size mismatch");
  auto regress = [&](const Tensor& p, const Tensor& t) {
    return cfg.kind == RegressionLoss::Mse ? ops::mse_loss(p, t) : ops::l1_loss(p, t);
  };
  const auto raw = out.angle_raw.data();
  std::vector<double> az(b), el(b);
  for (std::size_t i = 0; i < b; ++i) {
    az[i] = circular_target(raw[2 * i], in.azimuth_deg[i]);
    el[i] = in.elevation_deg[i] / 90.0;
  }
  LossTerms t;
  t.disp = regress(out.disp, in.disp_target);
  t.azimuth = regress(ops::column(out.angle_raw, 0), Tensor::from({b, 1}, std::move(az)));
  t.elevation = regress(ops::column(out.angle_raw, 1), Tensor::from({b, 1}, std::move(el)));
  t.total = ops::add(ops::add(ops::scale(t.disp, cfg.gamma), t.azimuth), t.elevation);
  if (cfg.use_classes && out.class_logits.defined()) {
    t.classes = ops::cross_entropy(out.class_logits, in.classes);
    t.total = ops::add(t.total, t.classes);
  }
  if (cfg.use_subclasses && out.subclass_logits.defined()) {
    t.subclasses = ops::cross_entropy(out.subclass_logits, in.subclasses);
    t.total = ops::add(t.total, t.subclasses);
  }
  return t;
}

}  // namespace jamloc::train
