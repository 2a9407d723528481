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

#include <span>
#include <vector>

#include "jamloc/nn/tensor.hpp"

namespace jamloc::nn {

struct SgdOptions {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::vector<int> milestones;  // sorted epoch indices
  double lr_decay_factor = 0.1;
};

// SGD with momentum, coupled L2 weight decay and a multi-step schedule:
//   v <- momentum*v + grad + weight_decay*param
//   param <- param - lr(epoch)*v
class Sgd {
 public:
  Sgd(std::vector<Tensor> params, SgdOptions options);

  // lr(epoch) = base * factor^(number of milestones <= epoch)
  double learning_rate(int epoch) const;

  // Applies one update and clears gradients. Throws if any parameter has no
  // gradient buffer.
  void step(int epoch);

  void zero_grad();
  const SgdOptions& options() const { return options_; }
  const std::vector<std::vector<double>>& velocity() const { return velocity_; }

 private:
  std::vector<Tensor> params_;
  SgdOptions options_;
  std::vector<std::vector<double>> velocity_;
};

// Rescales all gradients so their joint L2 norm is at most `max_norm`;
// returns the norm before rescaling. Parameters without gradients are skipped.
double clip_grad_norm(std::span<Tensor> params, double max_norm);

}  // namespace jamloc::nn
