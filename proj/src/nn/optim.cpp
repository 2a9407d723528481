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

#include "jamloc/nn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamloc/error.hpp"

namespace jamloc::nn {

Sgd::Sgd(std::vector<Tensor> params, SgdOptions options) : params_(std::move(params)), options_(std::move(options)) {
  if (!(options_.learning_rate > 0.0)) throw DomainError("sgd: learning rate must be positive");
  if (options_.momentum < 0.0 || options_.momentum >= 1.0) throw DomainError("sgd: momentum must lie in [0,1)");
  if (options_.weight_decay < 0.0) throw DomainError("sgd: weight decay must be nonnegative");
  if (!(options_.lr_decay_factor > 0.0) || options_.lr_decay_factor > 1.0) {
    throw DomainError("sgd: lr decay factor must lie in (0,1]");
  }
  if (!std::is_sorted(options_.milestones.begin(), options_.milestones.end())) {
    throw DomainError("sgd: milestones must be sorted");
  }
  velocity_.reserve(params_.size());
  for (const auto& p : params_) velocity_.emplace_back(p.numel(), 0.0);
}

double Sgd::learning_rate(int epoch) const {
  double lr = options_.learning_rate;
  for (int m : options_.milestones) {
    if (m <= epoch) lr *= options_.lr_decay_factor;
  }
  return lr;
}

void Sgd::step(int epoch) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].has_grad()) {
      throw GraphError("sgd: parameter " + std::to_string(i) + " of shape " + to_string(params_[i].shape()) +
                       " has no gradient");
    }
  }
  const double lr = learning_rate(epoch);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].data();
    auto g = params_[i].grad();
    auto& v = velocity_[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      v[k] = options_.momentum * v[k] + g[k] + options_.weight_decay * w[k];
      w[k] -= lr * v[k];
    }
    params_[i].clear_grad();
  }
}

void Sgd::zero_grad() {
  for (auto& p : params_) p.clear_grad();
}

double clip_grad_norm(std::span<Tensor> params, double max_norm) {
  if (!(max_norm > 0.0)) throw DomainError("clip_grad_norm: max_norm must be positive");
  double ss = 0.0;
  for (const auto& p : params) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) ss += g * g;
  }
  const double norm = std::sqrt(ss);
  if (norm > max_norm) {
    const double f = max_norm / norm;
    for (auto& p : params) {
      if (!p.has_grad()) continue;
      for (double& g : p.grad()) g *= f;
    }
  }
  return norm;
}

}  // namespace jamloc::nn
