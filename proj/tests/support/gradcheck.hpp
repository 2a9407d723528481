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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jamloc/nn/ops.hpp"
#include "jamloc/nn/tensor.hpp"

namespace jamloc::testing {

using nn::Tensor;

inline Tensor random_tensor(nn::Shape shape, std::mt19937_64& rng, bool requires_grad = false, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(nn::numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

struct GradReport {
  double worst = 0.0;       // largest per-tensor relative error
  std::string worst_name;
  std::size_t checked = 0;  // entries compared
};

// Compares reverse-mode gradients of `f` with central differences.
// Per tensor the error is ||analytic - numeric|| / max(||analytic||, ||numeric||, floor)
// over at most `max_entries` sampled coordinates.
inline GradReport gradcheck(const std::function<Tensor()>& f, std::vector<Tensor> wrt,
                            std::vector<std::string> names = {}, std::size_t max_entries = 24, double eps = 1e-6,
                            double floor = 1e-8, std::uint64_t seed = 99) {
  for (auto& t : wrt) t.clear_grad();
  Tensor loss = f();
  loss.backward();
  std::vector<std::vector<double>> analytic;
  for (auto& t : wrt) {
    if (t.has_grad()) analytic.emplace_back(t.grad().begin(), t.grad().end());
    else analytic.emplace_back(t.numel(), 0.0);
    t.clear_grad();
  }
  GradReport report;
  std::mt19937_64 pick(seed);
  nn::NoGradGuard guard;
  for (std::size_t k = 0; k < wrt.size(); ++k) {
    auto data = wrt[k].data();
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), pick);
    idx.resize(std::min(idx.size(), max_entries));
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (auto i : idx) {
      const double saved = data[i];
      data[i] = saved + eps;
      const double up = f().item();
      data[i] = saved - eps;
      const double down = f().item();
      data[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k][i];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
      ++report.checked;
    }
    const double rel = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), floor});
    if (rel > report.worst || report.worst_name.empty()) {
      if (rel >= report.worst) {
        report.worst = rel;
        report.worst_name = k < names.size() ? names[k] : "input " + std::to_string(k);
      }
    }
  }
  return report;
}

// sum(y * weights) with fixed random weights, so every output entry matters.
inline Tensor weighted_sum(const Tensor& y, std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  const Tensor w = random_tensor(y.shape(), rng);
  return nn::ops::sum(nn::ops::mul(y, w));
}

// Moves zero-initialised biases off zero so no ReLU input sits exactly on its kink.
inline void jitter_biases(const std::vector<Tensor>& params, std::uint64_t seed = 13, double scale = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto t : params)
    if (t.rank() == 1)
      for (auto& v : t.data()) v += u(rng);
}

}  // namespace jamloc::testing
