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

#include <cstddef>
#include <span>
#include <vector>

#include "jamloc/nn/tensor.hpp"

// Differentiable primitives. Every op records a graph node when grad mode is
// on and at least one input requires grad, and rejects non-finite results.
namespace jamloc::nn::ops {

// y = x·Wᵀ + b with x [B,in], W [out,in], b [out] (b may be undefined).
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

struct Conv2dGeometry {
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t dilation_h = 1, dilation_w = 1;
  std::size_t pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;
  std::size_t groups = 1;
};

// x [B,C,H,W], weight [O,C/groups,KH,KW], bias [O] or undefined.
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, const Conv2dGeometry& geo);

struct Conv1dGeometry {
  std::size_t stride = 1;
  std::size_t dilation = 1;
  std::size_t pad_left = 0, pad_right = 0;
  std::size_t groups = 1;
};

// x [B,C,L], weight [O,C/groups,K], bias [O] or undefined.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, const Conv1dGeometry& geo);

Tensor relu(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Inverted dropout: Train zeroes with probability p and scales survivors by
// 1/(1-p); Eval (or p == 0) returns `x` unchanged without touching `rng`.
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng);

// Mean over every axis after the second: [B,C,...] -> [B,C].
Tensor global_avg_pool(const Tensor& x);
// Non-overlapping mean over the last axis: [B,C,L] -> [B,C,L/k].
Tensor avg_pool1d(const Tensor& x, std::size_t k);

Tensor reshape(const Tensor& x, Shape shape);
// [B,...] -> [B, prod(rest)]
Tensor flatten(const Tensor& x);
// [B,A,C] -> [B,C,A]
Tensor transpose_last2(const Tensor& x);
// Concatenation along axis 1; trailing axes must agree.
Tensor concat(std::span<const Tensor> parts);
// [B,K] -> [B,1] holding column j.
Tensor column(const Tensor& x, std::size_t j);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
// x [B,C,...] multiplied by gate [B,C] broadcast over trailing axes.
Tensor channel_scale(const Tensor& x, const Tensor& gate);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Mean over all elements of (pred - target)^2; target carries no gradient.
Tensor mse_loss(const Tensor& pred, const Tensor& target);
// Mean over all elements of |pred - target|.
Tensor l1_loss(const Tensor& pred, const Tensor& target);
// Mean negative log-likelihood of `labels` under softmax(logits), logits [B,n].
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

// Row-wise softmax of a [B,n] tensor's values (no graph).
std::vector<double> softmax_rows(const Tensor& logits);

}  // namespace jamloc::nn::ops
