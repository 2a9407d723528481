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
#include <string>
#include <vector>

#include "jamloc/nn/ops.hpp"
#include "jamloc/nn/tensor.hpp"

namespace jamloc::nn {

enum class LayerKind {
  Dense,
  Conv1D,
  Conv2D,
  GroupedConv2D,
  ReLU,
  Tanh,
  Sigmoid,
  Dropout,
  GlobalAvgPool,
  Flatten,
  BatchConcat,
};

const char* to_string(LayerKind kind);

// Declarative description of one layer. Only the fields relevant to `kind`
// are read; convolution kernels may be rectangular (kernel_h x kernel_w).
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  std::size_t in = 0;   // Dense in-features / conv in-channels
  std::size_t out = 0;  // Dense out-features / conv out-channels
  std::size_t kernel_h = 1, kernel_w = 1;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t dilation_h = 1, dilation_w = 1;
  std::size_t pad_top = 0, pad_bottom = 0, pad_left = 0, pad_right = 0;
  std::size_t groups = 1;
  bool bias = true;
  double rate = 0.0;  // Dropout

  static LayerSpec dense(std::size_t in, std::size_t out);
  // Symmetric "same"-style padding of k/2 unless overridden afterwards.
  static LayerSpec conv2d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride = 1);
  static LayerSpec grouped_conv2d(std::size_t in, std::size_t out, std::size_t k, std::size_t groups);
  // Causal 1-D convolution: all padding on the left.
  static LayerSpec causal_conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t dilation);
  static LayerSpec conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride = 1);
  static LayerSpec dropout(double rate);
  static LayerSpec simple(LayerKind kind);
};

// A layer instantiated from a LayerSpec. Parameterized kinds own their
// weights; BatchConcat is applied through forward_many().
class Layer {
 public:
  Layer() = default;
  // Weights uniform in ±sqrt(6/(fan_in+fan_out)), biases zero.
  Layer(const LayerSpec& spec, Rng& init_rng, std::string name = {});

  Tensor forward(const Tensor& input, Mode mode, Rng& rng) const;
  Tensor forward_many(std::span<const Tensor> inputs) const;

  const LayerSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;

 private:
  LayerSpec spec_;
  std::string name_;
  Tensor weight_;
  Tensor bias_;
};

std::size_t parameter_count(std::span<const Tensor> params);

}  // namespace jamloc::nn
