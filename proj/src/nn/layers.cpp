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

#include "jamloc/nn/layers.hpp"

#include <cmath>

#include "jamloc/error.hpp"

namespace jamloc::nn {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "Dense";
    case LayerKind::Conv1D: return "Conv1D";
    case LayerKind::Conv2D: return "Conv2D";
    case LayerKind::GroupedConv2D: return "GroupedConv2D";
    case LayerKind::ReLU: return "ReLU";
    case LayerKind::Tanh: return "Tanh";
    case LayerKind::Sigmoid: return "Sigmoid";
    case LayerKind::Dropout: return "Dropout";
    case LayerKind::GlobalAvgPool: return "GlobalAvgPool";
    case LayerKind::Flatten: return "Flatten";
    case LayerKind::BatchConcat: return "BatchConcat";
  }
  return "?";
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.in = in;
  s.out = out;
  return s;
}

LayerSpec LayerSpec::conv2d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::Conv2D;
  s.in = in;
  s.out = out;
  s.kernel_h = s.kernel_w = k;
  s.stride_h = s.stride_w = stride;
  s.pad_top = s.pad_bottom = s.pad_left = s.pad_right = k / 2;
  return s;
}

LayerSpec LayerSpec::grouped_conv2d(std::size_t in, std::size_t out, std::size_t k, std::size_t groups) {
  LayerSpec s = conv2d(in, out, k, 1);
  s.kind = LayerKind::GroupedConv2D;
  s.groups = groups;
  return s;
}

LayerSpec LayerSpec::causal_conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t dilation) {
  LayerSpec s;
  s.kind = LayerKind::Conv1D;
  s.in = in;
  s.out = out;
  s.kernel_w = k;
  s.dilation_w = dilation;
  s.pad_left = dilation * (k - 1);
  return s;
}

LayerSpec LayerSpec::conv1d(std::size_t in, std::size_t out, std::size_t k, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::Conv1D;
  s.in = in;
  s.out = out;
  s.kernel_w = k;
  s.stride_w = stride;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::simple(LayerKind kind) {
  LayerSpec s;
  s.kind = kind;
  return s;
}

namespace {

Tensor glorot(Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> uni(-limit, limit);
  std::vector<double> values(numel(shape));
  for (auto& v : values) v = uni(rng);
  return Tensor::from(std::move(shape), std::move(values), true);
}

}  // namespace

Layer::Layer(const LayerSpec& spec, Rng& init_rng, std::string name) : spec_(spec), name_(std::move(name)) {
  if (name_.empty()) name_ = to_string(spec.kind);
  switch (spec.kind) {
    case LayerKind::Dense:
      if (spec.in == 0 || spec.out == 0) throw ShapeError(name_ + ": Dense sizes must be positive");
      weight_ = glorot({spec.out, spec.in}, spec.in, spec.out, init_rng);
      if (spec.bias) bias_ = Tensor::zeros({spec.out}, true);
      break;
    case LayerKind::Conv1D:
    case LayerKind::Conv2D:
    case LayerKind::GroupedConv2D: {
      if (spec.in == 0 || spec.out == 0) throw ShapeError(name_ + ": channel counts must be positive");
      if (spec.groups == 0 || spec.in % spec.groups || spec.out % spec.groups) {
        throw ShapeError(name_ + ": groups " + std::to_string(spec.groups) +
                         " must divide in-channels and out-channels");
      }
      if (spec.kind == LayerKind::Conv1D && spec.kernel_h != 1) {
        throw ShapeError(name_ + ": Conv1D kernel_h must be 1");
      }
      const std::size_t taps = spec.kernel_h * spec.kernel_w;
      const std::size_t fan_in = spec.in / spec.groups * taps;
      const std::size_t fan_out = spec.out / spec.groups * taps;
      Shape shape = spec.kind == LayerKind::Conv1D
                        ? Shape{spec.out, spec.in / spec.groups, spec.kernel_w}
                        : Shape{spec.out, spec.in / spec.groups, spec.kernel_h, spec.kernel_w};
      weight_ = glorot(std::move(shape), fan_in, fan_out, init_rng);
      if (spec.bias) bias_ = Tensor::zeros({spec.out}, true);
      break;
    }
    case LayerKind::Dropout:
      if (spec.rate < 0.0 || spec.rate >= 1.0) {
        throw DomainError(name_ + ": dropout rate must lie in [0,1)");
      }
      break;
    default:
      break;
  }
}

Tensor Layer::forward(const Tensor& input, Mode mode, Rng& rng) const {
  try {
    switch (spec_.kind) {
      case LayerKind::Dense:
        return ops::linear(input, weight_, bias_);
      case LayerKind::Conv1D: {
        ops::Conv1dGeometry g;
        g.stride = spec_.stride_w;
        g.dilation = spec_.dilation_w;
        g.pad_left = spec_.pad_left;
        g.pad_right = spec_.pad_right;
        g.groups = spec_.groups;
        return ops::conv1d(input, weight_, bias_, g);
      }
      case LayerKind::Conv2D:
      case LayerKind::GroupedConv2D: {
        ops::Conv2dGeometry g;
        g.stride_h = spec_.stride_h;
        g.stride_w = spec_.stride_w;
        g.dilation_h = spec_.dilation_h;
        g.dilation_w = spec_.dilation_w;
        g.pad_top = spec_.pad_top;
        g.pad_bottom = spec_.pad_bottom;
        g.pad_left = spec_.pad_left;
        g.pad_right = spec_.pad_right;
        g.groups = spec_.groups;
        return ops::conv2d(input, weight_, bias_, g);
      }
      case LayerKind::ReLU: return ops::relu(input);
      case LayerKind::Tanh: return ops::tanh(input);
      case LayerKind::Sigmoid: return ops::sigmoid(input);
      case LayerKind::Dropout: return ops::dropout(input, spec_.rate, mode, rng);
      case LayerKind::GlobalAvgPool: return ops::global_avg_pool(input);
      case LayerKind::Flatten: return ops::flatten(input);
      case LayerKind::BatchConcat: return ops::concat(std::span<const Tensor>(&input, 1));
    }
  } catch (const ShapeError& e) {
    throw ShapeError(name_ + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(name_ + ": " + e.what());
  }
  throw ShapeError(name_ + ": unknown layer kind");
}

Tensor Layer::forward_many(std::span<const Tensor> inputs) const {
  if (spec_.kind != LayerKind::BatchConcat) throw ShapeError(name_ + ": forward_many needs BatchConcat");
  try {
    return ops::concat(inputs);
  } catch (const ShapeError& e) {
    throw ShapeError(name_ + ": " + e.what());
  }
}

std::vector<Tensor> Layer::parameters() const {
  std::vector<Tensor> out;
  if (weight_.defined()) out.push_back(weight_);
  if (bias_.defined()) out.push_back(bias_);
  return out;
}

std::size_t Layer::parameter_count() const {
  auto p = parameters();
  return nn::parameter_count(p);
}

std::size_t parameter_count(std::span<const Tensor> params) {
  std::size_t n = 0;
  for (const auto& t : params) n += t.numel();
  return n;
}

}  // namespace jamloc::nn
