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
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace jamloc::nn {

using Shape = std::vector<std::size_t>;
using Rng = std::mt19937_64;

enum class Mode { Train, Eval };

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

class Tensor;

// One recorded operation. `backward` reads the gradient of the produced
// tensor and accumulates into the gradients of `inputs`.
struct Node {
  std::string op;
  std::vector<Tensor> inputs;
  std::function<void(std::span<const double> grad_out)> backward;
};

namespace detail {
struct Storage {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty when absent
  bool requires_grad = false;
  bool consumed = false;
  std::shared_ptr<Node> node;
};
}  // namespace detail

// Dense row-major array of doubles with optional gradient tracking.
// Copies share storage; use clone() for a deep copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(s_); }
  const Shape& shape() const;
  std::size_t dim(std::size_t axis) const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const { return data().size(); }

  std::span<double> data();
  std::span<const double> data() const;
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool has_grad() const;
  std::span<double> grad();
  std::span<const double> grad() const;
  // Allocates a zero gradient buffer if absent and returns it.
  std::span<double> ensure_grad();
  void clear_grad();

  // Reverse-mode pass from a scalar produced by recorded operations.
  // Gradients accumulate into every reachable tensor that requires grad.
  void backward();

  Tensor clone() const;
  // Same data, no graph history.
  Tensor detach() const;

  // Identity of the underlying storage (shared-parameter checks).
  const void* id() const noexcept { return s_.get(); }

  // Op plumbing: attaches `node` as this tensor's producer.
  void set_node(std::shared_ptr<Node> node);
  const std::shared_ptr<Node>& node() const;

 private:
  explicit Tensor(std::shared_ptr<detail::Storage> s) : s_(std::move(s)) {}
  detail::Storage& storage() const;

  std::shared_ptr<detail::Storage> s_;
};

// While alive on a thread, ops on that thread record no graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace jamloc::nn
