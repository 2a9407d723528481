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

#include "jamloc/nn/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "jamloc/error.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace jamloc::nn {

namespace {

#if defined(__GLIBC__)
// Activation and im2col buffers are large and short-lived. Keeping them on
// the heap instead of fresh mmap regions avoids a page fault per 4 KiB on
// every training step.
const bool kHeapTuned = [] {
  mallopt(M_MMAP_THRESHOLD, 512 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return true;
}();
#endif
thread_local bool g_grad_enabled = true;
}

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + to_string(shape));
  }
  auto s = std::make_shared<detail::Storage>();
  s->data.assign(nn::numel(shape), value);
  s->shape = std::move(shape);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + to_string(shape));
  }
  if (nn::numel(shape) != values.size()) {
    throw ShapeError("shape " + to_string(shape) + " holds " + std::to_string(nn::numel(shape)) +
                     " values, got " + std::to_string(values.size()));
  }
  auto s = std::make_shared<detail::Storage>();
  s->shape = std::move(shape);
  s->data = std::move(values);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({1}, {value}, requires_grad); }

detail::Storage& Tensor::storage() const {
  if (!s_) throw GraphError("use of undefined tensor");
  return *s_;
}

const Shape& Tensor::shape() const { return storage().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& sh = shape();
  if (axis >= sh.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + to_string(sh));
  }
  return sh[axis];
}

std::span<double> Tensor::data() { return storage().data; }
std::span<const double> Tensor::data() const { return storage().data; }

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return storage().data[0];
}

bool Tensor::requires_grad() const { return storage().requires_grad; }
void Tensor::set_requires_grad(bool on) { storage().requires_grad = on; }
bool Tensor::has_grad() const { return !storage().grad.empty(); }
std::span<double> Tensor::grad() { return storage().grad; }
std::span<const double> Tensor::grad() const { return storage().grad; }

std::span<double> Tensor::ensure_grad() {
  auto& s = storage();
  if (s.grad.empty()) s.grad.assign(s.data.size(), 0.0);
  return s.grad;
}

void Tensor::clear_grad() {
  auto& s = storage();
  s.grad.clear();
  s.grad.shrink_to_fit();
}

void Tensor::set_node(std::shared_ptr<Node> node) { storage().node = std::move(node); }
const std::shared_ptr<Node>& Tensor::node() const { return storage().node; }

Tensor Tensor::clone() const {
  auto s = std::make_shared<detail::Storage>();
  s->shape = shape();
  s->data.assign(data().begin(), data().end());
  s->requires_grad = requires_grad();
  return Tensor(std::move(s));
}

Tensor Tensor::detach() const {
  auto t = clone();
  t.set_requires_grad(false);
  return t;
}

void Tensor::backward() {
  auto& root = storage();
  if (root.consumed) throw GraphError("backward: graph already consumed");
  if (root.data.size() != 1) {
    throw GraphError("backward: loss must be a scalar, got shape " + to_string(root.shape));
  }
  if (!root.requires_grad) throw GraphError("backward: loss does not require grad");

  // Iterative post-order over producing nodes.
  std::vector<Tensor> order;
  std::unordered_set<const detail::Storage*> visited;
  std::vector<std::pair<Tensor, std::size_t>> stack;
  stack.emplace_back(*this, 0);
  visited.insert(s_.get());
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    const auto& node = t.s_->node;
    if (node && next < node->inputs.size()) {
      Tensor child = node->inputs[next++];
      if (child.s_->requires_grad && child.s_->node && !visited.count(child.s_.get())) {
        visited.insert(child.s_.get());
        stack.emplace_back(child, 0);
      }
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& s = *it->s_;
    if (!s.node) continue;
    if (s.grad.empty()) s.grad.assign(s.data.size(), 0.0);
    s.node->backward(s.grad);
  }
  // Intermediate results give up their graph and gradient buffers.
  for (auto& t : order) {
    auto& s = *t.s_;
    if (!s.node) continue;
    s.node.reset();
    s.grad.clear();
    s.grad.shrink_to_fit();
    s.consumed = true;
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

}  // namespace jamloc::nn
