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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "jamloc/error.hpp"
#include "jamloc/nn/checkpoint.hpp"
#include "jamloc/nn/layers.hpp"
#include "jamloc/nn/optim.hpp"

using namespace jamloc;
using namespace jamloc::nn;
using jamloc::testing::gradcheck;
using jamloc::testing::random_tensor;
using jamloc::testing::weighted_sum;

namespace {

constexpr double kLayerTol = 1e-4;

// Checks a layer's gradient with respect to its input and parameters.
void check_layer(const LayerSpec& spec, Shape in_shape, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  Rng init(seed + 100);
  Layer layer(spec, init, "layer");
  Tensor x = random_tensor(in_shape, rng, true);
  std::vector<Tensor> wrt{x};
  std::vector<std::string> names{"input"};
  for (auto& p : layer.parameters()) {
    wrt.push_back(p);
    names.push_back(p.numel() == spec.out ? "bias" : "weight");
  }
  const Rng fixed(seed + 200);
  auto f = [&] {
    Rng r = fixed;
    return weighted_sum(layer.forward(x, Mode::Train, r));
  };
  const auto rep = gradcheck(f, wrt, names);
  INFO(to_string(spec.kind), " worst ", rep.worst_name, " rel ", rep.worst);
  CHECK(rep.worst < kLayerTol);
}

// Reference convolution written directly from the definition.
std::vector<double> naive_conv2d(const Tensor& x, const Tensor& w, const Tensor& b, const ops::Conv2dGeometry& g) {
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const auto O = w.dim(0), Cg = w.dim(1), KH = w.dim(2), KW = w.dim(3);
  const auto OH = (H + g.pad_top + g.pad_bottom - g.dilation_h * (KH - 1) - 1) / g.stride_h + 1;
  const auto OW = (W + g.pad_left + g.pad_right - g.dilation_w * (KW - 1) - 1) / g.stride_w + 1;
  const auto Og = O / g.groups;
  std::vector<double> y(B * O * OH * OW, 0.0);
  for (std::size_t n = 0; n < B; ++n)
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t i = 0; i < OH; ++i)
        for (std::size_t j = 0; j < OW; ++j) {
          double acc = b.defined() ? b.data()[o] : 0.0;
          const auto grp = o / Og;
          for (std::size_t c = 0; c < Cg; ++c)
            for (std::size_t p = 0; p < KH; ++p)
              for (std::size_t q = 0; q < KW; ++q) {
                const long r = static_cast<long>(i * g.stride_h + p * g.dilation_h) - static_cast<long>(g.pad_top);
                const long s = static_cast<long>(j * g.stride_w + q * g.dilation_w) - static_cast<long>(g.pad_left);
                if (r < 0 || s < 0 || r >= static_cast<long>(H) || s >= static_cast<long>(W)) continue;
                acc += w.data()[((o * Cg + c) * KH + p) * KW + q] *
                       x.data()[((n * C + grp * Cg + c) * H + r) * W + s];
              }
          y[((n * O + o) * OH + i) * OW + j] = acc;
        }
  return y;
}

}  // namespace

TEST_CASE("tensor construction validates shapes") {
  CHECK_THROWS_AS(Tensor::from({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Tensor::zeros({0, 3}), ShapeError);
  auto t = Tensor::full({2, 3}, 1.5);
  CHECK(t.numel() == 6);
  CHECK(t.data()[5] == 1.5);
  CHECK_THROWS_AS(t.item(), ShapeError);
}

TEST_CASE("copies share storage, clone does not") {
  auto a = Tensor::zeros({3});
  auto b = a;
  auto c = a.clone();
  b.data()[0] = 4.0;
  CHECK(a.data()[0] == 4.0);
  CHECK(c.data()[0] == 0.0);
  CHECK(a.id() == b.id());
  CHECK(a.id() != c.id());
}

TEST_CASE("backward on a simple expression matches hand derivatives") {
  auto x = Tensor::from({3}, {1.0, -2.0, 0.5}, true);
  auto w = Tensor::from({3}, {0.3, 0.7, -1.1}, true);
  // L = sum(tanh(x*w)) ; dL/dx = w (1 - tanh^2), dL/dw = x (1 - tanh^2)
  auto loss = ops::sum(ops::tanh(ops::mul(x, w)));
  loss.backward();
  for (int i = 0; i < 3; ++i) {
    const double t = std::tanh(x.data()[i] * w.data()[i]);
    CHECK(x.grad()[i] == doctest::Approx(w.data()[i] * (1 - t * t)).epsilon(1e-12));
    CHECK(w.grad()[i] == doctest::Approx(x.data()[i] * (1 - t * t)).epsilon(1e-12));
  }
}

TEST_CASE("graph misuse raises GraphError") {
  auto x = Tensor::from({2}, {1.0, 2.0}, true);
  auto y = ops::scale(x, 2.0);
  CHECK_THROWS_AS(y.backward(), GraphError);  // not a scalar
  auto loss = ops::sum(y);
  loss.backward();
  CHECK_THROWS_AS(loss.backward(), GraphError);  // consumed
  auto c = Tensor::scalar(1.0);
  CHECK_THROWS_AS(c.backward(), GraphError);  // no grad
  Tensor undefined;
  CHECK_THROWS_AS(undefined.shape(), GraphError);
}

TEST_CASE("NoGradGuard suppresses graph recording") {
  auto x = Tensor::from({2}, {1.0, 2.0}, true);
  {
    NoGradGuard g;
    CHECK_FALSE(grad_enabled());
    auto y = ops::relu(x);
    CHECK_FALSE(y.node());
  }
  CHECK(grad_enabled());
  CHECK(ops::relu(x).node());
}

TEST_CASE("non-finite results raise NumericError") {
  auto x = Tensor::from({1, 1}, {1e200}, true);
  auto w = Tensor::from({1, 1}, {1e200}, true);
  CHECK_THROWS_AS(ops::linear(x, w, Tensor()), NumericError);
}

TEST_CASE("shape mismatches raise ShapeError") {
  std::mt19937_64 rng(3);
  auto x = random_tensor({2, 3}, rng);
  auto w = random_tensor({4, 5}, rng);
  CHECK_THROWS_AS(ops::linear(x, w, Tensor()), ShapeError);
  CHECK_THROWS_AS(ops::add(x, random_tensor({3, 2}, rng)), ShapeError);
  auto img = random_tensor({1, 3, 8, 8}, rng);
  ops::Conv2dGeometry g;
  g.groups = 2;
  CHECK_THROWS_AS(ops::conv2d(img, random_tensor({4, 1, 3, 3}, rng), Tensor(), g), ShapeError);
}

TEST_CASE("layer gradients match finite differences") {
  SUBCASE("dense") { check_layer(LayerSpec::dense(7, 5), {3, 7}); }
  SUBCASE("conv2d strided rectangular") {
    auto s = LayerSpec::conv2d(3, 4, 3, 2);
    s.kernel_h = 4;
    s.kernel_w = 3;
    s.stride_h = 4;
    s.stride_w = 2;
    s.pad_top = s.pad_bottom = 0;
    s.pad_left = s.pad_right = 1;
    check_layer(s, {2, 3, 12, 9});
  }
  SUBCASE("conv2d dilated") {
    auto s = LayerSpec::conv2d(2, 3, 3);
    s.dilation_h = s.dilation_w = 2;
    s.pad_top = s.pad_bottom = s.pad_left = s.pad_right = 2;
    check_layer(s, {2, 2, 7, 6});
  }
  SUBCASE("grouped conv2d") { check_layer(LayerSpec::grouped_conv2d(8, 8, 3, 4), {2, 8, 6, 6}); }
  SUBCASE("causal dilated conv1d") { check_layer(LayerSpec::causal_conv1d(3, 4, 3, 4), {2, 3, 20}); }
  SUBCASE("strided conv1d") { check_layer(LayerSpec::conv1d(4, 3, 8, 8), {2, 4, 32}); }
  SUBCASE("relu") { check_layer(LayerSpec::simple(LayerKind::ReLU), {3, 11}); }
  SUBCASE("tanh") { check_layer(LayerSpec::simple(LayerKind::Tanh), {3, 11}); }
  SUBCASE("sigmoid") { check_layer(LayerSpec::simple(LayerKind::Sigmoid), {3, 11}); }
  SUBCASE("dropout") { check_layer(LayerSpec::dropout(0.4), {4, 9}); }
  SUBCASE("global average pool") { check_layer(LayerSpec::simple(LayerKind::GlobalAvgPool), {2, 3, 4, 5}); }
  SUBCASE("flatten") { check_layer(LayerSpec::simple(LayerKind::Flatten), {2, 3, 4}); }
}

TEST_CASE("batch concat gradient reaches every part") {
  std::mt19937_64 rng(5);
  Rng init(1);
  Layer cat(LayerSpec::simple(LayerKind::BatchConcat), init);
  auto a = random_tensor({2, 3}, rng, true);
  auto b = random_tensor({2, 5}, rng, true);
  auto f = [&] {
    std::vector<Tensor> parts{a, b};
    return weighted_sum(cat.forward_many(parts));
  };
  CHECK(gradcheck(f, {a, b}).worst < kLayerTol);
}

TEST_CASE("remaining op gradients match finite differences") {
  std::mt19937_64 rng(11);
  SUBCASE("avg_pool1d and transpose") {
    auto x = random_tensor({2, 3, 8}, rng, true);
    auto f = [&] { return weighted_sum(ops::transpose_last2(ops::avg_pool1d(x, 2))); };
    CHECK(gradcheck(f, {x}).worst < kLayerTol);
  }
  SUBCASE("channel_scale") {
    auto x = random_tensor({2, 3, 4, 4}, rng, true);
    auto g = random_tensor({2, 3}, rng, true);
    auto f = [&] { return weighted_sum(ops::channel_scale(x, g)); };
    CHECK(gradcheck(f, {x, g}).worst < kLayerTol);
  }
  SUBCASE("reshape, column, add, scale, mean") {
    auto x = random_tensor({2, 6}, rng, true);
    auto y = random_tensor({2, 1}, rng, true);
    auto f = [&] {
      auto r = ops::reshape(x, {2, 3, 2});
      auto c = ops::column(ops::flatten(r), 4);
      return ops::mean(ops::scale(ops::add(c, y), 1.7));
    };
    CHECK(gradcheck(f, {x, y}).worst < kLayerTol);
  }
  SUBCASE("losses") {
    auto p = random_tensor({4, 3}, rng, true);
    auto t = random_tensor({4, 3}, rng);
    std::vector<int> labels{0, 2, 1, 2};
    auto f = [&] { return ops::add(ops::add(ops::mse_loss(p, t), ops::l1_loss(p, t)), ops::cross_entropy(p, labels)); };
    CHECK(gradcheck(f, {p}).worst < kLayerTol);
  }
}

TEST_CASE("conv2d matches the definition") {
  std::mt19937_64 rng(21);
  ops::Conv2dGeometry g;
  g.stride_h = 2;
  g.stride_w = 1;
  g.pad_top = 1;
  g.pad_bottom = 2;
  g.pad_left = 0;
  g.pad_right = 1;
  g.dilation_w = 2;
  g.groups = 2;
  auto x = random_tensor({2, 4, 7, 9}, rng);
  auto w = random_tensor({6, 2, 3, 2}, rng);
  auto b = random_tensor({6}, rng);
  const auto y = ops::conv2d(x, w, b, g);
  const auto ref = naive_conv2d(x, w, b, g);
  REQUIRE(y.numel() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(y.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("grouped conv with one group equals plain conv") {
  std::mt19937_64 rng(4);
  auto x = random_tensor({2, 4, 6, 6}, rng);
  auto w = random_tensor({5, 4, 3, 3}, rng);
  Tensor none;
  ops::Conv2dGeometry plain;
  plain.pad_top = plain.pad_bottom = plain.pad_left = plain.pad_right = 1;
  auto grouped = plain;
  grouped.groups = 1;
  const auto a = ops::conv2d(x, w, none, plain);
  const auto b = ops::conv2d(x, w, none, grouped);
  const auto ref = naive_conv2d(x, w, none, plain);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(a.data()[i] == b.data()[i]);
    CHECK(a.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("grouped conv keeps groups independent") {
  // With block-diagonal weights, groups=2 equals two separate convolutions.
  std::mt19937_64 rng(8);
  auto x = random_tensor({1, 4, 5, 5}, rng);
  auto w = random_tensor({4, 2, 3, 3}, rng);
  Tensor none;
  ops::Conv2dGeometry g;
  g.groups = 2;
  const auto y = ops::conv2d(x, w, none, g);
  for (std::size_t grp = 0; grp < 2; ++grp) {
    std::vector<double> xs(x.data().begin() + grp * 50, x.data().begin() + (grp + 1) * 50);
    std::vector<double> ws(w.data().begin() + grp * 36, w.data().begin() + (grp + 1) * 36);
    const auto part = ops::conv2d(Tensor::from({1, 2, 5, 5}, xs), Tensor::from({2, 2, 3, 3}, ws), none, {});
    for (std::size_t i = 0; i < part.numel(); ++i) CHECK(y.data()[grp * part.numel() + i] == doctest::Approx(part.data()[i]));
  }
}

TEST_CASE("causal conv1d output depends only on the past") {
  std::mt19937_64 rng(2);
  Rng init(3);
  Layer conv(LayerSpec::causal_conv1d(1, 1, 3, 2), init);
  auto x = random_tensor({1, 1, 16}, rng);
  Rng r(0);
  const auto y0 = conv.forward(x, Mode::Eval, r);
  CHECK(y0.dim(2) == 16);
  auto x2 = x.clone();
  x2.data()[10] += 5.0;
  const auto y1 = conv.forward(x2, Mode::Eval, r);
  for (std::size_t t = 0; t < 10; ++t) CHECK(y0.data()[t] == y1.data()[t]);
  CHECK(y0.data()[10] != y1.data()[10]);
}

TEST_CASE("dropout preserves the expectation and is identity in eval") {
  const double p = 0.3;
  auto x = Tensor::full({1, 200000}, 2.0);
  Rng rng(17);
  const auto y = ops::dropout(x, p, Mode::Train, rng);
  double mean = 0.0;
  std::size_t zeros = 0, bad = 0;
  for (double v : y.data()) {
    mean += v;
    if (v == 0.0) ++zeros;
    else if (std::abs(v - 2.0 / (1.0 - p)) > 1e-12) ++bad;
  }
  CHECK(bad == 0);
  mean /= static_cast<double>(y.numel());
  // Binomial standard error of the mean is about 0.0043 here.
  CHECK(mean == doctest::Approx(2.0).epsilon(0.015));
  CHECK(static_cast<double>(zeros) / y.numel() == doctest::Approx(p).epsilon(0.02));
  Rng untouched(17);
  const auto e = ops::dropout(x, p, Mode::Eval, untouched);
  CHECK(e.data()[0] == 2.0);
  CHECK(untouched() == Rng(17)());
  CHECK_THROWS_AS(ops::dropout(x, 1.0, Mode::Train, rng), DomainError);
}

TEST_CASE("cross entropy of uniform logits is log n") {
  auto logits = Tensor::zeros({3, 5}, true);
  std::vector<int> labels{0, 4, 2};
  CHECK(ops::cross_entropy(logits, labels).item() == doctest::Approx(std::log(5.0)));
  CHECK_THROWS(ops::cross_entropy(logits, std::vector<int>{0, 5, 1}));
}

TEST_CASE("layer initialization is Glorot uniform with zero bias") {
  Rng init(9);
  Layer d(LayerSpec::dense(30, 20), init);
  const double bound = std::sqrt(6.0 / 50.0);
  double lo = 1.0, hi = -1.0;
  for (double v : d.weight().data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= -bound);
  CHECK(hi <= bound);
  CHECK(hi - lo > bound);
  for (double v : d.bias().data()) CHECK(v == 0.0);
  CHECK(d.parameter_count() == 30 * 20 + 20);
}

TEST_CASE("SGD follows the hand-written momentum recurrence") {
  SgdOptions o;
  o.learning_rate = 0.1;
  o.momentum = 0.9;
  o.weight_decay = 0.01;
  o.milestones = {2};
  o.lr_decay_factor = 0.5;
  auto w = Tensor::from({2}, {1.0, -2.0}, true);
  Sgd sgd({w}, o);
  // L = 0.5 * sum(w^2) * k with k = 3  =>  grad = 3 w
  double v[2] = {0.0, 0.0}, ref[2] = {1.0, -2.0};
  for (int epoch = 0; epoch < 4; ++epoch) {
    auto loss = ops::scale(ops::sum(ops::mul(w, w)), 1.5);
    loss.backward();
    sgd.step(epoch);
    const double lr = epoch >= 2 ? 0.05 : 0.1;
    CHECK(sgd.learning_rate(epoch) == doctest::Approx(lr));
    for (int i = 0; i < 2; ++i) {
      v[i] = 0.9 * v[i] + 3.0 * ref[i] + 0.01 * ref[i];
      ref[i] -= lr * v[i];
      CHECK(w.data()[i] == doctest::Approx(ref[i]).epsilon(1e-14));
    }
    CHECK_FALSE(w.has_grad());
  }
}

TEST_CASE("SGD step without gradients throws") {
  auto w = Tensor::from({1}, {1.0}, true);
  Sgd sgd({w}, {});
  CHECK_THROWS_AS(sgd.step(0), GraphError);
}

TEST_CASE("gradient clipping rescales the joint norm") {
  auto a = Tensor::from({2}, {0.0, 0.0}, true);
  auto b = Tensor::from({1}, {0.0}, true);
  a.ensure_grad()[0] = 3.0;
  a.grad()[1] = 0.0;
  b.ensure_grad()[0] = 4.0;
  std::vector<Tensor> ps{a, b};
  CHECK(clip_grad_norm(ps, 1.0) == doctest::Approx(5.0));
  CHECK(a.grad()[0] == doctest::Approx(0.6));
  CHECK(b.grad()[0] == doctest::Approx(0.8));
  CHECK(clip_grad_norm(ps, 10.0) == doctest::Approx(1.0));
  CHECK(b.grad()[0] == doctest::Approx(0.8));
}

TEST_CASE("weights round-trip through the GJW1 format") {
  std::mt19937_64 rng(1);
  std::vector<Tensor> ts{random_tensor({3, 4}, rng), random_tensor({5}, rng)};
  std::stringstream ss;
  write_weights(ss, ts);
  const auto back = read_weights(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].shape() == Shape{3, 4});
  for (std::size_t i = 0; i < 12; ++i) CHECK(back[0].data()[i] == static_cast<double>(static_cast<float>(ts[0].data()[i])));
  std::vector<Tensor> target{Tensor::zeros({3, 4}), Tensor::zeros({4})};
  CHECK_THROWS_AS(assign_weights(target, back), ShapeError);
  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_weights(bad), FormatError);
}
