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

#include "jamloc/nn/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "jamloc/error.hpp"

namespace jamloc::nn::ops {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

void check_finite(std::span<const double> v, const char* op) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError(std::string("non-finite value produced by ") + op);
  }
}

bool any_requires_grad(std::initializer_list<const Tensor*> inputs) {
  if (!grad_enabled()) return false;
  for (const Tensor* t : inputs) {
    if (t->defined() && t->requires_grad()) return true;
  }
  return false;
}

// Wraps freshly computed values; attaches `backward` when tracking applies.
template <typename Backward>
Tensor finish(const char* op, Shape shape, std::vector<double> values,
              std::initializer_list<const Tensor*> inputs, Backward&& backward) {
  check_finite(values, op);
  Tensor out = Tensor::from(std::move(shape), std::move(values));
  if (any_requires_grad(inputs)) {
    out.set_requires_grad(true);
    auto node = std::make_shared<Node>();
    node->op = op;
    for (const Tensor* t : inputs) {
      if (t->defined()) node->inputs.push_back(*t);
    }
    node->backward = std::forward<Backward>(backward);
    out.set_node(std::move(node));
  }
  return out;
}

void require_rank(const Tensor& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + " input, got " +
                     to_string(x.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

struct ConvPlan {
  std::size_t batch, in_c, in_h, in_w;
  std::size_t out_c, k_h, k_w;
  std::size_t out_h, out_w;
  Conv2dGeometry geo;

  std::size_t group_in() const { return in_c / geo.groups; }
  std::size_t group_out() const { return out_c / geo.groups; }
  std::size_t patch() const { return group_in() * k_h * k_w; }
  std::size_t positions() const { return out_h * out_w; }
  std::size_t columns() const { return batch * positions(); }
};

ConvPlan make_plan(const Shape& x4, const Shape& w4, const Conv2dGeometry& geo) {
  ConvPlan p{};
  p.geo = geo;
  p.batch = x4[0];
  p.in_c = x4[1];
  p.in_h = x4[2];
  p.in_w = x4[3];
  p.out_c = w4[0];
  p.k_h = w4[2];
  p.k_w = w4[3];
  if (geo.groups == 0 || p.in_c % geo.groups || p.out_c % geo.groups) {
    throw ShapeError("conv2d: groups " + std::to_string(geo.groups) + " must divide in-channels " +
                     std::to_string(p.in_c) + " and out-channels " + std::to_string(p.out_c));
  }
  if (w4[1] != p.group_in()) {
    throw ShapeError("conv2d: weight " + to_string(w4) + " expects " + std::to_string(w4[1] * geo.groups) +
                     " input channels, got " + std::to_string(p.in_c));
  }
  if (geo.stride_h == 0 || geo.stride_w == 0 || geo.dilation_h == 0 || geo.dilation_w == 0) {
    throw ShapeError("conv2d: stride and dilation must be positive");
  }
  const std::size_t span_h = geo.dilation_h * (p.k_h - 1) + 1;
  const std::size_t span_w = geo.dilation_w * (p.k_w - 1) + 1;
  const std::size_t padded_h = p.in_h + geo.pad_top + geo.pad_bottom;
  const std::size_t padded_w = p.in_w + geo.pad_left + geo.pad_right;
  if (padded_h < span_h || padded_w < span_w) {
    throw ShapeError("conv2d: kernel " + std::to_string(p.k_h) + "x" + std::to_string(p.k_w) +
                     " larger than padded input " + to_string(x4));
  }
  p.out_h = (padded_h - span_h) / geo.stride_h + 1;
  p.out_w = (padded_w - span_w) / geo.stride_w + 1;
  return p;
}

// Output columns [lo, hi) whose input column ow*stride + offset lies inside [0, n).
std::pair<std::size_t, std::size_t> valid_range(long offset, std::size_t stride, std::size_t n, std::size_t out) {
  const long s = static_cast<long>(stride);
  long lo = offset >= 0 ? 0 : (-offset + s - 1) / s;
  long hi = static_cast<long>(n) - offset <= 0 ? 0 : (static_cast<long>(n) - offset + s - 1) / s;
  lo = std::min<long>(lo, static_cast<long>(out));
  hi = std::clamp<long>(hi, lo, static_cast<long>(out));
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// col[(c,kh,kw), (b,oh,ow)] for all input channels.
std::vector<double> im2col(const ConvPlan& p, std::span<const double> x) {
  const std::size_t rows = p.in_c * p.k_h * p.k_w;
  const std::size_t cols = p.columns();
  std::vector<double> col(rows * cols, 0.0);
  for (std::size_t c = 0; c < p.in_c; ++c) {
    for (std::size_t kh = 0; kh < p.k_h; ++kh) {
      for (std::size_t kw = 0; kw < p.k_w; ++kw) {
        double* dst = col.data() + ((c * p.k_h + kh) * p.k_w + kw) * cols;
        const long off_w = static_cast<long>(kw * p.geo.dilation_w) - static_cast<long>(p.geo.pad_left);
        const auto [lo, hi] = valid_range(off_w, p.geo.stride_w, p.in_w, p.out_w);
        const std::size_t sw = p.geo.stride_w;
        for (std::size_t b = 0; b < p.batch; ++b) {
          const double* src = x.data() + (b * p.in_c + c) * p.in_h * p.in_w;
          for (std::size_t oh = 0; oh < p.out_h; ++oh) {
            const long ih = static_cast<long>(oh * p.geo.stride_h + kh * p.geo.dilation_h) -
                            static_cast<long>(p.geo.pad_top);
            if (ih < 0 || ih >= static_cast<long>(p.in_h)) continue;
            double* row = dst + (b * p.out_h + oh) * p.out_w;
            const double* in_row = src + ih * static_cast<long>(p.in_w);
            if (sw == 1) {
              if (hi > lo) std::copy(in_row + (static_cast<long>(lo) + off_w), in_row + (static_cast<long>(hi) + off_w), row + lo);
            } else {
              for (std::size_t ow = lo; ow < hi; ++ow) row[ow] = in_row[static_cast<long>(ow * sw) + off_w];
            }
          }
        }
      }
    }
  }
  return col;
}

void col2im_add(const ConvPlan& p, std::span<const double> col, std::span<double> dx) {
  const std::size_t cols = p.columns();
  for (std::size_t c = 0; c < p.in_c; ++c) {
    for (std::size_t kh = 0; kh < p.k_h; ++kh) {
      for (std::size_t kw = 0; kw < p.k_w; ++kw) {
        const double* src = col.data() + ((c * p.k_h + kh) * p.k_w + kw) * cols;
        const long off_w = static_cast<long>(kw * p.geo.dilation_w) - static_cast<long>(p.geo.pad_left);
        const auto [lo, hi] = valid_range(off_w, p.geo.stride_w, p.in_w, p.out_w);
        const std::size_t sw = p.geo.stride_w;
        for (std::size_t b = 0; b < p.batch; ++b) {
          double* dst = dx.data() + (b * p.in_c + c) * p.in_h * p.in_w;
          for (std::size_t oh = 0; oh < p.out_h; ++oh) {
            const long ih = static_cast<long>(oh * p.geo.stride_h + kh * p.geo.dilation_h) -
                            static_cast<long>(p.geo.pad_top);
            if (ih < 0 || ih >= static_cast<long>(p.in_h)) continue;
            const double* row = src + (b * p.out_h + oh) * p.out_w;
            double* out_row = dst + ih * static_cast<long>(p.in_w);
            for (std::size_t ow = lo; ow < hi; ++ow) out_row[static_cast<long>(ow * sw) + off_w] += row[ow];
          }
        }
      }
    }
  }
}

template <typename F, typename D>
Tensor unary(const char* op, const Tensor& x, F f, D dfdx_from_out) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  auto saved = std::make_shared<std::vector<double>>(out);
  Tensor xin = x;
  return finish(op, x.shape(), std::move(out), {&x},
                [xin, saved, dfdx_from_out](std::span<const double> g) mutable {
                  if (!xin.requires_grad()) return;
                  auto gx = xin.ensure_grad();
                  auto xv = xin.data();
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    gx[i] += g[i] * dfdx_from_out(xv[i], (*saved)[i]);
                  }
                });
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(x, 2, "linear");
  require_rank(weight, 2, "linear weight");
  const std::size_t batch = x.dim(0), in = x.dim(1), out = weight.dim(0);
  if (weight.dim(1) != in) {
    throw ShapeError("linear: input " + to_string(x.shape()) + " incompatible with weight " +
                     to_string(weight.shape()));
  }
  if (bias.defined() && bias.numel() != out) {
    throw ShapeError("linear: bias " + to_string(bias.shape()) + " does not match " +
                     std::to_string(out) + " outputs");
  }
  std::vector<double> y(batch * out);
  {
    ConstMatMap X(x.data().data(), batch, in);
    ConstMatMap W(weight.data().data(), out, in);
    MatMap Y(y.data(), batch, out);
    Y.noalias() = X * W.transpose();
    if (bias.defined()) {
      Eigen::Map<const Eigen::RowVectorXd> bv(bias.data().data(), out);
      Y.rowwise() += bv;
    }
  }
  Tensor xs = x, ws = weight, bs = bias;
  return finish("linear", {batch, out}, std::move(y), {&x, &weight, &bias},
                [xs, ws, bs, batch, in, out](std::span<const double> g) mutable {
                  ConstMatMap G(g.data(), batch, out);
                  if (xs.requires_grad()) {
                    MatMap GX(xs.ensure_grad().data(), batch, in);
                    GX.noalias() += G * ConstMatMap(ws.data().data(), out, in);
                  }
                  if (ws.requires_grad()) {
                    MatMap GW(ws.ensure_grad().data(), out, in);
                    GW.noalias() += G.transpose() * ConstMatMap(xs.data().data(), batch, in);
                  }
                  if (bs.defined() && bs.requires_grad()) {
                    Eigen::Map<Eigen::RowVectorXd> gb(bs.ensure_grad().data(), out);
                    gb += G.colwise().sum();
                  }
                });
}

namespace {

// Shared by conv2d and conv1d; `p` describes the 4-D view of the operands.
Tensor conv_core(const char* op, const Tensor& x, const Tensor& weight, const Tensor& bias, const ConvPlan& p,
                 Shape out_shape) {
  if (bias.defined() && bias.numel() != p.out_c) {
    throw ShapeError(std::string(op) + ": bias " + to_string(bias.shape()) + " does not match " +
                     std::to_string(p.out_c) + " output channels");
  }
  const std::size_t cols = p.columns();
  const std::size_t hw = p.positions();
  std::vector<double> out(p.batch * p.out_c * hw);
  auto col = std::make_shared<std::vector<double>>(im2col(p, x.data()));
  {
    RowMat result(p.out_c, cols);
    for (std::size_t g = 0; g < p.geo.groups; ++g) {
      ConstMatMap Wg(weight.data().data() + g * p.group_out() * p.patch(), p.group_out(), p.patch());
      ConstMatMap Cg(col->data() + g * p.patch() * cols, p.patch(), cols);
      result.middleRows(g * p.group_out(), p.group_out()).noalias() = Wg * Cg;
    }
    for (std::size_t b = 0; b < p.batch; ++b) {
      for (std::size_t o = 0; o < p.out_c; ++o) {
        const double bo = bias.defined() ? bias.data()[o] : 0.0;
        const double* src = result.data() + o * cols + b * hw;
        double* dst = out.data() + (b * p.out_c + o) * hw;
        for (std::size_t i = 0; i < hw; ++i) dst[i] = src[i] + bo;
      }
    }
  }
  // Columns are only needed for the weight gradient.
  if (!weight.requires_grad() || !grad_enabled()) col.reset();
  Tensor xs = x, ws = weight, bs = bias;
  return finish(
      op, std::move(out_shape), std::move(out), {&x, &weight, &bias},
      [xs, ws, bs, p, col](std::span<const double> g) mutable {
        const std::size_t cols = p.columns();
        const std::size_t hw = p.positions();
        // Gradient rearranged to [O, (b,oh,ow)].
        RowMat G(p.out_c, cols);
        for (std::size_t b = 0; b < p.batch; ++b) {
          for (std::size_t o = 0; o < p.out_c; ++o) {
            const double* src = g.data() + (b * p.out_c + o) * hw;
            std::copy(src, src + hw, G.data() + o * cols + b * hw);
          }
        }
        if (bs.defined() && bs.requires_grad()) {
          auto gb = bs.ensure_grad();
          for (std::size_t o = 0; o < p.out_c; ++o) gb[o] += G.row(o).sum();
        }
        const bool need_w = ws.requires_grad();
        const bool need_x = xs.requires_grad();
        if (!need_w && !need_x) return;
        if (need_w && !col) col = std::make_shared<std::vector<double>>(im2col(p, xs.data()));
        std::vector<double> dcol;
        if (need_x) dcol.resize(p.in_c * p.k_h * p.k_w * cols);
        for (std::size_t gi = 0; gi < p.geo.groups; ++gi) {
          auto Gg = G.middleRows(gi * p.group_out(), p.group_out());
          if (need_w) {
            ConstMatMap Cg(col->data() + gi * p.patch() * cols, p.patch(), cols);
            MatMap GW(ws.ensure_grad().data() + gi * p.group_out() * p.patch(), p.group_out(), p.patch());
            GW.noalias() += Gg * Cg.transpose();
          }
          if (need_x) {
            ConstMatMap Wg(ws.data().data() + gi * p.group_out() * p.patch(), p.group_out(), p.patch());
            MatMap DC(dcol.data() + gi * p.patch() * cols, p.patch(), cols);
            DC.noalias() = Wg.transpose() * Gg;
          }
        }
        col.reset();
        if (need_x) col2im_add(p, dcol, xs.ensure_grad());
      });
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, const Conv2dGeometry& geo) {
  require_rank(x, 4, "conv2d");
  require_rank(weight, 4, "conv2d weight");
  const ConvPlan p = make_plan(x.shape(), weight.shape(), geo);
  return conv_core("conv2d", x, weight, bias, p, {p.batch, p.out_c, p.out_h, p.out_w});
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, const Conv1dGeometry& geo) {
  require_rank(x, 3, "conv1d");
  require_rank(weight, 3, "conv1d weight");
  Conv2dGeometry g2;
  g2.stride_w = geo.stride;
  g2.dilation_w = geo.dilation;
  g2.pad_left = geo.pad_left;
  g2.pad_right = geo.pad_right;
  g2.groups = geo.groups;
  // Same memory layout as [B,C,1,L] / [O,C/g,1,K].
  const ConvPlan p = make_plan({x.dim(0), x.dim(1), 1, x.dim(2)},
                               {weight.dim(0), weight.dim(1), 1, weight.dim(2)}, g2);
  return conv_core("conv1d", x, weight, bias, p, {p.batch, p.out_c, p.out_w});
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double out) { return 1.0 - out * out; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double out) { return out * (1.0 - out); });
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw DomainError("dropout: rate must lie in [0,1), got " + std::to_string(p));
  if (mode == Mode::Eval || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto mask = std::make_shared<std::vector<double>>(x.numel());
  for (auto& m : *mask) m = uni(rng) < p ? 0.0 : keep_scale;
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] * (*mask)[i];
  Tensor xs = x;
  return finish("dropout", x.shape(), std::move(out), {&x}, [xs, mask](std::span<const double> g) mutable {
    if (!xs.requires_grad()) return;
    auto gx = xs.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (*mask)[i];
  });
}

Tensor global_avg_pool(const Tensor& x) {
  if (x.rank() < 3) throw ShapeError("global_avg_pool: expected rank >= 3, got " + to_string(x.shape()));
  const std::size_t rows = x.dim(0) * x.dim(1);
  const std::size_t span = x.numel() / rows;
  std::vector<double> out(rows);
  auto in = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = 0; i < span; ++i) acc += in[r * span + i];
    out[r] = acc / static_cast<double>(span);
  }
  Tensor xs = x;
  return finish("global_avg_pool", {x.dim(0), x.dim(1)}, std::move(out), {&x},
                [xs, rows, span](std::span<const double> g) mutable {
                  if (!xs.requires_grad()) return;
                  auto gx = xs.ensure_grad();
                  const double inv = 1.0 / static_cast<double>(span);
                  for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t i = 0; i < span; ++i) gx[r * span + i] += g[r] * inv;
                  }
                });
}

Tensor avg_pool1d(const Tensor& x, std::size_t k) {
  require_rank(x, 3, "avg_pool1d");
  if (k == 0 || x.dim(2) % k) {
    throw ShapeError("avg_pool1d: window " + std::to_string(k) + " must divide length " +
                     std::to_string(x.dim(2)));
  }
  const std::size_t rows = x.dim(0) * x.dim(1);
  const std::size_t out_len = x.dim(2) / k;
  std::vector<double> out(rows * out_len);
  auto in = x.data();
  const double inv = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += in[i * k + j];
    out[i] = acc * inv;
  }
  Tensor xs = x;
  return finish("avg_pool1d", {x.dim(0), x.dim(1), out_len}, std::move(out), {&x},
                [xs, k, inv](std::span<const double> g) mutable {
                  if (!xs.requires_grad()) return;
                  auto gx = xs.ensure_grad();
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    for (std::size_t j = 0; j < k; ++j) gx[i * k + j] += g[i] * inv;
                  }
                });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  Tensor xs = x;
  return finish("reshape", std::move(shape), std::move(out), {&x}, [xs](std::span<const double> g) mutable {
    if (!xs.requires_grad()) return;
    auto gx = xs.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Tensor flatten(const Tensor& x) {
  if (x.rank() < 2) throw ShapeError("flatten: expected rank >= 2, got " + to_string(x.shape()));
  return reshape(x, {x.dim(0), x.numel() / x.dim(0)});
}

Tensor transpose_last2(const Tensor& x) {
  require_rank(x, 3, "transpose_last2");
  const std::size_t b = x.dim(0), rows = x.dim(1), cols = x.dim(2);
  std::vector<double> out(x.numel());
  auto in = x.data();
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        out[(n * cols + j) * rows + i] = in[(n * rows + i) * cols + j];
      }
    }
  }
  Tensor xs = x;
  return finish("transpose_last2", {b, cols, rows}, std::move(out), {&x},
                [xs, b, rows, cols](std::span<const double> g) mutable {
                  if (!xs.requires_grad()) return;
                  auto gx = xs.ensure_grad();
                  for (std::size_t n = 0; n < b; ++n) {
                    for (std::size_t i = 0; i < rows; ++i) {
                      for (std::size_t j = 0; j < cols; ++j) {
                        gx[(n * rows + i) * cols + j] += g[(n * cols + j) * rows + i];
                      }
                    }
                  }
                });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Tensor& first = parts.front();
  if (first.rank() < 2) throw ShapeError("concat: inputs need rank >= 2");
  const std::size_t batch = first.dim(0);
  Shape trailing(first.shape().begin() + 2, first.shape().end());
  const std::size_t inner = numel(trailing);
  std::size_t total_c = 0;
  std::vector<std::size_t> widths;
  for (const auto& t : parts) {
    Shape tt(t.shape().begin() + std::min<std::size_t>(2, t.rank()), t.shape().end());
    if (t.rank() != first.rank() || t.dim(0) != batch || tt != trailing) {
      throw ShapeError("concat: incompatible shapes " + to_string(first.shape()) + " and " +
                       to_string(t.shape()));
    }
    widths.push_back(t.dim(1) * inner);
    total_c += t.dim(1);
  }
  const std::size_t row = total_c * inner;
  std::vector<double> out(batch * row);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto in = parts[k].data();
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(in.data() + b * widths[k], widths[k], out.data() + b * row + offset);
    }
    offset += widths[k];
  }
  Shape shape{batch, total_c};
  shape.insert(shape.end(), trailing.begin(), trailing.end());

  std::vector<Tensor> inputs(parts.begin(), parts.end());
  check_finite(out, "concat");
  Tensor result = Tensor::from(std::move(shape), std::move(out));
  bool track = false;
  if (grad_enabled()) {
    for (const auto& t : inputs) track = track || t.requires_grad();
  }
  if (track) {
    result.set_requires_grad(true);
    auto node = std::make_shared<Node>();
    node->op = "concat";
    node->inputs = inputs;
    node->backward = [inputs, widths, batch, row](std::span<const double> g) mutable {
      std::size_t off = 0;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (inputs[k].requires_grad()) {
          auto gk = inputs[k].ensure_grad();
          for (std::size_t b = 0; b < batch; ++b) {
            const double* src = g.data() + b * row + off;
            double* dst = gk.data() + b * widths[k];
            for (std::size_t i = 0; i < widths[k]; ++i) dst[i] += src[i];
          }
        }
        off += widths[k];
      }
    };
    result.set_node(std::move(node));
  }
  return result;
}

Tensor column(const Tensor& x, std::size_t j) {
  require_rank(x, 2, "column");
  const std::size_t b = x.dim(0), k = x.dim(1);
  if (j >= k) throw ShapeError("column: index " + std::to_string(j) + " out of range for " + to_string(x.shape()));
  std::vector<double> out(b);
  for (std::size_t i = 0; i < b; ++i) out[i] = x.data()[i * k + j];
  Tensor xs = x;
  return finish("column", {b, 1}, std::move(out), {&x}, [xs, b, k, j](std::span<const double> g) mutable {
    if (!xs.requires_grad()) return;
    auto gx = xs.ensure_grad();
    for (std::size_t i = 0; i < b; ++i) gx[i * k + j] += g[i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  Tensor as = a, bs = b;
  return finish("add", a.shape(), std::move(out), {&a, &b}, [as, bs](std::span<const double> g) mutable {
    for (Tensor* t : {&as, &bs}) {
      if (!t->requires_grad()) continue;
      auto gt = t->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gt[i] += g[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  Tensor as = a, bs = b;
  return finish("mul", a.shape(), std::move(out), {&a, &b}, [as, bs](std::span<const double> g) mutable {
    if (as.requires_grad()) {
      auto ga = as.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bs.data()[i];
    }
    if (bs.requires_grad()) {
      auto gb = bs.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * as.data()[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * factor;
  Tensor xs = x;
  return finish("scale", x.shape(), std::move(out), {&x}, [xs, factor](std::span<const double> g) mutable {
    if (!xs.requires_grad()) return;
    auto gx = xs.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * factor;
  });
}

Tensor channel_scale(const Tensor& x, const Tensor& gate) {
  if (x.rank() < 2 || gate.rank() != 2 || gate.dim(0) != x.dim(0) || gate.dim(1) != x.dim(1)) {
    throw ShapeError("channel_scale: gate " + to_string(gate.shape()) + " incompatible with " +
                     to_string(x.shape()));
  }
  const std::size_t rows = x.dim(0) * x.dim(1);
  const std::size_t span = x.numel() / rows;
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = gate.data()[r];
    for (std::size_t i = 0; i < span; ++i) out[r * span + i] = x.data()[r * span + i] * s;
  }
  Tensor xs = x, gs = gate;
  return finish("channel_scale", x.shape(), std::move(out), {&x, &gate},
                [xs, gs, rows, span](std::span<const double> g) mutable {
                  if (xs.requires_grad()) {
                    auto gx = xs.ensure_grad();
                    for (std::size_t r = 0; r < rows; ++r) {
                      const double s = gs.data()[r];
                      for (std::size_t i = 0; i < span; ++i) gx[r * span + i] += g[r * span + i] * s;
                    }
                  }
                  if (gs.requires_grad()) {
                    auto gg = gs.ensure_grad();
                    for (std::size_t r = 0; r < rows; ++r) {
                      double acc = 0.0;
                      for (std::size_t i = 0; i < span; ++i) acc += g[r * span + i] * xs.data()[r * span + i];
                      gg[r] += acc;
                    }
                  }
                });
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  Tensor xs = x;
  return finish("sum", {1}, {acc}, {&x}, [xs](std::span<const double> g) mutable {
    if (!xs.requires_grad()) return;
    for (auto& v : xs.ensure_grad()) v += g[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_loss");
  const std::size_t n = pred.numel();
  auto diff = std::make_shared<std::vector<double>>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (*diff)[i] = pred.data()[i] - target.data()[i];
    acc += (*diff)[i] * (*diff)[i];
  }
  Tensor ps = pred;
  return finish("mse_loss", {1}, {acc / static_cast<double>(n)}, {&pred},
                [ps, diff, n](std::span<const double> g) mutable {
                  if (!ps.requires_grad()) return;
                  auto gp = ps.ensure_grad();
                  const double k = 2.0 * g[0] / static_cast<double>(n);
                  for (std::size_t i = 0; i < n; ++i) gp[i] += k * (*diff)[i];
                });
}

Tensor l1_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "l1_loss");
  const std::size_t n = pred.numel();
  auto sign = std::make_shared<std::vector<double>>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred.data()[i] - target.data()[i];
    (*sign)[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    acc += std::abs(d);
  }
  Tensor ps = pred;
  return finish("l1_loss", {1}, {acc / static_cast<double>(n)}, {&pred},
                [ps, sign, n](std::span<const double> g) mutable {
                  if (!ps.requires_grad()) return;
                  auto gp = ps.ensure_grad();
                  const double k = g[0] / static_cast<double>(n);
                  for (std::size_t i = 0; i < n; ++i) gp[i] += k * (*sign)[i];
                });
}

std::vector<double> softmax_rows(const Tensor& logits) {
  require_rank(logits, 2, "softmax_rows");
  const std::size_t b = logits.dim(0), n = logits.dim(1);
  std::vector<double> out(b * n);
  for (std::size_t i = 0; i < b; ++i) {
    const double* row = logits.data().data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += (out[i * n + j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
  }
  return out;
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
  require_rank(logits, 2, "cross_entropy");
  const std::size_t b = logits.dim(0), n = logits.dim(1);
  if (labels.size() != b) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) + " labels for batch of " +
                     std::to_string(b));
  }
  auto probs = std::make_shared<std::vector<double>>(softmax_rows(logits));
  auto lab = std::make_shared<std::vector<int>>(labels.begin(), labels.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= n) {
      throw DomainError("cross_entropy: label " + std::to_string(y) + " outside [0," + std::to_string(n) + ")");
    }
    const double* row = logits.data().data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(row[j] - mx);
    acc += std::log(z) + mx - row[y];
  }
  Tensor ls = logits;
  return finish("cross_entropy", {1}, {acc / static_cast<double>(b)}, {&logits},
                [ls, probs, lab, b, n](std::span<const double> g) mutable {
                  if (!ls.requires_grad()) return;
                  auto gl = ls.ensure_grad();
                  const double k = g[0] / static_cast<double>(b);
                  for (std::size_t i = 0; i < b; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                      const double target = static_cast<int>(j) == (*lab)[i] ? 1.0 : 0.0;
                      gl[i * n + j] += k * ((*probs)[i * n + j] - target);
                    }
                  }
                });
}

}  // namespace jamloc::nn::ops
