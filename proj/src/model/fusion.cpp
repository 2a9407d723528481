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

#include "jamloc/model/fusion.hpp"

#include "jamloc/error.hpp"
#include "jamloc/nn/ops.hpp"

namespace jamloc::model {

namespace ops = nn::ops;
using nn::Layer;
using nn::LayerSpec;

constexpr std::size_t kIqStemKernel = 8;

std::size_t FusionConfig::fused_dim() const {
  std::size_t d = 0;
  if (branches & kSpecBranch) d += spec_branch_dim;
  if (branches & kIqBranch) d += iq_branch_dim();
  if (branches & kAoaBranch) d += aoa_branch_dim;
  return d;
}

void FusionConfig::validate() const {
  if (!branches || (branches & ~unsigned{kAllBranches})) throw ConfigError("fusion: branch set must be a nonempty subset");
  if (spec_channels.empty()) throw ConfigError("fusion: spec_channels must not be empty");
  if (iq_channels.size() != iq_dilations.size()) throw ConfigError("fusion: iq_channels and iq_dilations differ in length");
  if (iq_pooled_blocks > iq_channels.size()) throw ConfigError("fusion: iq_pooled_blocks exceeds block count");
  if ((dsp::kSnapshotLen / kIqStemKernel) >> iq_pooled_blocks == 0) throw ConfigError("fusion: too many pooled blocks");
  if (!(dropout_pre_concat >= 0.0 && dropout_pre_concat < 1.0) ||
      !(dropout_post_head >= 0.0 && dropout_post_head < 1.0)) {
    throw ConfigError("fusion: dropout rates must lie in [0,1)");
  }
  if (with_classifier && n_classes < 2) throw ConfigError("fusion: classifier needs at least 2 classes");
  if (!head_hidden || !spec_branch_dim || !aoa_branch_dim || !aoa_conv_channels || !iq_stem_channels || !iq_kernel) {
    throw ConfigError("fusion: layer widths must be positive");
  }
}

FusionConfig FusionConfig::tiny() {
  FusionConfig c;
  c.spec_channels = {4, 8};
  c.spec_branch_dim = 8;
  c.iq_stem_channels = 4;
  c.iq_channels = {8, 8};
  c.iq_dilations = {1, 2};
  c.iq_pooled_blocks = 1;
  c.aoa_conv_channels = 4;
  c.aoa_branch_dim = 4;
  c.head_hidden = 8;
  c.dropout_pre_concat = 0.0;
  return c;
}

nlohmann::json FusionConfig::to_json() const {
  return {{"branches", branches},
          {"spec_channels", spec_channels},
          {"spec_branch_dim", spec_branch_dim},
          {"iq_stem_channels", iq_stem_channels},
          {"iq_channels", iq_channels},
          {"iq_dilations", iq_dilations},
          {"iq_kernel", iq_kernel},
          {"iq_pooled_blocks", iq_pooled_blocks},
          {"aoa_conv_channels", aoa_conv_channels},
          {"aoa_branch_dim", aoa_branch_dim},
          {"head_hidden", head_hidden},
          {"dropout_pre_concat", dropout_pre_concat},
          {"dropout_post_head", dropout_post_head},
          {"with_classifier", with_classifier},
          {"n_classes", n_classes}};
}

FusionConfig FusionConfig::from_json(const nlohmann::json& j) {
  FusionConfig c;
  try {
    c.branches = j.at("branches").get<unsigned>();
    c.spec_channels = j.at("spec_channels").get<std::vector<std::size_t>>();
    c.spec_branch_dim = j.at("spec_branch_dim").get<std::size_t>();
    c.iq_stem_channels = j.at("iq_stem_channels").get<std::size_t>();
    c.iq_channels = j.at("iq_channels").get<std::vector<std::size_t>>();
    c.iq_dilations = j.at("iq_dilations").get<std::vector<std::size_t>>();
    c.iq_kernel = j.at("iq_kernel").get<std::size_t>();
    c.iq_pooled_blocks = j.at("iq_pooled_blocks").get<std::size_t>();
    c.aoa_conv_channels = j.at("aoa_conv_channels").get<std::size_t>();
    c.aoa_branch_dim = j.at("aoa_branch_dim").get<std::size_t>();
    c.head_hidden = j.at("head_hidden").get<std::size_t>();
    c.dropout_pre_concat = j.at("dropout_pre_concat").get<double>();
    c.dropout_post_head = j.at("dropout_post_head").get<double>();
    c.with_classifier = j.at("with_classifier").get<bool>();
    c.n_classes = j.at("n_classes").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("fusion config: ") + e.what());
  }
  c.validate();
  return c;
}

FusionModel::FusionModel(FusionConfig cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng init(init_seed);
  if (cfg_.branches & kSpecBranch) {
    std::size_t in = kPatches;
    for (std::size_t i = 0; i < cfg_.spec_channels.size(); ++i) {
      spec_convs_.emplace_back(LayerSpec::conv2d(in, cfg_.spec_channels[i], 3, 2), init,
                               "spec.conv" + std::to_string(i + 1));
      in = cfg_.spec_channels[i];
    }
    spec_linear_ = Layer(LayerSpec::dense(in, cfg_.spec_branch_dim), init, "spec.linear");
  }
  if (cfg_.branches & kIqBranch) {
    iq_stem_ = Layer(LayerSpec::conv1d(2 * kPatches, cfg_.iq_stem_channels, kIqStemKernel, kIqStemKernel), init,
                     "iq.stem");
    std::size_t in = cfg_.iq_stem_channels;
    for (std::size_t i = 0; i < cfg_.iq_channels.size(); ++i) {
      const std::size_t out = cfg_.iq_channels[i];
      const std::size_t d = cfg_.iq_dilations[i];
      const std::string name = "iq.block" + std::to_string(i + 1);
      Residual r;
      r.conv1 = Layer(LayerSpec::causal_conv1d(in, out, cfg_.iq_kernel, d), init, name + ".conv1");
      r.conv2 = Layer(LayerSpec::causal_conv1d(out, out, cfg_.iq_kernel, d), init, name + ".conv2");
      if (in != out) {
        r.proj = Layer(LayerSpec::conv1d(in, out, 1), init, name + ".proj");
        r.has_proj = true;
      }
      iq_blocks_.push_back(std::move(r));
      in = out;
    }
  }
  if (cfg_.branches & kAoaBranch) {
    aoa_conv_ = Layer(LayerSpec::conv1d(dsp::kAoaFeatures, cfg_.aoa_conv_channels, 1), init, "aoa.conv");
    aoa_linear_ = Layer(LayerSpec::dense(cfg_.aoa_conv_channels * kPatches, cfg_.aoa_branch_dim), init, "aoa.linear");
  }
  heads_ = HeadSet(cfg_.fused_dim(), cfg_.head_hidden, cfg_.with_classifier ? cfg_.n_classes : 0, 0, init);
}

unsigned FusionModel::required_features() const {
  unsigned s = 0;
  if (cfg_.branches & kSpecBranch) s |= dsp::kSpectrogram;
  if (cfg_.branches & kIqBranch) s |= dsp::kIq;
  if (cfg_.branches & kAoaBranch) s |= dsp::kAoa;
  return s;
}

Tensor FusionModel::spec_encoder(const Tensor& x, Mode mode, Rng& rng) const {
  if (x.rank() != 4 || x.dim(1) != kPatches) throw ShapeError("spec encoder expects [B,4,32,32], got " + nn::to_string(x.shape()));
  Tensor h = x;
  for (const auto& conv : spec_convs_) h = ops::relu(conv.forward(h, mode, rng));
  return spec_linear_.forward(ops::global_avg_pool(h), mode, rng);
}

Tensor FusionModel::iq_encoder(const Tensor& x, Mode mode, Rng& rng) const {
  if (x.rank() != 3 || x.dim(1) != 2 * kPatches || x.dim(2) % kIqStemKernel) {
    throw ShapeError("iq encoder expects [B,8,L] with L divisible by 8, got " + nn::to_string(x.shape()));
  }
  Tensor h = ops::relu(iq_stem_.forward(x, mode, rng));
  for (std::size_t i = 0; i < iq_blocks_.size(); ++i) {
    const auto& b = iq_blocks_[i];
    Tensor y = ops::relu(b.conv1.forward(h, mode, rng));
    y = b.conv2.forward(y, mode, rng);
    const Tensor skip = b.has_proj ? b.proj.forward(h, mode, rng) : h;
    h = ops::relu(ops::add(y, skip));
    if (i < cfg_.iq_pooled_blocks) h = ops::avg_pool1d(h, 2);
  }
  return ops::global_avg_pool(h);
}

Tensor FusionModel::aoa_encoder(const Tensor& x, Mode mode, Rng& rng) const {
  if (x.rank() != 3 || x.dim(1) != kPatches || x.dim(2) != dsp::kAoaFeatures) {
    throw ShapeError("aoa encoder expects [B,4,22], got " + nn::to_string(x.shape()));
  }
  // Features become channels; the patch axis is the sequence.
  Tensor h = ops::relu(aoa_conv_.forward(ops::transpose_last2(x), mode, rng));
  return aoa_linear_.forward(ops::flatten(h), mode, rng);
}

Tensor FusionModel::fused(const BatchInputs& in, Mode mode, Rng& rng) const {
  std::vector<Tensor> parts;
  const double p = cfg_.dropout_pre_concat;
  if (cfg_.branches & kSpecBranch) parts.push_back(ops::dropout(spec_encoder(in.spectrogram, mode, rng), p, mode, rng));
  if (cfg_.branches & kIqBranch) parts.push_back(ops::dropout(iq_encoder(in.iq, mode, rng), p, mode, rng));
  if (cfg_.branches & kAoaBranch) parts.push_back(ops::dropout(aoa_encoder(in.aoa, mode, rng), p, mode, rng));
  return parts.size() == 1 ? parts.front() : ops::concat(parts);
}

ModelOutput FusionModel::forward(const BatchInputs& in, Mode mode, Rng& rng) const {
  return heads_.forward(fused(in, mode, rng), cfg_.dropout_post_head, mode, rng);
}

std::vector<Tensor> FusionModel::parameters() const {
  std::vector<Tensor> p;
  auto take = [&](const Layer& l) {
    for (const auto& t : l.parameters()) p.push_back(t);
  };
  for (const auto& l : spec_convs_) take(l);
  if (cfg_.branches & kSpecBranch) take(spec_linear_);
  if (cfg_.branches & kIqBranch) {
    take(iq_stem_);
    for (const auto& b : iq_blocks_) {
      take(b.conv1);
      take(b.conv2);
      if (b.has_proj) take(b.proj);
    }
  }
  if (cfg_.branches & kAoaBranch) {
    take(aoa_conv_);
    take(aoa_linear_);
  }
  heads_.collect(p);
  return p;
}

std::size_t FusionModel::iq_receptive_field() const {
  // Each block adds 2*(k-1)*d steps at its own rate; the stem adds 8 samples.
  std::size_t rf = 1;
  std::size_t step = kIqStemKernel;
  for (std::size_t i = 0; i < cfg_.iq_dilations.size(); ++i) {
    rf += 2 * (cfg_.iq_kernel - 1) * cfg_.iq_dilations[i] * step;
    if (i < cfg_.iq_pooled_blocks) step *= 2;
  }
  return rf + kIqStemKernel - 1;
}

}  // namespace jamloc::model
