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

#include <vector>

#include "jamloc/model/common.hpp"

namespace jamloc::model {

// Encoder branches the fusion model may use.
enum FusionBranch : unsigned {
  kSpecBranch = 1u << 0,
  kIqBranch = 1u << 1,
  kAoaBranch = 1u << 2,
  kAllBranches = 0x7,
};

struct FusionConfig {
  unsigned branches = kAllBranches;
  std::vector<std::size_t> spec_channels{16, 32, 64, 128};  // 3x3 stride-2 convs
  std::size_t spec_branch_dim = 128;
  std::size_t iq_stem_channels = 32;  // kernel 8, stride 8
  std::vector<std::size_t> iq_channels{32, 64, 64, 128, 128};
  std::vector<std::size_t> iq_dilations{1, 2, 4, 8, 16};
  std::size_t iq_kernel = 3;
  std::size_t iq_pooled_blocks = 3;  // average-pool by 2 after the first N blocks
  std::size_t aoa_conv_channels = 32;
  std::size_t aoa_branch_dim = 32;
  std::size_t head_hidden = 512;
  double dropout_pre_concat = 0.1;
  double dropout_post_head = 0.0;
  bool with_classifier = false;
  std::size_t n_classes = 6;

  // IQ branch width is the last residual block's channel count.
  std::size_t iq_branch_dim() const { return iq_channels.empty() ? iq_stem_channels : iq_channels.back(); }
  std::size_t fused_dim() const;
  // Throws ConfigError on inconsistent settings.
  void validate() const;

  // Branch sizes 8/8/4 for gradient checks.
  static FusionConfig tiny();

  nlohmann::json to_json() const;
  static FusionConfig from_json(const nlohmann::json& j);
};

class FusionModel final : public Model {
 public:
  FusionModel(FusionConfig cfg, std::uint64_t init_seed);

  ModelKind kind() const override { return ModelKind::Fusion; }
  ModelOutput forward(const BatchInputs& in, Mode mode, Rng& rng) const override;
  std::vector<Tensor> parameters() const override;
  unsigned required_features() const override;
  nlohmann::json config_json() const override { return cfg_.to_json(); }
  const FusionConfig& config() const { return cfg_; }

  Tensor spec_encoder(const Tensor& spectrogram, Mode mode, Rng& rng) const;  // [B,4,32,32] -> [B,128]
  Tensor iq_encoder(const Tensor& iq, Mode mode, Rng& rng) const;              // [B,8,1024] -> [B,128]
  Tensor aoa_encoder(const Tensor& aoa, Mode mode, Rng& rng) const;            // [B,4,22] -> [B,32]
  // Concatenated branch outputs after pre-concat dropout.
  Tensor fused(const BatchInputs& in, Mode mode, Rng& rng) const;

  // Samples between the first and last input reaching one output step of the
  // residual stack, measured at the input sample rate.
  std::size_t iq_receptive_field() const;

 private:
  struct Residual {
    nn::Layer conv1, conv2, proj;
    bool has_proj = false;
  };

  FusionConfig cfg_;
  std::vector<nn::Layer> spec_convs_;
  nn::Layer spec_linear_;
  nn::Layer iq_stem_;
  std::vector<Residual> iq_blocks_;
  nn::Layer aoa_conv_;
  nn::Layer aoa_linear_;
  HeadSet heads_;
};

}  // namespace jamloc::model
