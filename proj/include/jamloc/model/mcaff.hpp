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

#include <array>
#include <string>
#include <vector>

#include "jamloc/model/common.hpp"

namespace jamloc::model {

enum class McaffPath : unsigned { IQ = 0, FFT = 1, CFO = 2, STFT = 3 };
inline constexpr std::size_t kMcaffPaths = 4;
const char* to_string(McaffPath p);

struct McaffConfig {
  std::array<bool, kMcaffPaths> enabled{true, true, true, true};
  std::size_t path_feature_dim = 64;  // C of the common C x 8 x 8 path output
  std::size_t attention_reduction = 4;
  std::size_t cardinality = 8;
  std::size_t head_hidden = 512;
  std::size_t n_classes = 6;
  std::size_t n_subclasses = 24;  // 0 disables the subclass head
  double dropout_post_head = 0.0;

  std::size_t enabled_count() const;
  void validate() const;
  // Paths joined with '+', e.g. "IQ+CFO+STFT".
  std::string preset_name() const;

  // Ablation presets: "IQ", "FFT", "CFO", "STFT", "IQ+CFO+STFT", "IQ+FFT+CFO+STFT".
  static McaffConfig preset(const std::string& name);
  static const std::vector<std::string>& preset_names();
  // C = 8 for gradient checks.
  static McaffConfig tiny();

  nlohmann::json to_json() const;
  static McaffConfig from_json(const nlohmann::json& j);
};

// Squeeze-excitation channel gate applied with one parameter set to every path.
class SharedAttention {
 public:
  SharedAttention() = default;
  SharedAttention(std::size_t channels, std::size_t reduction, Rng& init);
  Tensor forward(const Tensor& x, Mode mode, Rng& rng) const;  // [B,C,H,W] -> same
  // Gate values in (0,1), [B,C].
  Tensor gate(const Tensor& x, Mode mode, Rng& rng) const;
  std::vector<Tensor> parameters() const;

 private:
  nn::Layer squeeze_, excite_;
};

class McaffModel final : public Model {
 public:
  McaffModel(McaffConfig cfg, std::uint64_t init_seed);

  ModelKind kind() const override { return ModelKind::Mcaff; }
  ModelOutput forward(const BatchInputs& in, Mode mode, Rng& rng) const override;
  std::vector<Tensor> parameters() const override;
  unsigned required_features() const override;
  nlohmann::json config_json() const override { return cfg_.to_json(); }
  const McaffConfig& config() const { return cfg_; }

  // Path stem output before attention, [B,C,8,8].
  Tensor path_features(McaffPath p, const BatchInputs& in, Mode mode, Rng& rng) const;
  // Attended paths concatenated in fixed slot order, [B,4C,8,8]; disabled
  // slots hold zeros.
  Tensor fused(const BatchInputs& in, Mode mode, Rng& rng) const;
  const SharedAttention& attention() const { return attention_; }
  std::size_t stem_parameter_count(McaffPath p) const;

 private:
  struct Stem {
    nn::Layer conv1, conv2;
  };

  McaffConfig cfg_;
  std::array<Stem, kMcaffPaths> stems_;
  SharedAttention attention_;
  nn::Layer reduce_, grouped_, expand_;
  HeadSet heads_;
};

}  // namespace jamloc::model
