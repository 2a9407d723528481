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

#include "jamloc/model/mcaff.hpp"

#include "jamloc/error.hpp"
#include "jamloc/nn/ops.hpp"

namespace jamloc::model {

namespace ops = nn::ops;
using nn::Layer;
using nn::LayerSpec;

constexpr std::size_t kFold = 32;  // 1024-sample sequences fold to 32 x 32

const char* to_string(McaffPath p) {
  switch (p) {
    case McaffPath::IQ: return "IQ";
    case McaffPath::FFT: return "FFT";
    case McaffPath::CFO: return "CFO";
    case McaffPath::STFT: return "STFT";
  }
  return "?";
}

std::size_t McaffConfig::enabled_count() const {
  std::size_t n = 0;
  for (bool e : enabled) n += e;
  return n;
}

void McaffConfig::validate() const {
  if (!enabled_count()) throw ConfigError("mcaff: at least one path must be enabled");
  if (path_feature_dim < 2 || path_feature_dim % 2) throw ConfigError("mcaff: path_feature_dim must be even");
  if (!attention_reduction || path_feature_dim % attention_reduction) {
    throw ConfigError("mcaff: path_feature_dim must be divisible by attention_reduction");
  }
  if (!cardinality || path_feature_dim % cardinality) {
    throw ConfigError("mcaff: path_feature_dim must be divisible by cardinality");
  }
  if (n_classes < 2) throw ConfigError("mcaff: n_classes must be at least 2");
  if (!head_hidden) throw ConfigError("mcaff: head_hidden must be positive");
  if (!(dropout_post_head >= 0.0 && dropout_post_head < 1.0)) throw ConfigError("mcaff: dropout must lie in [0,1)");
}

std::string McaffConfig::preset_name() const {
  std::string s;
  for (std::size_t i = 0; i < kMcaffPaths; ++i) {
    if (!enabled[i]) continue;
    if (!s.empty()) s += '+';
    s += to_string(static_cast<McaffPath>(i));
  }
  return s;
}

const std::vector<std::string>& McaffConfig::preset_names() {
  static const std::vector<std::string> names{"IQ", "FFT", "CFO", "STFT", "IQ+CFO+STFT", "IQ+FFT+CFO+STFT"};
  return names;
}

McaffConfig McaffConfig::preset(const std::string& name) {
  McaffConfig c;
  c.enabled = {false, false, false, false};
  std::size_t start = 0;
  while (start <= name.size()) {
    const auto end = std::min(name.find('+', start), name.size());
    const std::string tok = name.substr(start, end - start);
    bool found = false;
    for (std::size_t i = 0; i < kMcaffPaths; ++i) {
      if (tok == to_string(static_cast<McaffPath>(i))) {
        c.enabled[i] = true;
        found = true;
      }
    }
    if (!found) throw ConfigError("mcaff: unknown path '" + tok + "' in preset '" + name + "'");
    start = end + 1;
  }
  c.validate();
  return c;
}

McaffConfig McaffConfig::tiny() {
  McaffConfig c;
  c.path_feature_dim = 8;
  c.attention_reduction = 4;
  c.cardinality = 2;
  c.head_hidden = 8;
  c.n_subclasses = 4;
  return c;
}

nlohmann::json McaffConfig::to_json() const {
  return {{"paths", preset_name()},
          {"path_feature_dim", path_feature_dim},
          {"attention_reduction", attention_reduction},
          {"cardinality", cardinality},
          {"head_hidden", head_hidden},
          {"n_classes", n_classes},
          {"n_subclasses", n_subclasses},
          {"dropout_post_head", dropout_post_head}};
}

McaffConfig McaffConfig::from_json(const nlohmann::json& j) {
  try {
    McaffConfig c = preset(j.at("paths").get<std::string>());
    c.path_feature_dim = j.at("path_feature_dim").get<std::size_t>();
    c.attention_reduction = j.at("attention_reduction").get<std::size_t>();
    c.cardinality = j.at("cardinality").get<std::size_t>();
    c.head_hidden = j.at("head_hidden").get<std::size_t>();
    c.n_classes = j.at("n_classes").get<std::size_t>();
    c.n_subclasses = j.at("n_subclasses").get<std::size_t>();
    c.dropout_post_head = j.at("dropout_post_head").get<double>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mcaff config: ") + e.what());
  }
}

SharedAttention::SharedAttention(std::size_t channels, std::size_t reduction, Rng& init)
    : squeeze_(LayerSpec::dense(channels, channels / reduction), init, "attention.squeeze"),
      excite_(LayerSpec::dense(channels / reduction, channels), init, "attention.excite") {}

Tensor SharedAttention::gate(const Tensor& x, Mode mode, Rng& rng) const {
  Tensor s = ops::relu(squeeze_.forward(ops::global_avg_pool(x), mode, rng));
  return ops::sigmoid(excite_.forward(s, mode, rng));
}

Tensor SharedAttention::forward(const Tensor& x, Mode mode, Rng& rng) const {
  return ops::channel_scale(x, gate(x, mode, rng));
}

std::vector<Tensor> SharedAttention::parameters() const {
  auto p = squeeze_.parameters();
  for (const auto& t : excite_.parameters()) p.push_back(t);
  return p;
}

McaffModel::McaffModel(McaffConfig cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  Rng init(init_seed);
  const std::size_t c = cfg_.path_feature_dim;
  const std::size_t mid = c / 2;
  for (std::size_t i = 0; i < kMcaffPaths; ++i) {
    if (!cfg_.enabled[i]) continue;
    const auto p = static_cast<McaffPath>(i);
    const std::string name = std::string("stem.") + to_string(p);
    if (p == McaffPath::STFT) {
      // [4,128,15] -> [mid,32,8] -> [C,8,8]
      LayerSpec a = LayerSpec::conv2d(kPatches, mid, 1);
      a.kernel_h = 4;
      a.kernel_w = 3;
      a.stride_h = 4;
      a.stride_w = 2;
      a.pad_top = a.pad_bottom = 0;
      a.pad_left = a.pad_right = 1;
      LayerSpec b = LayerSpec::conv2d(mid, c, 1);
      b.kernel_h = 4;
      b.stride_h = 4;
      b.pad_top = b.pad_bottom = b.pad_left = b.pad_right = 0;
      stems_[i].conv1 = Layer(a, init, name + ".conv1");
      stems_[i].conv2 = Layer(b, init, name + ".conv2");
    } else {
      // [ch,32,32] -> [mid,16,16] -> [C,8,8]
      const std::size_t in_ch = p == McaffPath::IQ ? 2 * kPatches : kPatches;
      stems_[i].conv1 = Layer(LayerSpec::conv2d(in_ch, mid, 3, 2), init, name + ".conv1");
      stems_[i].conv2 = Layer(LayerSpec::conv2d(mid, c, 3, 2), init, name + ".conv2");
    }
  }
  attention_ = SharedAttention(c, cfg_.attention_reduction, init);
  const std::size_t wide = kMcaffPaths * c;
  reduce_ = Layer(LayerSpec::conv2d(wide, c, 1), init, "block.reduce");
  grouped_ = Layer(LayerSpec::grouped_conv2d(c, c, 3, cfg_.cardinality), init, "block.grouped");
  expand_ = Layer(LayerSpec::conv2d(c, wide, 1), init, "block.expand");
  heads_ = HeadSet(wide, cfg_.head_hidden, cfg_.n_classes, cfg_.n_subclasses, init);
}

unsigned McaffModel::required_features() const {
  unsigned s = 0;
  if (cfg_.enabled[0]) s |= dsp::kIq;
  if (cfg_.enabled[1]) s |= dsp::kSpectrogram;
  if (cfg_.enabled[2]) s |= dsp::kCfo;
  if (cfg_.enabled[3]) s |= dsp::kStft;
  return s;
}

Tensor McaffModel::path_features(McaffPath p, const BatchInputs& in, Mode mode, Rng& rng) const {
  const auto i = static_cast<std::size_t>(p);
  if (!cfg_.enabled[i]) throw ConfigError(std::string("mcaff: path ") + to_string(p) + " is disabled");
  const std::size_t b = in.batch;
  Tensor x;
  switch (p) {
    case McaffPath::IQ: x = ops::reshape(in.iq, {b, 2 * kPatches, kFold, kFold}); break;
    case McaffPath::FFT: x = in.spectrogram; break;
    case McaffPath::CFO: x = ops::reshape(in.cfo, {b, kPatches, kFold, kFold}); break;
    case McaffPath::STFT: x = in.stft; break;
  }
  if (!x.defined()) throw ShapeError(std::string("mcaff: batch lacks input for path ") + to_string(p));
  Tensor h = ops::relu(stems_[i].conv1.forward(x, mode, rng));
  return ops::relu(stems_[i].conv2.forward(h, mode, rng));
}

Tensor McaffModel::fused(const BatchInputs& in, Mode mode, Rng& rng) const {
  std::vector<Tensor> slots;
  Tensor zeros;
  for (std::size_t i = 0; i < kMcaffPaths; ++i) {
    if (cfg_.enabled[i]) {
      slots.push_back(attention_.forward(path_features(static_cast<McaffPath>(i), in, mode, rng), mode, rng));
    } else {
      if (!zeros.defined()) zeros = Tensor::zeros({in.batch, cfg_.path_feature_dim, 8, 8});
      slots.push_back(zeros);
    }
  }
  return ops::concat(slots);
}

ModelOutput McaffModel::forward(const BatchInputs& in, Mode mode, Rng& rng) const {
  const Tensor x = fused(in, mode, rng);
  Tensor h = ops::relu(reduce_.forward(x, mode, rng));
  h = ops::relu(grouped_.forward(h, mode, rng));
  h = ops::relu(ops::add(expand_.forward(h, mode, rng), x));
  return heads_.forward(ops::global_avg_pool(h), cfg_.dropout_post_head, mode, rng);
}

std::vector<Tensor> McaffModel::parameters() const {
  std::vector<Tensor> p;
  auto take = [&](const Layer& l) {
    for (const auto& t : l.parameters()) p.push_back(t);
  };
  for (std::size_t i = 0; i < kMcaffPaths; ++i) {
    if (!cfg_.enabled[i]) continue;
    take(stems_[i].conv1);
    take(stems_[i].conv2);
  }
  for (const auto& t : attention_.parameters()) p.push_back(t);
  take(reduce_);
  take(grouped_);
  take(expand_);
  heads_.collect(p);
  return p;
}

std::size_t McaffModel::stem_parameter_count(McaffPath p) const {
  const auto i = static_cast<std::size_t>(p);
  if (!cfg_.enabled[i]) return 0;
  return stems_[i].conv1.parameter_count() + stems_[i].conv2.parameter_count();
}

}  // namespace jamloc::model
