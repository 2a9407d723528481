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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jamloc/dsp/aoa.hpp"
#include "jamloc/dsp/spectral.hpp"
#include "jamloc/sim/snapshot.hpp"

namespace jamloc::dsp {

// Representation selectors for extract_features().
enum FeatureSet : unsigned {
  kSpectrogram = 1u << 0,
  kIq = 1u << 1,
  kAoa = 1u << 2,
  kCfo = 1u << 3,
  kStft = 1u << 4,
  kAllFeatures = 0x1f,
};

inline constexpr std::size_t kSnapshotLen = 1024;
inline constexpr std::size_t kSpecSide = 32;
inline constexpr std::size_t kStftWindow = 128;
inline constexpr std::size_t kStftHop = 64;
inline constexpr std::size_t kStftFrames = (kSnapshotLen - kStftWindow) / kStftHop + 1;

// Derived representations of one snapshot, stored at f32. `iq`, `aoa` and
// `cfo` are raw; they are standardized at model-input time with statistics
// fitted on the training split. `spectrogram` and `stft` are already mapped
// onto [0,1] by the fixed dB clamp constants.
struct FeatureBundle {
  unsigned sets = 0;
  std::vector<float> spectrogram;  // [4,32,32]
  std::vector<float> iq;           // [8,1024], rows: patch0 I, patch0 Q, patch1 I, ...
  std::vector<float> aoa;          // [4,22]
  std::vector<float> cfo;          // [4,1024]
  std::vector<float> stft;         // [4,128,15]
  Label label;
  std::string scenario_tag;
};

struct NormalizationSpec {
  double spec_min = kSpecMinDb;
  double spec_max = kSpecMaxDb;
  std::array<double, 2 * kPatches> iq_mean{};
  std::array<double, 2 * kPatches> iq_std{};
  std::vector<double> aoa_mean;  // [4*22]
  std::vector<double> aoa_std;   // [4*22]
  std::array<double, kPatches> cfo_mean{};
  std::array<double, kPatches> cfo_std{};
  bool fitted = false;

  nlohmann::json to_json() const;
  static NormalizationSpec from_json(const nlohmann::json& j);
};

FeatureBundle extract_features(const IQSnapshot& snapshot, unsigned sets = kAllFeatures,
                               double spec_min = kSpecMinDb, double spec_max = kSpecMaxDb);

// Fits per-(patch, I/Q) IQ statistics, per-(patch, feature) AoA statistics and
// per-patch CFO statistics. Throws DomainError when an IQ channel is constant.
// AoA/CFO entries with zero spread (e.g. the self-referenced phase features of
// patch 0) are left unscaled.
NormalizationSpec fit_normalization(std::span<const FeatureBundle> train);

// Raw IQ planes [8,1024] of a snapshot.
std::vector<double> iq_planes(const IQSnapshot& snapshot);

// (value - mean) / std per (patch, I/Q) channel; returns [8, N].
std::vector<double> normalize_iq(const IQSnapshot& snapshot, const NormalizationSpec& norm);
std::vector<double> normalize_iq(std::span<const double> planes, const NormalizationSpec& norm);

// Population mean and standard deviation.
std::pair<double, double> mean_std(std::span<const double> v);

}  // namespace jamloc::dsp
