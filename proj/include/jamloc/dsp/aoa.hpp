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
#include <string_view>
#include <vector>

#include "jamloc/dsp/spectral.hpp"

namespace jamloc::dsp {

inline constexpr std::size_t kAoaFeatures = 22;

// Names in output order. Amplitude-like quantities are expressed in dB.
const std::array<std::string_view, kAoaFeatures>& aoa_feature_names();

// Index of the first of the three phase-difference features.
inline constexpr std::size_t kPhaseFeatureBegin = 19;

struct AoaResult {
  std::vector<double> values;  // [4,22] row-major
  std::array<bool, kPatches> zero_energy{};
};

// Per-patch feature vectors; patch 0 is the phase reference.
//  temporal  0-5 : mean|x| dB, std|x| dB, skewness|x|, kurtosis|x|, RMS dB,
//                  zero-crossing rate of I (I taken in patch 0's peak-sample phase frame)
//  spectral  6-11: centroid, spread, flatness, 85% rolloff, peak frequency,
//                  normalised entropy (1024-bin power spectrum, cycles/sample)
//  energy   12-14: total energy dB, peak-to-average power ratio, central half-band fraction
//  envelope 15-18: envelope mean dB, std dB, max dB, crest factor
//  phase    19-21: circular mean and circular std of arg(x_k conj x_0),
//                  mean instantaneous-frequency difference to patch 0 (rad/sample)
// A zero-energy channel yields zeros for every non-phase feature.
AoaResult aoa_features(const Channels& channels);

}  // namespace jamloc::dsp
