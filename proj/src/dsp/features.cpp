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

#include "jamloc/dsp/features.hpp"

#include <cmath>

#include "jamloc/error.hpp"

namespace jamloc::dsp {

namespace {

template <typename Src>
std::vector<float> to_f32(const Src& src) {
  return std::vector<float>(src.begin(), src.end());
}

// Running sums in double over f32 data.
struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double stddev() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - m * m));
  }
};

}  // namespace

std::pair<double, double> mean_std(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

nlohmann::json NormalizationSpec::to_json() const {
  return nlohmann::json{{"spec_min", spec_min}, {"spec_max", spec_max}, {"iq_mean", iq_mean},
                        {"iq_std", iq_std},     {"aoa_mean", aoa_mean}, {"aoa_std", aoa_std},
                        {"cfo_mean", cfo_mean}, {"cfo_std", cfo_std},   {"fitted", fitted}};
}

NormalizationSpec NormalizationSpec::from_json(const nlohmann::json& j) {
  NormalizationSpec n;
  n.spec_min = j.at("spec_min").get<double>();
  n.spec_max = j.at("spec_max").get<double>();
  n.iq_mean = j.at("iq_mean").get<std::array<double, 2 * kPatches>>();
  n.iq_std = j.at("iq_std").get<std::array<double, 2 * kPatches>>();
  n.aoa_mean = j.at("aoa_mean").get<std::vector<double>>();
  n.aoa_std = j.at("aoa_std").get<std::vector<double>>();
  n.cfo_mean = j.at("cfo_mean").get<std::array<double, kPatches>>();
  n.cfo_std = j.at("cfo_std").get<std::array<double, kPatches>>();
  n.fitted = j.at("fitted").get<bool>();
  return n;
}

std::vector<double> iq_planes(const IQSnapshot& snapshot) {
  const std::size_t n = snapshot.snapshot_len;
  std::vector<double> out(2 * kPatches * n);
  for (std::size_t k = 0; k < kPatches; ++k) {
    auto ch = snapshot.channel(k);
    for (std::size_t i = 0; i < n; ++i) {
      out[(2 * k) * n + i] = ch[i].real();
      out[(2 * k + 1) * n + i] = ch[i].imag();
    }
  }
  return out;
}

FeatureBundle extract_features(const IQSnapshot& snapshot, unsigned sets, double spec_min, double spec_max) {
  if (snapshot.snapshot_len != kSnapshotLen || snapshot.samples.size() != kPatches * kSnapshotLen) {
    throw ShapeError("extract_features: expected 4 x 1024 samples, got snapshot_len " +
                     std::to_string(snapshot.snapshot_len));
  }
  FeatureBundle b;
  b.sets = sets;
  b.label = snapshot.label;
  b.scenario_tag = snapshot.scenario_tag;
  const Channels ch = to_channels(snapshot);
  if (sets & kSpectrogram) b.spectrogram = to_f32(spectrogram(ch, spec_min, spec_max));
  if (sets & kIq) b.iq = to_f32(iq_planes(snapshot));
  if (sets & kAoa) b.aoa = to_f32(aoa_features(ch).values);
  if (sets & kCfo) {
    b.cfo.reserve(kPatches * kSnapshotLen);
    for (const auto& c : ch) {
      auto acc = cfo_accumulated(c);
      b.cfo.insert(b.cfo.end(), acc.begin(), acc.end());
    }
  }
  if (sets & kStft) {
    b.stft.reserve(kPatches * kStftWindow * kStftFrames);
    for (const auto& c : ch) {
      const auto s = stft(c, kStftWindow, kStftHop);
      for (double m : s.magnitude) {
        const double db = 10.0 * std::log10(m * m / static_cast<double>(kStftWindow) + kPowerFloor);
        b.stft.push_back(static_cast<float>(minmax_db(db, spec_min, spec_max)));
      }
    }
  }
  return b;
}

NormalizationSpec fit_normalization(std::span<const FeatureBundle> train) {
  if (train.empty()) throw DomainError("fit_normalization: empty training split");
  NormalizationSpec norm;
  const unsigned sets = train.front().sets;

  if (sets & kIq) {
    std::array<Moments, 2 * kPatches> m{};
    for (const auto& b : train) {
      for (std::size_t c = 0; c < 2 * kPatches; ++c) {
        for (std::size_t i = 0; i < kSnapshotLen; ++i) m[c].add(b.iq[c * kSnapshotLen + i]);
      }
    }
    for (std::size_t c = 0; c < 2 * kPatches; ++c) {
      norm.iq_mean[c] = m[c].mean();
      norm.iq_std[c] = m[c].stddev();
      if (!(norm.iq_std[c] > 0.0)) {
        throw DomainError("fit_normalization: IQ channel " + std::to_string(c) + " has zero variance");
      }
    }
  }
  if (sets & kAoa) {
    std::vector<Moments> m(kPatches * kAoaFeatures);
    for (const auto& b : train) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i].add(b.aoa[i]);
    }
    norm.aoa_mean.resize(m.size());
    norm.aoa_std.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      norm.aoa_mean[i] = m[i].mean();
      const double s = m[i].stddev();
      norm.aoa_std[i] = s > 1e-12 ? s : 1.0;
    }
  }
  if (sets & kCfo) {
    std::array<Moments, kPatches> m{};
    for (const auto& b : train) {
      for (std::size_t k = 0; k < kPatches; ++k) {
        for (std::size_t i = 0; i < kSnapshotLen; ++i) m[k].add(b.cfo[k * kSnapshotLen + i]);
      }
    }
    for (std::size_t k = 0; k < kPatches; ++k) {
      norm.cfo_mean[k] = m[k].mean();
      const double s = m[k].stddev();
      norm.cfo_std[k] = s > 1e-12 ? s : 1.0;
    }
  }
  norm.fitted = true;
  return norm;
}

std::vector<double> normalize_iq(std::span<const double> planes, const NormalizationSpec& norm) {
  if (planes.size() % (2 * kPatches)) throw ShapeError("normalize_iq: expected 8 equal planes");
  const std::size_t n = planes.size() / (2 * kPatches);
  std::vector<double> out(planes.size());
  for (std::size_t c = 0; c < 2 * kPatches; ++c) {
    if (!(norm.iq_std[c] > 0.0)) throw DomainError("normalize_iq: std of channel " + std::to_string(c) + " is zero");
    for (std::size_t i = 0; i < n; ++i) out[c * n + i] = (planes[c * n + i] - norm.iq_mean[c]) / norm.iq_std[c];
  }
  return out;
}

std::vector<double> normalize_iq(const IQSnapshot& snapshot, const NormalizationSpec& norm) {
  return normalize_iq(iq_planes(snapshot), norm);
}

}  // namespace jamloc::dsp
