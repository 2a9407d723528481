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

#include "jamloc/dsp/aoa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "jamloc/error.hpp"

namespace jamloc::dsp {

namespace {

constexpr double kTiny = 1e-30;

double db_amp(double a) { return 20.0 * std::log10(a + kTiny); }
double db_pow(double p) { return 10.0 * std::log10(p + kTiny); }

double wrap_pi(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

void amplitude_features(std::span<const Complex> x, double ref_phase, double* f) {
  const double n = static_cast<double>(x.size());
  std::vector<double> mag(x.size());
  double sum = 0.0, sum_sq = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mag[i] = std::abs(x[i]);
    sum += mag[i];
    sum_sq += mag[i] * mag[i];
    peak = std::max(peak, mag[i]);
  }
  const double m = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double a : mag) {
    const double d = a - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sd = std::sqrt(m2);
  const double mean_power = sum_sq / n;
  const double rms = std::sqrt(mean_power);

  const Complex derot = std::polar(1.0, -ref_phase);
  std::size_t crossings = 0;
  double prev = (x[0] * derot).real();
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double cur = (x[i] * derot).real();
    if ((prev < 0.0) != (cur < 0.0)) ++crossings;
    prev = cur;
  }

  f[0] = db_amp(m);
  f[1] = db_amp(sd);
  f[2] = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
  f[3] = sd > 0.0 ? m4 / (m2 * m2) : 0.0;
  f[4] = db_amp(rms);
  f[5] = static_cast<double>(crossings) / (n - 1.0);

  f[12] = db_pow(sum_sq);
  f[13] = mean_power > 0.0 ? peak * peak / mean_power : 0.0;

  f[15] = db_amp(m);
  f[16] = db_amp(sd);
  f[17] = db_amp(peak);
  f[18] = rms > 0.0 ? peak / rms : 0.0;
}

void spectral_features(std::span<const Complex> x, double* f) {
  const std::size_t n = x.size();
  // Power spectrum zero-padded or truncated to 1024 bins, shifted to [-0.5, 0.5).
  std::vector<Complex> buf(1024, Complex(0.0, 0.0));
  std::copy_n(x.begin(), std::min<std::size_t>(n, 1024), buf.begin());
  const auto spec = fft(buf);
  const std::size_t bins = spec.size();
  std::vector<double> power(bins);
  for (std::size_t i = 0; i < bins; ++i) power[i] = std::norm(spec[(i + bins / 2) % bins]);
  auto freq = [bins](std::size_t i) {
    return (static_cast<double>(i) - static_cast<double>(bins / 2)) / static_cast<double>(bins);
  };
  double total = 0.0;
  for (double p : power) total += p;
  double centroid = 0.0;
  for (std::size_t i = 0; i < bins; ++i) centroid += freq(i) * power[i] / total;
  double spread = 0.0, log_sum = 0.0, entropy = 0.0, central = 0.0, cumulative = 0.0;
  double rolloff = freq(bins - 1);
  bool rolled = false;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double p = power[i] / total;
    const double d = freq(i) - centroid;
    spread += d * d * p;
    log_sum += std::log(power[i] + kTiny);
    if (p > 0.0) entropy -= p * std::log(p);
    if (std::abs(freq(i)) < 0.25) central += p;
    cumulative += p;
    if (!rolled && cumulative >= 0.85) {
      rolloff = freq(i);
      rolled = true;
    }
    if (power[i] > power[peak]) peak = i;
  }
  const double arith = total / static_cast<double>(bins);
  f[6] = centroid;
  f[7] = std::sqrt(spread);
  f[8] = std::exp(log_sum / static_cast<double>(bins)) / arith;
  f[9] = rolloff;
  f[10] = freq(peak);
  f[11] = entropy / std::log(static_cast<double>(bins));
  f[14] = central;
}

void phase_features(std::span<const Complex> x, std::span<const Complex> ref, double* f) {
  Complex phasor_sum(0.0, 0.0);
  std::size_t used = 0;
  double if_diff = 0.0;
  std::size_t if_used = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Complex prod = x[i] * std::conj(ref[i]);
    if (std::abs(prod) > 0.0) {
      phasor_sum += prod / std::abs(prod);
      ++used;
    }
    if (i > 0) {
      const Complex a = x[i] * std::conj(x[i - 1]);
      const Complex b = ref[i] * std::conj(ref[i - 1]);
      if (std::abs(a) > 0.0 && std::abs(b) > 0.0) {
        if_diff += wrap_pi(std::arg(a) - std::arg(b));
        ++if_used;
      }
    }
  }
  if (used == 0) {
    f[19] = f[20] = 0.0;
  } else {
    const double r = std::min(1.0, std::abs(phasor_sum) / static_cast<double>(used));
    f[19] = r > 0.0 ? std::arg(phasor_sum) : 0.0;
    f[20] = std::sqrt(std::max(0.0, -2.0 * std::log(std::max(r, 1e-300))));
  }
  f[21] = if_used ? if_diff / static_cast<double>(if_used) : 0.0;
}

}  // namespace

const std::array<std::string_view, kAoaFeatures>& aoa_feature_names() {
  static const std::array<std::string_view, kAoaFeatures> names = {
      "mean_abs_db",  "std_abs_db",   "skewness_abs", "kurtosis_abs",  "rms_db",       "zero_crossing_rate",
      "centroid",     "spread",       "flatness",     "rolloff85",     "peak_freq",    "entropy",
      "energy_db",    "papr",         "center_fraction",
      "env_mean_db",  "env_std_db",   "env_max_db",   "crest_factor",
      "phase_mean",   "phase_std",    "inst_freq_diff"};
  return names;
}

AoaResult aoa_features(const Channels& channels) {
  const std::size_t n = channels[0].size();
  if (n < 2) throw ShapeError("aoa_features: need at least two samples per patch");
  for (const auto& ch : channels) {
    if (ch.size() != n) throw ShapeError("aoa_features: patches differ in length");
  }
  // Phase frame for the in-phase zero-crossing count: patch 0's strongest sample.
  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(channels[0][i]) > std::abs(channels[0][peak_idx])) peak_idx = i;
  }
  const double ref_phase = std::abs(channels[0][peak_idx]) > 0.0 ? std::arg(channels[0][peak_idx]) : 0.0;

  AoaResult r;
  r.values.assign(kPatches * kAoaFeatures, 0.0);
  for (std::size_t k = 0; k < kPatches; ++k) {
    double* f = r.values.data() + k * kAoaFeatures;
    double energy = 0.0;
    for (const auto& v : channels[k]) energy += std::norm(v);
    r.zero_energy[k] = energy == 0.0;
    if (r.zero_energy[k]) {
      spdlog::debug("aoa_features: patch {} has zero energy; amplitude and spectral features set to 0", k);
    } else {
      amplitude_features(channels[k], ref_phase, f);
      spectral_features(channels[k], f);
    }
    if (k > 0) phase_features(channels[k], channels[0], f);
  }
  return r;
}

}  // namespace jamloc::dsp
