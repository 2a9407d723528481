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

#include <complex>
#include <span>
#include <vector>

namespace jamloc::dsp {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

// Unnormalized forward DFT, X[k] = sum_n x[n] exp(-j 2 pi k n / N).
// Iterative radix-2; throws DomainError unless N is a power of two.
std::vector<Complex> fft(std::span<const Complex> x);

// Inverse of fft() including the 1/N factor.
std::vector<Complex> ifft(std::span<const Complex> x);

// O(N^2) evaluation of the DFT definition, any N.
std::vector<Complex> naive_dft(std::span<const Complex> x);

// Rotates so that bin N/2 (the most negative frequency) comes first.
template <typename T>
std::vector<T> fftshift(std::span<const T> x) {
  const std::size_t n = x.size();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[(i + n / 2) % n];
  return out;
}

}  // namespace jamloc::dsp
