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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "jamloc/sim/snapshot.hpp"

namespace jamloc::io {

inline constexpr char kDatasetMagic[4] = {'G', 'J', 'L', 'D'};
inline constexpr std::uint16_t kDatasetVersion = 2;   // v2 appends a CRC32 per record
inline constexpr std::size_t kDatasetHeaderBytes = 22;

struct DatasetHeader {
  std::uint16_t version = kDatasetVersion;
  double sample_rate = 1e8;
  std::uint32_t snapshot_len = 1024;
  std::uint32_t n_snapshots = 0;
};

// Serialized size of one record (including the CRC when version >= 2).
std::size_t record_bytes(const IQSnapshot& s, std::uint16_t version);

// Throws ShapeError when records disagree on snapshot_len or hold the wrong
// sample count.
void write_dataset(std::span<const IQSnapshot> snapshots, const std::filesystem::path& path,
                   double sample_rate = 1e8, std::uint16_t version = kDatasetVersion);

std::vector<IQSnapshot> read_dataset(const std::filesystem::path& path, DatasetHeader* header = nullptr);

// Record-at-a-time reader.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& path);
  const DatasetHeader& header() const { return header_; }
  // Next record in file order, or nullopt after the last one.
  std::optional<IQSnapshot> next();

 private:
  std::ifstream in_;
  DatasetHeader header_;
  std::uint32_t read_ = 0;
};

std::uint32_t crc32_of(std::span<const unsigned char> bytes);

}  // namespace jamloc::io
