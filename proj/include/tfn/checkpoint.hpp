// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tfn/model.hpp"

namespace tfn::model {

// Checkpoint layout (all integers little-endian):
//   "TFNM" | u8 version = 1 | u8 variant tag
//   per tensor, in tensors() order: u32 rank | u32 dims[rank] | f64 values
//   u64 FNV-1a of every preceding byte
//
// Dropout probability and the init seed are training-time settings and are
// not stored; loaded parameters carry the defaults.
inline constexpr std::uint8_t kCheckpointVersion = 0x01;

std::vector<std::uint8_t> encode_params(const ModelParams& params);
// Throws FormatError (UnsupportedVersionError for the version byte) naming
// the offending field. Nothing is returned on failure.
ModelParams decode_params(std::span<const std::uint8_t> bytes);

void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace tfn::model
