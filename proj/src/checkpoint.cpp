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

#include "tfn/checkpoint.hpp"

#include <string>

#include "tfn/binary_io.hpp"
#include "tfn/error.hpp"

namespace tfn::model {

namespace {

constexpr std::string_view kMagic = "TFNM";

struct RawTensor {
  std::vector<std::uint32_t> dims;
  std::vector<double> values;
};

RawTensor read_tensor(io::ByteReader& in, std::size_t index,
                      std::uint32_t expected_rank) {
  const std::string field = "tensor " + std::to_string(index);
  RawTensor t;
  const std::uint32_t rank = in.u32(field + " rank");
  if (rank != expected_rank) {
    throw FormatError(field + " rank: expected " +
                      std::to_string(expected_rank) + ", found " +
                      std::to_string(rank));
  }
  std::uint64_t count = 1;
  for (std::uint32_t d = 0; d < rank; ++d) {
    t.dims.push_back(in.u32(field + " shape"));
    count *= t.dims.back();
  }
  if (count == 0 || count * 8 > in.remaining()) {
    throw FormatError(field + " shape: " + std::to_string(count) +
                      " values do not fit in the file");
  }
  t.values.resize(count);
  for (double& v : t.values) v = in.f64(field + " values");
  return t;
}

}  // namespace

std::vector<std::uint8_t> encode_params(const ModelParams& params) {
  validate(params);
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u8(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(params.variant));
  for (const auto& t : tensors(params)) {
    w.u32(static_cast<std::uint32_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) w.u32(d);
    for (double v : t.values) w.f64(v);
  }
  w.checksum();
  return w.buffer();
}

ModelParams decode_params(std::span<const std::uint8_t> bytes) {
  io::ByteReader header(bytes);
  if (header.bytes(4, "magic") != kMagic) {
    throw FormatError("magic: not a TFNM checkpoint");
  }
  const std::uint8_t version = header.u8("version");
  if (version != kCheckpointVersion) {
    throw UnsupportedVersionError("version: unsupported checkpoint version " +
                                  std::to_string(version));
  }
  const auto body = io::verify_checksum(bytes);
  io::ByteReader in(body);
  in.bytes(5, "header");
  const auto variant = variant_from_tag(in.u8("variant tag"));
  if (!variant) throw FormatError("variant tag: unknown value");

  // Tensor count and ranks follow from the variant alone.
  const std::size_t embeds =
      (uses_video_embed(*variant) ? 1 : 0) + (uses_audio_embed(*variant) ? 1 : 0);
  const std::size_t n_tensors = 4 * embeds + 6 * head_count(*variant);
  std::vector<RawTensor> raw;
  for (std::size_t i = 0; i < n_tensors; ++i) {
    raw.push_back(read_tensor(in, i, i % 2 == 0 ? 2 : 1));
  }
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after tensor " +
                      std::to_string(n_tensors - 1));
  }

  Dims dims;
  std::size_t next = 0;
  if (uses_video_embed(*variant)) {
    dims.input = raw[0].dims[1];
    dims.hidden = raw[0].dims[0];
    dims.video_out = raw[2].dims[0];
    next += 4;
  }
  if (uses_audio_embed(*variant)) {
    dims.input = raw[next].dims[1];
    dims.hidden = raw[next].dims[0];
    dims.audio_out = raw[next + 2].dims[0];
    next += 4;
  }
  if (*variant == Variant::kEarlyFusionNoEmbed) {
    dims.input = raw[next].dims[1] / 2;
  }
  dims.head_hidden = raw[next].dims[0];

  ModelParams params = init_params(*variant, 0, dims);
  auto refs = tensors(params);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].dims != raw[i].dims) {
      throw FormatError("tensor " + std::to_string(i) + " (" + refs[i].name +
                        ") shape is inconsistent with the variant layout");
    }
    std::copy(raw[i].values.begin(), raw[i].values.end(),
              refs[i].values.begin());
  }
  return params;
}

void save_params(const ModelParams& params, const std::filesystem::path& path) {
  io::write_file(path, encode_params(params));
}

ModelParams load_params(const std::filesystem::path& path) {
  return decode_params(io::read_file(path));
}

}  // namespace tfn::model
