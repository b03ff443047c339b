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

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "tfn/binary_io.hpp"
#include "tfn/data.hpp"
#include "tfn/error.hpp"

namespace tfn::data {

namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "TFND";
constexpr std::uint8_t kVersion = 0x01;

std::vector<std::uint8_t> encode_binary(const Dataset& ds) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(ds.records.size()));
  for (const auto& r : ds.records) {
    if (r.id.size() > 0xFFFF) {
      throw InputError("record id longer than 65535 bytes: " + r.id.substr(0, 32));
    }
    w.u16(static_cast<std::uint16_t>(r.id.size()));
    w.bytes(r.id);
    for (double v : r.video.values()) w.f64(v);
    for (double v : r.audio.values()) w.f64(v);
    w.u8(static_cast<std::uint8_t>(r.label));
  }
  w.checksum();
  return w.buffer();
}

Dataset decode_binary(std::span<const std::uint8_t> data) {
  io::ByteReader header(data);
  if (header.bytes(4, "magic") != kMagic) {
    throw FormatError("bad magic: not a TFND dataset file");
  }
  const std::uint8_t version = header.u8("version");
  if (version != kVersion) {
    throw UnsupportedVersionError("unsupported dataset version " +
                                  std::to_string(version));
  }
  io::ByteReader in(io::verify_checksum(data));
  in.bytes(5, "header");
  const std::uint32_t count = in.u32("record count");
  Dataset ds;
  ds.provenance = "binary import";
  ds.records.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    const std::string field = "record " + std::to_string(n);
    FeatureRecord r;
    const std::uint16_t id_len = in.u16(field + " id length");
    r.id = in.bytes(id_len, field + " id");
    r.video = Vector(kFeatureDim);
    r.audio = Vector(kFeatureDim);
    for (double& v : r.video.values()) v = in.f64(field + " video");
    for (double& v : r.audio.values()) v = in.f64(field + " audio");
    const std::uint8_t label = in.u8(field + " label");
    if (label > 1) throw FormatError(field + ": label byte must be 0 or 1");
    r.label = label;
    ds.records.push_back(std::move(r));
  }
  if (in.remaining() != 0) {
    throw FormatError("trailing bytes after record " + std::to_string(count));
  }
  return ds;
}

Vector feature_array(const json& j, const char* field, std::size_t expected) {
  if (!j.contains(field)) {
    throw FormatError(std::string("missing field \"") + field + "\"");
  }
  const json& arr = j.at(field);
  if (!arr.is_array()) {
    throw FormatError(std::string("field \"") + field + "\" must be an array");
  }
  if (expected && arr.size() != expected) {
    throw DimensionError(std::string("field \"") + field + "\" has " +
                         std::to_string(arr.size()) + " values, expected " +
                         std::to_string(expected));
  }
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw FormatError(std::string("field \"") + field + "\" entry " +
                        std::to_string(i) + " is not a number");
    }
    v[i] = arr[i].get<double>();
  }
  if (!v.all_finite()) {
    throw FormatError(std::string("field \"") + field + "\" has non-finite values");
  }
  return v;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "binary") return Format::kBinary;
  if (name == "jsonl") return Format::kJsonl;
  throw ConfigurationError("unknown dataset format '" + name +
                           "'; expected binary or jsonl");
}

std::string record_to_json(const FeatureRecord& r) {
  json j;
  j["id"] = r.id;
  j["video"] = r.video.raw();
  j["audio"] = r.audio.raw();
  j["label"] = r.label;
  return j.dump();
}

FeatureRecord record_from_json(const std::string& line,
                               std::size_t expected_dim) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("record must be a JSON object");
  FeatureRecord r;
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw FormatError("missing field \"id\"");
  }
  r.id = j.at("id").get<std::string>();
  r.video = feature_array(j, "video", expected_dim);
  r.audio = feature_array(j, "audio", expected_dim);
  if (!j.contains("label")) throw FormatError("missing field \"label\"");
  const json& label = j.at("label");
  if (!label.is_number_integer() || (label.get<int>() != 0 && label.get<int>() != 1)) {
    throw FormatError("field \"label\" must be 0 or 1");
  }
  r.label = label.get<int>();
  return r;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path,
                  Format format) {
  validate(ds);
  if (format == Format::kBinary) {
    io::write_file(path, encode_binary(ds));
    return;
  }
  std::ostringstream out;
  for (const auto& r : ds.records) out << record_to_json(r) << '\n';
  io::write_text(path, out.str());
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  Dataset ds;
  if (bytes.size() >= 4 &&
      std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) == kMagic) {
    ds = decode_binary(bytes);
  } else {
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        ds.records.push_back(record_from_json(line));
      } catch (const Error& e) {
        throw FormatError("line " + std::to_string(line_no) + " (record " +
                          std::to_string(ds.records.size()) + "): " + e.what());
      }
    }
    ds.provenance = "jsonl import";
  }
  ds.provenance += " from " + path.string();
  validate(ds);
  return ds;
}

}  // namespace tfn::data
