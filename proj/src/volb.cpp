// Copyright 2026 The garmentkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "garmentkit/volb.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "VOLB I/O assumes a little-endian host");

namespace garmentkit {
namespace {

using nlohmann::json;

struct RawVolb {
  json header;
  std::string payload;
};

void write_raw(const std::filesystem::path& path, const json& header, const float* data,
               std::size_t count) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const std::string line = header.dump() + "\n";
  f.write(line.data(), static_cast<std::streamsize>(line.size()));
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
  if (!f) throw IoError("write failed: " + path.string());
}

RawVolb read_raw(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos) throw ParseError(path.string() + ": VOLB header line missing");
  RawVolb raw;
  try {
    raw.header = json::parse(bytes.substr(0, eol));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": VOLB header is not valid JSON: " + e.what());
  }
  raw.payload = bytes.substr(eol + 1);
  return raw;
}

std::vector<float> decode_payload(const std::filesystem::path& path, const std::string& payload,
                                  std::size_t count) {
  if (payload.size() != count * sizeof(float))
    throw ParseError(path.string() + ": VOLB payload has " + std::to_string(payload.size()) +
                     " bytes, header implies " + std::to_string(count * sizeof(float)));
  std::vector<float> data(count);
  if (count > 0) std::memcpy(data.data(), payload.data(), payload.size());
  return data;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <typename F>
auto header_field(const std::filesystem::path& path, F&& get) {
  try {
    return get();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": bad VOLB header: " + e.what());
  }
}

}  // namespace

void write_volb(const ScalarGrid& grid, const std::filesystem::path& path) {
  check_grid_spec(grid.spec);
  if (grid.data.size() != grid.spec.voxel_count())
    throw InvariantError("write_volb: grid data length does not match dims");
  json h;
  h["kind"] = to_string(grid.kind);
  h["dims"] = grid.spec.dims;
  h["origin"] = vec_json(grid.spec.origin);
  h["voxel_size"] = grid.spec.voxel_size;
  if (grid.trunc) h["trunc"] = *grid.trunc;
  write_raw(path, h, grid.data.data(), grid.data.size());
}

ScalarGrid read_volb(const std::filesystem::path& path) {
  RawVolb raw = read_raw(path);
  ScalarGrid g;
  header_field(path, [&] {
    const std::string kind = raw.header.at("kind").get<std::string>();
    if (kind == "feat") throw ParseError(path.string() + ": feature volume, not a scalar grid");
    g.kind = parse_field_kind(kind);
    g.spec.dims = raw.header.at("dims").get<std::array<int, 3>>();
    const auto o = raw.header.at("origin").get<std::array<double, 3>>();
    g.spec.origin = Vec3(o[0], o[1], o[2]);
    g.spec.voxel_size = raw.header.at("voxel_size").get<double>();
    if (raw.header.contains("trunc")) g.trunc = raw.header.at("trunc").get<double>();
    return 0;
  });
  check_grid_spec(g.spec);
  g.data = decode_payload(path, raw.payload, g.spec.voxel_count());
  return g;
}

void write_volb(const FeatureVolume& volume, const std::filesystem::path& path) {
  if (volume.data.size() != volume.cell_count() * static_cast<std::size_t>(volume.channels))
    throw InvariantError("write_volb: feature data length does not match dims x channels");
  json h;
  h["kind"] = "feat";
  h["dims"] = {volume.dims, volume.dims, volume.dims};
  h["channels"] = volume.channels;
  const double o = 0.5 / volume.dims;
  h["origin"] = {o, o, o};
  h["voxel_size"] = 1.0 / volume.dims;
  write_raw(path, h, volume.data.data(), volume.data.size());
}

FeatureVolume read_feature_volb(const std::filesystem::path& path) {
  RawVolb raw = read_raw(path);
  FeatureVolume v;
  header_field(path, [&] {
    if (raw.header.at("kind").get<std::string>() != "feat")
      throw ParseError(path.string() + ": not a feature volume");
    const auto dims = raw.header.at("dims").get<std::array<int, 3>>();
    if (dims[0] != dims[1] || dims[1] != dims[2])
      throw ParseError(path.string() + ": feature volumes must be cubic");
    v.dims = dims[0];
    v.channels = raw.header.at("channels").get<int>();
    return 0;
  });
  if (v.dims < 2 || v.channels < 0) throw ParseError(path.string() + ": bad feature volume header");
  v.data = decode_payload(path, raw.payload, v.cell_count() * v.channels);
  v.occupancy_mask.assign(v.cell_count(), 0);
  for (std::size_t c = 0; c < v.cell_count(); ++c) {
    const auto cell = v.cell(c);
    v.occupancy_mask[c] = std::any_of(cell.begin(), cell.end(), [](float x) { return x != 0.0f; });
  }
  return v;
}

std::string peek_volb_kind(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(f, line);
  return header_field(path, [&] { return json::parse(line).at("kind").get<std::string>(); });
}

}  // namespace garmentkit
