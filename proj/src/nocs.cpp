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
#include "garmentkit/nocs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace garmentkit {

NocsTransform fit_category_transform(std::span<const TriMesh> meshes,
                                     const std::string& category_id) {
  if (meshes.empty()) throw InvariantError("fit_category_transform: no meshes given");
  Aabb box;
  for (const TriMesh& m : meshes) box.extend(m.bounds());
  if (box.empty()) throw InvariantError("fit_category_transform: meshes have no vertices");
  const Vec3 extent = box.extent();
  const double largest = extent.maxCoeff();
  if (!(largest > 0.0))
    throw InvariantError("fit_category_transform: bounding box has zero extent");

  NocsTransform t;
  t.category_id = category_id;
  t.scale = 1.0 / largest;
  // Center the shorter axes: scaled box [0, e/L] shifted by (1 - e/L) / 2.
  const Vec3 offset = 0.5 * (Vec3::Ones() - extent * t.scale);
  t.translation = offset - box.min * t.scale;
  return t;
}

TriMesh apply_nocs(const NocsTransform& t, const TriMesh& mesh) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = to_nocs(t, v);
  out.frame = Frame::canonical;
  return out;
}

std::string to_json(const NocsTransform& t) {
  nlohmann::json j;
  j["category_id"] = t.category_id;
  j["scale"] = t.scale;
  j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  return j.dump(2);
}

NocsTransform nocs_transform_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("NOCS transform JSON: ") + e.what());
  }
  NocsTransform t;
  try {
    t.category_id = j.at("category_id").get<std::string>();
    t.scale = j.at("scale").get<double>();
    const auto& tr = j.at("translation");
    if (!tr.is_array() || tr.size() != 3) throw ParseError("translation must have 3 entries");
    t.translation = Vec3(tr[0].get<double>(), tr[1].get<double>(), tr[2].get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("NOCS transform JSON: ") + e.what());
  }
  if (!(t.scale > 0.0)) throw InvariantError("NOCS transform scale must be positive");
  return t;
}

void save_nocs_transform(const NocsTransform& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << to_json(t) << "\n";
  if (!f) throw IoError("write failed: " + path.string());
}

NocsTransform load_nocs_transform(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return nocs_transform_from_json(ss.str());
}

BinnedCoord bin_coord(const Vec3& p, int bins) {
  if (bins < 2) throw InvariantError("bin_coord: bins must be >= 2");
  BinnedCoord b;
  b.bins = bins;
  for (int a = 0; a < 3; ++a) {
    const double c = std::clamp(p[a], 0.0, 1.0);
    const auto i = static_cast<int>(std::floor(c * bins));
    b.index[a] = std::min(i, bins - 1);
  }
  return b;
}

Vec3 unbin_coord(const BinnedCoord& b) {
  const double n = b.bins;
  return Vec3((b.index[0] + 0.5) / n, (b.index[1] + 0.5) / n, (b.index[2] + 0.5) / n);
}

Axis parse_axis(const std::string& name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  throw InvariantError("unknown axis '" + name + "' (expected x, y or z)");
}

}  // namespace garmentkit
