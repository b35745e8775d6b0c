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
#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>

#include "garmentkit/geometry.hpp"
#include "garmentkit/mesh_io.hpp"

namespace garmentkit {

/// Per-category uniform scale and translation into the unit cube.
struct NocsTransform {
  double scale = 1.0;
  Vec3 translation = Vec3::Zero();
  std::string category_id;
};

/// Fits the category transform from the joint bounding box of all meshes:
/// the largest box dimension spans [0,1] and the two other axes are centered
/// inside the cube. Throws InvariantError on empty input or a zero-extent box.
NocsTransform fit_category_transform(std::span<const TriMesh> meshes,
                                     const std::string& category_id = {});

inline Vec3 to_nocs(const NocsTransform& t, const Vec3& p) {
  return t.scale * p + t.translation;
}

inline Vec3 from_nocs(const NocsTransform& t, const Vec3& p) {
  return (p - t.translation) / t.scale;
}

/// Applies the transform to every vertex and tags the result canonical.
TriMesh apply_nocs(const NocsTransform& t, const TriMesh& mesh);

std::string to_json(const NocsTransform& t);
NocsTransform nocs_transform_from_json(const std::string& text);
void save_nocs_transform(const NocsTransform& t, const std::filesystem::path& path);
NocsTransform load_nocs_transform(const std::filesystem::path& path);

inline constexpr int kDefaultNocsBins = 64;

struct BinnedCoord {
  std::array<int, 3> index{0, 0, 0};
  int bins = kDefaultNocsBins;

  friend bool operator==(const BinnedCoord&, const BinnedCoord&) = default;
};

/// Per axis: min(floor(clamp(p, 0, 1) * bins), bins - 1). Throws
/// InvariantError when bins < 2.
BinnedCoord bin_coord(const Vec3& p, int bins = kDefaultNocsBins);

/// Bin center (i + 0.5) / bins per axis.
Vec3 unbin_coord(const BinnedCoord& b);

enum class Axis { x = 0, y = 1, z = 2 };

inline Vec3 mirror_nocs(const Vec3& p, Axis axis = Axis::x) {
  Vec3 out = p;
  out[static_cast<int>(axis)] = 1.0 - p[static_cast<int>(axis)];
  return out;
}

Axis parse_axis(const std::string& name);

}  // namespace garmentkit
