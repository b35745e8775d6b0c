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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "garmentkit/geometry.hpp"

namespace garmentkit {

/// Coordinate frame a mesh's vertices are expressed in. Task-frame meshes use
/// native length units; canonical-frame meshes use normalized coordinates.
enum class Frame { task, canonical };

/// Indexed triangle surface with optional per-vertex canonical labels.
///
/// Invariants (checked by check_invariants and on every load/save):
///  - every triangle index lies in [0, vertices.size())
///  - no triangle repeats a vertex
///  - nocs_labels, when present, has one entry per vertex, each in [0,1]^3
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  Frame frame = Frame::task;
  std::optional<std::vector<Vec3>> nocs_labels;

  Aabb bounds() const { return bounds_of(vertices); }
  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

void check_invariants(const TriMesh& mesh);

/// Point cloud with optional per-point channels. Channels present must have
/// one entry per point; features are stored row-major with feature_dim
/// columns.
struct PointCloud {
  std::vector<Vec3> points;
  std::optional<std::vector<Vec3>> colors;
  std::optional<std::vector<Vec3>> nocs;
  std::optional<std::vector<Vec3>> confidence;
  std::optional<std::vector<float>> features;
  int feature_dim = 0;

  std::size_t size() const { return points.size(); }
};

void check_invariants(const PointCloud& cloud);

enum class MeshFormat { obj, ply };

/// Picks the format from the file extension (.obj / .ply, case-insensitive).
MeshFormat format_from_extension(const std::filesystem::path& path);

/// Loads an OBJ (positions and triangular faces) or PLY mesh. PLY vertex
/// properties nocs_x/nocs_y/nocs_z populate nocs_labels. Throws ParseError or
/// InvariantError with line/offset context.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);

/// Canonical serialization: save -> load -> save is byte-identical. OBJ
/// cannot carry labels; saving a labeled mesh as OBJ throws InvariantError.
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format);
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);

/// PLY with properties x,y,z[,red,green,blue][,nocs_*][,conf_*][,feat_0..].
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path);

struct ValidationReport {
  std::size_t degenerate_triangle_count = 0;
  std::size_t duplicate_vertex_count = 0;
  bool is_watertight = false;
  Aabb bbox;
};

inline constexpr double kDefaultAreaEpsilon = 1e-10;

/// Reports mesh health without modifying or rejecting it.
///
/// A triangle is degenerate when its area is below area_epsilon. A vertex is
/// a duplicate when an earlier vertex has the identical position. The mesh is
/// watertight when it has triangles and every directed edge (a,b) occurs once
/// and is matched by exactly one opposite edge (b,a). An empty mesh reports a
/// zero bbox.
ValidationReport validate(const TriMesh& mesh, double area_epsilon = kDefaultAreaEpsilon);

}  // namespace garmentkit
