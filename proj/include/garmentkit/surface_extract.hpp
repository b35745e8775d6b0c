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
#include <vector>

#include "garmentkit/field_volume.hpp"
#include "garmentkit/mesh_io.hpp"

namespace garmentkit {

/// Marching cubes over the lattice of voxel centers with linear edge
/// interpolation. Vertices are shared between cells (one per crossed lattice
/// edge) and triangle normals point toward decreasing field values. Returns
/// an empty mesh, with a warning, when iso is outside the field's range.
TriMesh marching_cubes(const ScalarGrid& grid, double iso);

/// Extracted iso-surface with per-vertex gradient magnitude and the
/// surface/opening split: is_opening[v] == (grad_mag[v] < threshold).
struct LabeledMesh {
  TriMesh mesh;
  std::vector<float> grad_mag;
  std::vector<std::uint8_t> is_opening;
  double iso_level = 0.5;
  double threshold = 0.0;
  /// Vertices whose gradient stencil had to be pulled inside the grid hull.
  std::size_t clamped_vertices = 0;

  std::size_t opening_count() const;
};

inline constexpr double kDefaultIsoLevel = 0.5;
/// Default opening threshold in units of 1/h.
inline constexpr double kDefaultOpeningThreshold = 0.5;

/// Absolute gradient threshold for a threshold expressed in units of 1/h.
inline double opening_threshold(const GridSpec& spec, double per_voxel = kDefaultOpeningThreshold) {
  return per_voxel / spec.voxel_size;
}

/// Gradient magnitude per vertex, central differences with step h/2, so a
/// unit jump across one voxel reads as about 1/h. Vertices whose gradient is
/// below threshold (absolute, in field units per length) are openings.
LabeledMesh classify_openings(const TriMesh& surface, const ScalarGrid& grid, double threshold,
                              double iso_level = kDefaultIsoLevel);

/// Drops triangles whose three vertices are all openings, then drops
/// vertices no remaining triangle uses. Every surface vertex is kept.
TriMesh strip_openings(const LabeledMesh& labeled);

/// Number of closed loops formed by edges used by exactly one triangle.
std::size_t count_boundary_loops(const TriMesh& mesh);

/// PLY with extra vertex properties grad_mag (float) and is_opening (uchar).
void save_labeled_mesh(const LabeledMesh& labeled, const std::filesystem::path& path);
LabeledMesh load_labeled_mesh(const std::filesystem::path& path);

}  // namespace garmentkit
