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
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "garmentkit/geometry.hpp"
#include "garmentkit/mesh_io.hpp"
#include "garmentkit/winding.hpp"

namespace garmentkit {

/// Regular isotropic grid. Values live at voxel centers; origin is the center
/// of voxel (0,0,0) and voxel (i,j,k) is centered at origin + h * (i,j,k).
struct GridSpec {
  std::array<int, 3> dims{2, 2, 2};
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) +
                                                static_cast<std::size_t>(dims[1]) * k);
  }
  Vec3 center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i, j, k);
  }
  /// Union of all voxel cubes.
  Aabb cell_bounds() const {
    const Vec3 half = Vec3::Constant(0.5 * voxel_size);
    return {origin - half, center(dims[0] - 1, dims[1] - 1, dims[2] - 1) + half};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws InvariantError unless dims >= 2 per axis and voxel_size > 0.
void check_grid_spec(const GridSpec& spec);

inline constexpr int kDefaultFieldDims = 128;
inline constexpr int kDefaultOccupancyDims = 64;
inline constexpr int kDefaultGridMargin = 4;

/// Cubic grid of dims^3 voxels whose voxel cubes cover box's largest axis
/// with margin voxels on each side, centered on the box.
GridSpec grid_for_bounds(const Aabb& box, int dims = kDefaultFieldDims,
                         int margin = kDefaultGridMargin);

/// grid_for_bounds over [0,1]^3: for 128^3, h = 1/120 and origin = -3.5h.
GridSpec canonical_grid(int dims = kDefaultFieldDims, int margin = kDefaultGridMargin);

enum class FieldKind { wnf, occupancy, tsdf, tdf };

std::string to_string(FieldKind kind);
FieldKind parse_field_kind(const std::string& name);

struct ScalarGrid {
  GridSpec spec;
  FieldKind kind = FieldKind::wnf;
  /// x-fastest, one value per voxel.
  std::vector<float> data;
  /// Truncation distance, tsdf and tdf only.
  std::optional<double> trunc;

  float at(int i, int j, int k) const { return data[spec.index(i, j, k)]; }
  float& at(int i, int j, int k) { return data[spec.index(i, j, k)]; }
};

/// Checks data length and the per-kind value ranges.
void check_invariants(const ScalarGrid& grid);

/// Winding number at every voxel center. Warns (does not fail) when the grid
/// leaves less than one voxel of margin around the mesh.
ScalarGrid rasterize_wnf(const TriMesh& mesh, const GridSpec& spec, const WindingAccel& accel,
                         const WindingQueryParams& params = {});

/// 1 where a triangle overlaps the voxel cube (separating-axis test), else 0.
ScalarGrid rasterize_occupancy(const TriMesh& mesh, const GridSpec& spec);

/// Default truncation band: 10 voxels.
inline double default_trunc(const GridSpec& spec) { return 10.0 * spec.voxel_size; }

/// sign * min(distance, trunc), negative where winding > 0.5.
ScalarGrid rasterize_tsdf(const TriMesh& mesh, const GridSpec& spec, double trunc,
                          const WindingAccel& accel, const WindingQueryParams& params = {});

/// min(distance, trunc).
ScalarGrid rasterize_tdf(const TriMesh& mesh, const GridSpec& spec, double trunc,
                         const WindingAccel& accel);
ScalarGrid rasterize_tdf(const TriMesh& mesh, const GridSpec& spec, double trunc);

/// Fraction of voxels with a nonzero value.
double occupancy_rate(const ScalarGrid& grid);

/// True when p lies between the first and last voxel centers on every axis.
bool in_sampling_hull(const GridSpec& spec, const Vec3& p);

/// Trilinear blend of the eight surrounding voxel centers. Exact at voxel
/// centers. Throws OutOfRangeError outside the sampling hull.
double trilinear_sample(const ScalarGrid& grid, const Vec3& p);

/// Central differences of trilinear_sample: (f(p + s e_a) - f(p - s e_a)) / 2s
/// with s = step, or the voxel size when step <= 0.
Vec3 gradient(const ScalarGrid& grid, const Vec3& p, double step = 0.0);

/// Splits the grid into parts[0] * parts[1] * parts[2] equal blocks, ordered
/// x-fastest by block position. Throws InvariantError if a dimension is not
/// divisible.
std::vector<ScalarGrid> slice_volume(const ScalarGrid& grid, std::array<int, 3> parts = {2, 2, 2});

/// Inverse of slice_volume; merge_volume(slice_volume(g)) == g bitwise.
ScalarGrid merge_volume(const std::vector<ScalarGrid>& blocks, std::array<int, 3> parts = {2, 2, 2});

/// Separating-axis overlap test of triangle (a,b,c) and the axis-aligned box
/// center +- half. Touching counts as overlap.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c);

}  // namespace garmentkit
