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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "garmentkit/geometry.hpp"
#include "garmentkit/mesh_io.hpp"

namespace garmentkit {

inline constexpr int kDefaultFeatureDims = 32;
inline constexpr int kDefaultBackboneDim = 128;
/// Leading channels: task xyz, nocs xyz, confidence xyz.
inline constexpr int kGeometryChannels = 9;

/// Per-point rows ready for scattering. Row layout:
/// [task xyz | nocs xyz | confidence xyz | backbone features].
struct ScatterInput {
  std::vector<Vec3> nocs;
  std::vector<float> rows;
  int channels = kGeometryChannels;

  std::size_t size() const { return nocs.size(); }
  std::span<const float> row(std::size_t i) const {
    return {rows.data() + i * channels, static_cast<std::size_t>(channels)};
  }
};

/// Concatenates the cloud's channels into ScatterInput rows. Requires the
/// nocs and confidence channels; backbone features are optional (C = 9 + F).
/// Throws InvariantError on missing or inconsistent channels, or when a nocs
/// or confidence value lies outside [0,1].
ScatterInput assemble_features(const PointCloud& cloud);

/// Dense D^3 x C volume over the unit cube, cell-major then channel, cells
/// x-fastest. Cell (i,j,k) is centered at ((i,j,k) + 0.5) / D.
struct FeatureVolume {
  int dims = kDefaultFeatureDims;
  int channels = 0;
  std::vector<float> data;
  /// One flag per cell: at least one point was scattered into it.
  std::vector<std::uint8_t> occupancy_mask;

  std::size_t cell_count() const { return static_cast<std::size_t>(dims) * dims * dims; }
  std::size_t cell_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims) * (j + static_cast<std::size_t>(dims) * k);
  }
  std::span<const float> cell(std::size_t c) const {
    return {data.data() + c * channels, static_cast<std::size_t>(channels)};
  }
};

/// Copies each row into the cell bin_coord(nocs, D) and reduces rows that
/// share a cell with a channel-wise maximum. Untouched cells stay zero. The
/// result is bitwise independent of point order and worker count.
FeatureVolume scatter_max(const ScatterInput& input, int dims = kDefaultFeatureDims);

/// Per-channel trilinear blend of the eight surrounding cell centers; q is
/// clamped to the hull of cell centers.
std::vector<float> gather_trilinear(const FeatureVolume& volume, const Vec3& q);

/// Channel-wise max with a total order on signed zeros (+0 beats -0), so
/// reductions are independent of operand order. NaN operands are ignored.
inline float channel_max(float a, float b) {
  if (b != b) return a;
  if (a != a) return b;
  if (b > a) return b;
  if (b == a && std::signbit(a) && !std::signbit(b)) return b;
  return a;
}

}  // namespace garmentkit
