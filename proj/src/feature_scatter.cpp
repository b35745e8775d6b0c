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
#include "garmentkit/feature_scatter.hpp"

#include <algorithm>
#include <cmath>

#include "garmentkit/nocs.hpp"
#include "garmentkit/parallel.hpp"

namespace garmentkit {
namespace {

bool in_unit_cube(const Vec3& p) {
  return (p.array() >= 0.0).all() && (p.array() <= 1.0).all();
}

void scatter_range(const ScatterInput& input, int dims, std::size_t begin, std::size_t end,
                   std::vector<float>& data, std::vector<std::uint8_t>& mask) {
  const auto c = static_cast<std::size_t>(input.channels);
  for (std::size_t p = begin; p < end; ++p) {
    const BinnedCoord b = bin_coord(input.nocs[p], dims);
    const std::size_t cell = static_cast<std::size_t>(b.index[0]) +
                             static_cast<std::size_t>(dims) *
                                 (b.index[1] + static_cast<std::size_t>(dims) * b.index[2]);
    float* dst = data.data() + cell * c;
    const float* src = input.rows.data() + p * c;
    if (!mask[cell]) {
      std::copy(src, src + c, dst);
      mask[cell] = 1;
    } else {
      for (std::size_t k = 0; k < c; ++k) dst[k] = channel_max(dst[k], src[k]);
    }
  }
}

}  // namespace

ScatterInput assemble_features(const PointCloud& cloud) {
  check_invariants(cloud);
  if (!cloud.nocs) throw InvariantError("assemble_features: cloud has no nocs channel");
  if (!cloud.confidence)
    throw InvariantError("assemble_features: cloud has no confidence channel");
  const std::size_t n = cloud.size();
  const int f = cloud.features ? cloud.feature_dim : 0;

  ScatterInput in;
  in.channels = kGeometryChannels + f;
  in.nocs = *cloud.nocs;
  in.rows.resize(n * in.channels);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& nocs = (*cloud.nocs)[i];
    const Vec3& conf = (*cloud.confidence)[i];
    if (!in_unit_cube(nocs))
      throw InvariantError("assemble_features: point " + std::to_string(i) + " has nocs outside [0,1]^3");
    if (!in_unit_cube(conf))
      throw InvariantError("assemble_features: point " + std::to_string(i) +
                           " has confidence outside [0,1]");
    float* row = in.rows.data() + i * in.channels;
    for (int a = 0; a < 3; ++a) {
      row[a] = static_cast<float>(cloud.points[i][a]);
      row[3 + a] = static_cast<float>(nocs[a]);
      row[6 + a] = static_cast<float>(conf[a]);
    }
    if (f > 0)
      std::copy_n(cloud.features->data() + i * f, f, row + kGeometryChannels);
  }
  return in;
}

FeatureVolume scatter_max(const ScatterInput& input, int dims) {
  if (dims < 2) throw InvariantError("scatter_max: dims must be >= 2");
  if (input.channels < 0 || input.rows.size() != input.nocs.size() * input.channels)
    throw InvariantError("scatter_max: rows do not match point count x channels");

  FeatureVolume vol;
  vol.dims = dims;
  vol.channels = input.channels;
  vol.data.assign(vol.cell_count() * input.channels, 0.0f);
  vol.occupancy_mask.assign(vol.cell_count(), 0);

  const std::size_t n = input.size();
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  const std::size_t blocks = std::min(workers, std::max<std::size_t>(1, n / 4096));
  if (blocks <= 1) {
    scatter_range(input, dims, 0, n, vol.data, vol.occupancy_mask);
    return vol;
  }

  // Partial volumes per block, merged by max; max is order independent.
  std::vector<FeatureVolume> partial(blocks);
  parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      partial[b].data.assign(vol.data.size(), 0.0f);
      partial[b].occupancy_mask.assign(vol.cell_count(), 0);
      scatter_range(input, dims, n * b / blocks, n * (b + 1) / blocks, partial[b].data,
                    partial[b].occupancy_mask);
    }
  }, 1);
  const auto c = static_cast<std::size_t>(input.channels);
  for (const FeatureVolume& part : partial) {
    for (std::size_t cell = 0; cell < vol.cell_count(); ++cell) {
      if (!part.occupancy_mask[cell]) continue;
      float* dst = vol.data.data() + cell * c;
      const float* src = part.data.data() + cell * c;
      if (!vol.occupancy_mask[cell]) {
        std::copy(src, src + c, dst);
        vol.occupancy_mask[cell] = 1;
      } else {
        for (std::size_t k = 0; k < c; ++k) dst[k] = channel_max(dst[k], src[k]);
      }
    }
  }
  return vol;
}

std::vector<float> gather_trilinear(const FeatureVolume& volume, const Vec3& q) {
  const int d = volume.dims;
  int i0[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    double u = std::clamp(q[a] * d - 0.5, 0.0, static_cast<double>(d - 1));
    // Snap so cell centers reproduce stored values exactly.
    const double r = std::round(u);
    if (std::abs(u - r) < 1e-9) u = r;
    i0[a] = std::min(static_cast<int>(std::floor(u)), d - 2);
    t[a] = u - i0[a];
  }
  std::vector<double> acc(volume.channels, 0.0);
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1;
    const int dy = (corner >> 1) & 1;
    const int dz = (corner >> 2) & 1;
    const double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) * (dz ? t[2] : 1.0 - t[2]);
    if (w == 0.0) continue;
    const auto cell = volume.cell(volume.cell_index(i0[0] + dx, i0[1] + dy, i0[2] + dz));
    for (int k = 0; k < volume.channels; ++k) acc[k] += w * cell[k];
  }
  return std::vector<float>(acc.begin(), acc.end());
}

}  // namespace garmentkit
