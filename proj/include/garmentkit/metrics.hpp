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

#include <cstdint>
#include <span>
#include <vector>

#include "garmentkit/mesh_io.hpp"
#include "garmentkit/nocs.hpp"

namespace garmentkit {

inline constexpr int kDefaultSampleCount = 10000;

/// Area-weighted uniform samples; labels are interpolated barycentrically
/// into the cloud's nocs channel when the mesh carries them.
PointCloud sample_surface(const TriMesh& mesh, std::int64_t n, std::uint64_t seed);

struct ChamferResult {
  double accuracy_mean = 0.0;      ///< pred -> gt
  double completeness_mean = 0.0;  ///< gt -> pred
  double symmetric_mean = 0.0;
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Mean nearest-neighbor distance from each point of a to the set b.
double directed_chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

/// Symmetric Chamfer distance between n samples drawn from each mesh with
/// the same seed.
ChamferResult chamfer(const TriMesh& pred, const TriMesh& gt, std::int64_t n = kDefaultSampleCount,
                      std::uint64_t seed = 0);

/// Diagnostic variant: sample-to-surface distances instead of sample-to-sample.
ChamferResult chamfer_to_surface(const TriMesh& pred, const TriMesh& gt,
                                 std::int64_t n = kDefaultSampleCount, std::uint64_t seed = 0);

/// Mean 3D distance from each pred sample to the gt sample with the nearest
/// NOCS label (pred -> gt only). Both meshes must carry labels.
double correspondence_distance(const TriMesh& pred, const TriMesh& gt,
                               std::int64_t n = kDefaultSampleCount, std::uint64_t seed = 0);

/// Mean per-point L2 error in NOCS space. In symmetric mode the error
/// against the mirrored ground truth is also computed and the smaller
/// aggregate is returned.
double nocs_error(std::span<const Vec3> pred, std::span<const Vec3> gt, bool symmetric,
                  Axis mirror_axis = Axis::x);

/// NOCS label of the observed point nearest the origin (lowest index on ties).
Vec3 infer_grasp_nocs(const PointCloud& cloud);

struct AlignResult {
  double angle = 0.0;  ///< radians in (-pi, pi]
  TriMesh aligned;
  double objective = 0.0;
  std::vector<double> coarse_objectives;  ///< objective at 2*pi*k/steps
};

/// Rotation about +z through the origin minimizing the mean distance from
/// each observed point to its nearest rotated pred sample. Coarse grid of
/// coarse_steps angles, then golden-section search within one grid step of
/// the best, kept only when it strictly improves the objective.
AlignResult align_rotation_z(const TriMesh& pred, const PointCloud& observed, int coarse_steps = 72,
                             int refine_iters = 20, std::int64_t n = kDefaultSampleCount,
                             std::uint64_t seed = 0);

/// Rotation of a mesh about +z through the origin.
TriMesh rotate_z(const TriMesh& mesh, double angle);

}  // namespace garmentkit
