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

#include <filesystem>
#include <string>

#include "garmentkit/feature_scatter.hpp"
#include "garmentkit/field_volume.hpp"

// VOLB container: one UTF-8 JSON header line terminated by '\n', followed by
// little-endian float32 payload.
//
//   scalar grids:    {"dims":[nx,ny,nz],"kind":"wnf|occ|tsdf|tdf",
//                     "origin":[x,y,z],"voxel_size":h[,"trunc":t]}
//                    payload nx*ny*nz floats, x-fastest
//   feature volumes: {"channels":C,"dims":[D,D,D],"kind":"feat",
//                     "origin":[o,o,o],"voxel_size":1/D}  with o = 0.5/D
//                    payload D^3*C floats, cell-major then channel
//
// Header keys are written in sorted order and doubles in shortest round-trip
// form, so write -> read -> write is byte-identical.
namespace garmentkit {

void write_volb(const ScalarGrid& grid, const std::filesystem::path& path);
ScalarGrid read_volb(const std::filesystem::path& path);

/// The occupancy mask is not stored; on read a cell counts as occupied when
/// any of its channels is nonzero.
void write_volb(const FeatureVolume& volume, const std::filesystem::path& path);
FeatureVolume read_feature_volb(const std::filesystem::path& path);

/// Header kind of a VOLB file ("wnf", "occ", "tsdf", "tdf" or "feat").
std::string peek_volb_kind(const std::filesystem::path& path);

}  // namespace garmentkit
