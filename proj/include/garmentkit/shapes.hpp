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

#include "garmentkit/mesh_io.hpp"

// Procedural meshes used by the tests, the acceptance suite and the CLI demo
// inputs. All closed shapes are oriented with outward normals.
namespace garmentkit::shapes {

/// Axis-aligned box, 8 vertices and 12 triangles.
TriMesh box(const Vec3& min, const Vec3& max);

/// Subdivided icosahedron projected onto a sphere.
TriMesh icosphere(const Vec3& center, double radius, int subdivisions);

/// Open tube along z with no caps: rings x segments vertices. Normals point
/// away from the axis.
TriMesh capless_cylinder(const Vec3& base_center, double radius, double height,
                         int segments, int rings);

/// Square of half-side a in the plane z = z0 centered on (cx, cy), split
/// into two triangles. normal_up selects a +z or -z facing.
TriMesh square_patch(double a, double z0, bool normal_up, double cx = 0.0, double cy = 0.0);

/// n x n grid of quads (2 n^2 triangles) spanning [x0, x0+size] x [y0, y0+size]
/// in the plane z = z0, facing +z.
TriMesh plate(double x0, double y0, double z0, double size, int n);

/// Dress-like open shell inside [0,1]^3: an elliptic flared tube with folds,
/// open at both ends. Has 2 * segments * (rings - 1) triangles; the defaults
/// give 10k.
TriMesh garment_shell(int segments = 100, int rings = 51);

/// Two spheres mirrored about the plane x = 0.5, carrying NOCS labels equal
/// to their positions (all inside [0,1]^3).
TriMesh two_lobes(int subdivisions = 3);

}  // namespace garmentkit::shapes
