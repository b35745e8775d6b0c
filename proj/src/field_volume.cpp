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
#include "garmentkit/field_volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "garmentkit/diagnostics.hpp"
#include "garmentkit/parallel.hpp"

namespace garmentkit {
namespace {

ScalarGrid make_grid(const GridSpec& spec, FieldKind kind) {
  check_grid_spec(spec);
  ScalarGrid g;
  g.spec = spec;
  g.kind = kind;
  g.data.assign(spec.voxel_count(), 0.0f);
  return g;
}

void warn_if_not_covered(const TriMesh& mesh, const GridSpec& spec) {
  if (mesh.vertices.empty()) return;
  const Aabb cells = spec.cell_bounds();
  const Aabb box = mesh.bounds();
  const Vec3 margin = Vec3::Constant(spec.voxel_size);
  if (((box.min - margin).array() < cells.min.array()).any() ||
      ((box.max + margin).array() > cells.max.array()).any()) {
    std::ostringstream os;
    os << "grid does not cover the mesh bounding box with a one-voxel margin; values near the "
          "grid boundary may be clipped";
    warn(os.str());
  }
}

// Runs body(index, center) for every voxel, parallel over z-slices of rows.
template <typename Body>
void for_each_voxel(const GridSpec& spec, Body&& body) {
  const std::size_t rows = static_cast<std::size_t>(spec.dims[1]) * spec.dims[2];
  parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const int j = static_cast<int>(r % spec.dims[1]);
      const int k = static_cast<int>(r / spec.dims[1]);
      for (int i = 0; i < spec.dims[0]; ++i) body(spec.index(i, j, k), spec.center(i, j, k));
    }
  }, 4);
}

// Largest float not above x, so clamped values never exceed the band.
float float_at_most(double x) {
  float f = static_cast<float>(x);
  if (static_cast<double>(f) > x) f = std::nextafter(f, -std::numeric_limits<float>::infinity());
  return f;
}

constexpr double kHullSlack = 1e-9;

}  // namespace

void check_grid_spec(const GridSpec& spec) {
  for (int a = 0; a < 3; ++a)
    if (spec.dims[a] < 2) throw InvariantError("grid dims must be >= 2 on every axis");
  if (!(spec.voxel_size > 0.0) || !std::isfinite(spec.voxel_size))
    throw InvariantError("grid voxel size must be positive");
}

GridSpec grid_for_bounds(const Aabb& box, int dims, int margin) {
  if (box.empty()) throw InvariantError("grid_for_bounds: empty box");
  if (dims - 2 * margin < 1) throw InvariantError("grid_for_bounds: dims too small for margin");
  const double largest = box.extent().maxCoeff();
  if (!(largest > 0.0)) throw InvariantError("grid_for_bounds: box has zero extent");
  GridSpec spec;
  spec.dims = {dims, dims, dims};
  spec.voxel_size = largest / (dims - 2 * margin);
  spec.origin = box.center() - Vec3::Constant(0.5 * (dims - 1) * spec.voxel_size);
  return spec;
}

GridSpec canonical_grid(int dims, int margin) {
  return grid_for_bounds(Aabb{Vec3::Zero(), Vec3::Ones()}, dims, margin);
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::wnf: return "wnf";
    case FieldKind::occupancy: return "occ";
    case FieldKind::tsdf: return "tsdf";
    case FieldKind::tdf: return "tdf";
  }
  return "wnf";
}

FieldKind parse_field_kind(const std::string& name) {
  if (name == "wnf") return FieldKind::wnf;
  if (name == "occ" || name == "occupancy") return FieldKind::occupancy;
  if (name == "tsdf") return FieldKind::tsdf;
  if (name == "tdf") return FieldKind::tdf;
  throw InvariantError("unknown field kind '" + name + "'");
}

void check_invariants(const ScalarGrid& grid) {
  check_grid_spec(grid.spec);
  if (grid.data.size() != grid.spec.voxel_count())
    throw InvariantError("grid data length does not match dims");
  switch (grid.kind) {
    case FieldKind::occupancy:
      for (float v : grid.data)
        if (v != 0.0f && v != 1.0f) throw InvariantError("occupancy values must be 0 or 1");
      break;
    case FieldKind::tsdf:
    case FieldKind::tdf: {
      if (!grid.trunc || !(*grid.trunc > 0.0))
        throw InvariantError("distance grids need a positive truncation distance");
      const double lo = grid.kind == FieldKind::tsdf ? -*grid.trunc : 0.0;
      for (float v : grid.data)
        if (v < lo || v > *grid.trunc) throw InvariantError("distance value outside truncation band");
      break;
    }
    case FieldKind::wnf:
      break;
  }
}

ScalarGrid rasterize_wnf(const TriMesh& mesh, const GridSpec& spec, const WindingAccel& accel,
                         const WindingQueryParams& params) {
  ScalarGrid g = make_grid(spec, FieldKind::wnf);
  warn_if_not_covered(mesh, spec);
  for_each_voxel(spec, [&](std::size_t idx, const Vec3& c) {
    g.data[idx] = static_cast<float>(accel.winding(c, params));
  });
  return g;
}

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  const Vec3 v[3] = {a - center, b - center, c - center};
  // Box face normals.
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = std::min({v[0][ax], v[1][ax], v[2][ax]});
    const double hi = std::max({v[0][ax], v[1][ax], v[2][ax]});
    if (lo > half[ax] || hi < -half[ax]) return false;
  }
  // Triangle plane.
  const Vec3 e[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  const Vec3 n = e[0].cross(e[1]);
  if (std::abs(n.dot(v[0])) > half.dot(n.cwiseAbs())) return false;
  // Edge x box-axis cross products.
  for (const Vec3& edge : e) {
    for (int ax = 0; ax < 3; ++ax) {
      const Vec3 axis = edge.cross(Vec3::Unit(ax));
      const double p0 = axis.dot(v[0]);
      const double p1 = axis.dot(v[1]);
      const double p2 = axis.dot(v[2]);
      const double r = half.dot(axis.cwiseAbs());
      if (std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r) return false;
    }
  }
  return true;
}

ScalarGrid rasterize_occupancy(const TriMesh& mesh, const GridSpec& spec) {
  ScalarGrid g = make_grid(spec, FieldKind::occupancy);
  check_invariants(mesh);
  const double h = spec.voxel_size;
  const Vec3 half = Vec3::Constant(0.5 * h);

  struct Range {
    std::array<int, 3> lo, hi;
  };
  std::vector<Range> ranges(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Aabb box;
    for (int k = 0; k < 3; ++k) box.extend(mesh.vertices[mesh.triangles[t][k]]);
    for (int a = 0; a < 3; ++a) {
      // Voxel i spans [origin + (i - 0.5) h, origin + (i + 0.5) h].
      const double lo = (box.min[a] - spec.origin[a]) / h - 0.5;
      const double hi = (box.max[a] - spec.origin[a]) / h + 0.5;
      ranges[t].lo[a] = std::max(0, static_cast<int>(std::floor(lo)));
      ranges[t].hi[a] = std::min(spec.dims[a] - 1, static_cast<int>(std::ceil(hi)));
    }
  }

  // Each worker owns a band of z-slices, so writes never collide.
  parallel_for(static_cast<std::size_t>(spec.dims[2]), [&](std::size_t kb, std::size_t ke) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      const Range& r = ranges[t];
      const int k0 = std::max(r.lo[2], static_cast<int>(kb));
      const int k1 = std::min(r.hi[2], static_cast<int>(ke) - 1);
      if (k0 > k1 || r.lo[0] > r.hi[0] || r.lo[1] > r.hi[1]) continue;
      const Vec3& a = mesh.vertices[mesh.triangles[t][0]];
      const Vec3& b = mesh.vertices[mesh.triangles[t][1]];
      const Vec3& c = mesh.vertices[mesh.triangles[t][2]];
      for (int k = k0; k <= k1; ++k)
        for (int j = r.lo[1]; j <= r.hi[1]; ++j)
          for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
            float& cell = g.at(i, j, k);
            if (cell == 0.0f && triangle_box_overlap(spec.center(i, j, k), half, a, b, c))
              cell = 1.0f;
          }
    }
  }, 8);
  return g;
}

ScalarGrid rasterize_tsdf(const TriMesh& mesh, const GridSpec& spec, double trunc,
                          const WindingAccel& accel, const WindingQueryParams& params) {
  if (!(trunc > 0.0)) throw InvariantError("rasterize_tsdf: trunc must be positive");
  ScalarGrid g = make_grid(spec, FieldKind::tsdf);
  g.trunc = trunc;
  warn_if_not_covered(mesh, spec);
  const float band = float_at_most(trunc);
  for_each_voxel(spec, [&](std::size_t idx, const Vec3& c) {
    const double d = accel.closest(c, trunc).distance;
    const float magnitude = std::min(static_cast<float>(d), band);
    g.data[idx] = accel.winding(c, params) > 0.5 ? -magnitude : magnitude;
  });
  return g;
}

ScalarGrid rasterize_tdf(const TriMesh& mesh, const GridSpec& spec, double trunc,
                         const WindingAccel& accel) {
  if (!(trunc > 0.0)) throw InvariantError("rasterize_tdf: trunc must be positive");
  ScalarGrid g = make_grid(spec, FieldKind::tdf);
  g.trunc = trunc;
  warn_if_not_covered(mesh, spec);
  const float band = float_at_most(trunc);
  for_each_voxel(spec, [&](std::size_t idx, const Vec3& c) {
    g.data[idx] = std::min(static_cast<float>(accel.closest(c, trunc).distance), band);
  });
  return g;
}

ScalarGrid rasterize_tdf(const TriMesh& mesh, const GridSpec& spec, double trunc) {
  return rasterize_tdf(mesh, spec, trunc, build_accel(mesh));
}

double occupancy_rate(const ScalarGrid& grid) {
  if (grid.data.empty()) return 0.0;
  const auto occupied = std::count_if(grid.data.begin(), grid.data.end(),
                                      [](float v) { return v != 0.0f; });
  return static_cast<double>(occupied) / static_cast<double>(grid.data.size());
}

bool in_sampling_hull(const GridSpec& spec, const Vec3& p) {
  for (int a = 0; a < 3; ++a) {
    const double u = (p[a] - spec.origin[a]) / spec.voxel_size;
    if (!(u >= -kHullSlack && u <= spec.dims[a] - 1 + kHullSlack)) return false;
  }
  return true;
}

double trilinear_sample(const ScalarGrid& grid, const Vec3& p) {
  const GridSpec& s = grid.spec;
  int i0[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    double u = (p[a] - s.origin[a]) / s.voxel_size;
    if (!(u >= -kHullSlack && u <= s.dims[a] - 1 + kHullSlack)) {
      std::ostringstream os;
      os << "trilinear_sample: point (" << p.x() << ", " << p.y() << ", " << p.z()
         << ") is outside the sampling hull";
      throw OutOfRangeError(os.str());
    }
    // Snap to the lattice so voxel centers reproduce stored values exactly.
    const double r = std::round(u);
    if (std::abs(u - r) < kHullSlack) u = r;
    u = std::clamp(u, 0.0, static_cast<double>(s.dims[a] - 1));
    i0[a] = std::min(static_cast<int>(std::floor(u)), s.dims[a] - 2);
    t[a] = u - i0[a];
  }
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1;
    const int dy = (corner >> 1) & 1;
    const int dz = (corner >> 2) & 1;
    const double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) * (dz ? t[2] : 1.0 - t[2]);
    if (w == 0.0) continue;
    acc += w * grid.at(i0[0] + dx, i0[1] + dy, i0[2] + dz);
  }
  return acc;
}

Vec3 gradient(const ScalarGrid& grid, const Vec3& p, double step) {
  const double s = step > 0.0 ? step : grid.spec.voxel_size;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = s * Vec3::Unit(a);
    g[a] = (trilinear_sample(grid, p + e) - trilinear_sample(grid, p - e)) / (2.0 * s);
  }
  return g;
}

std::vector<ScalarGrid> slice_volume(const ScalarGrid& grid, std::array<int, 3> parts) {
  const GridSpec& s = grid.spec;
  std::array<int, 3> block{};
  for (int a = 0; a < 3; ++a) {
    if (parts[a] < 1 || s.dims[a] % parts[a] != 0)
      throw InvariantError("slice_volume: dims not divisible by the part counts");
    block[a] = s.dims[a] / parts[a];
  }
  std::vector<ScalarGrid> out;
  out.reserve(static_cast<std::size_t>(parts[0]) * parts[1] * parts[2]);
  for (int bz = 0; bz < parts[2]; ++bz)
    for (int by = 0; by < parts[1]; ++by)
      for (int bx = 0; bx < parts[0]; ++bx) {
        ScalarGrid part;
        part.kind = grid.kind;
        part.trunc = grid.trunc;
        part.spec.dims = block;
        part.spec.voxel_size = s.voxel_size;
        part.spec.origin = s.center(bx * block[0], by * block[1], bz * block[2]);
        part.data.resize(part.spec.voxel_count());
        for (int k = 0; k < block[2]; ++k)
          for (int j = 0; j < block[1]; ++j)
            for (int i = 0; i < block[0]; ++i)
              part.at(i, j, k) = grid.at(bx * block[0] + i, by * block[1] + j, bz * block[2] + k);
        out.push_back(std::move(part));
      }
  return out;
}

ScalarGrid merge_volume(const std::vector<ScalarGrid>& blocks, std::array<int, 3> parts) {
  const std::size_t expected = static_cast<std::size_t>(parts[0]) * parts[1] * parts[2];
  if (blocks.size() != expected || blocks.empty())
    throw InvariantError("merge_volume: block count does not match parts");
  const GridSpec& first = blocks.front().spec;
  ScalarGrid out;
  out.kind = blocks.front().kind;
  out.trunc = blocks.front().trunc;
  out.spec.voxel_size = first.voxel_size;
  out.spec.origin = first.origin;
  for (int a = 0; a < 3; ++a) out.spec.dims[a] = first.dims[a] * parts[a];
  out.data.resize(out.spec.voxel_count());
  std::size_t b = 0;
  for (int bz = 0; bz < parts[2]; ++bz)
    for (int by = 0; by < parts[1]; ++by)
      for (int bx = 0; bx < parts[0]; ++bx, ++b) {
        const ScalarGrid& part = blocks[b];
        if (part.spec.dims != first.dims || part.spec.voxel_size != first.voxel_size ||
            part.kind != out.kind)
          throw InvariantError("merge_volume: blocks have inconsistent layout");
        for (int k = 0; k < first.dims[2]; ++k)
          for (int j = 0; j < first.dims[1]; ++j)
            for (int i = 0; i < first.dims[0]; ++i)
              out.at(bx * first.dims[0] + i, by * first.dims[1] + j, bz * first.dims[2] + k) =
                  part.at(i, j, k);
      }
  return out;
}

}  // namespace garmentkit
