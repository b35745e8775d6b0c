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
#include "garmentkit/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace garmentkit::shapes {

TriMesh box(const Vec3& min, const Vec3& max) {
  TriMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? max.x() : min.x(), (i & 2) ? max.y() : min.y(),
                            (i & 4) ? max.z() : min.z());
  }
  m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                 {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return m;
}

TriMesh icosphere(const Vec3& center, double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const Triangle& tri : f) {
      const int ab = mid(tri[0], tri[1]);
      const int bc = mid(tri[1], tri[2]);
      const int ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  TriMesh m;
  m.vertices.reserve(v.size());
  for (const Vec3& p : v) m.vertices.push_back(center + radius * p);
  m.triangles = std::move(f);
  return m;
}

namespace {

// Connects a rings x segments vertex lattice (ring-major) into a tube whose
// triangles face outward when rings advance along +z and segments turn
// counter-clockwise.
void connect_tube(TriMesh& m, int segments, int rings) {
  for (int j = 0; j + 1 < rings; ++j) {
    for (int i = 0; i < segments; ++i) {
      const int i1 = (i + 1) % segments;
      const int a = j * segments + i;
      const int b = j * segments + i1;
      const int c = (j + 1) * segments + i1;
      const int d = (j + 1) * segments + i;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
}

}  // namespace

TriMesh capless_cylinder(const Vec3& base_center, double radius, double height, int segments,
                         int rings) {
  TriMesh m;
  for (int j = 0; j < rings; ++j) {
    const double z = height * j / (rings - 1);
    for (int i = 0; i < segments; ++i) {
      const double th = 2.0 * std::numbers::pi * i / segments;
      m.vertices.push_back(base_center + Vec3(radius * std::cos(th), radius * std::sin(th), z));
    }
  }
  connect_tube(m, segments, rings);
  return m;
}

TriMesh square_patch(double a, double z0, bool normal_up, double cx, double cy) {
  TriMesh m;
  m.vertices = {{cx - a, cy - a, z0}, {cx + a, cy - a, z0}, {cx + a, cy + a, z0},
                {cx - a, cy + a, z0}};
  if (normal_up)
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
  else
    m.triangles = {{0, 2, 1}, {0, 3, 2}};
  return m;
}

TriMesh plate(double x0, double y0, double z0, double size, int n) {
  TriMesh m;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.emplace_back(x0 + size * i / n, y0 + size * j / n, z0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i;
      const int b = a + 1;
      const int c = a + n + 2;
      const int d = a + n + 1;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  }
  return m;
}

TriMesh garment_shell(int segments, int rings) {
  TriMesh m;
  const double z0 = 0.1;
  const double z1 = 0.9;
  for (int j = 0; j < rings; ++j) {
    const double s = static_cast<double>(j) / (rings - 1);
    const double z = z0 + (z1 - z0) * s;
    // Flared hem at the bottom, narrow waist, wider shoulders at the top.
    const double rx = 0.22 + 0.12 * (1.0 - s) * (1.0 - s) + 0.04 * s * s;
    const double ry = 0.09 + 0.03 * (1.0 - s);
    for (int i = 0; i < segments; ++i) {
      const double th = 2.0 * std::numbers::pi * i / segments;
      const double fold = 1.0 + 0.06 * (1.0 - s) * std::sin(9.0 * th) + 0.02 * std::sin(3.0 * th + 5.0 * s);
      const double sway = 0.03 * std::sin(2.0 * std::numbers::pi * s);
      m.vertices.emplace_back(0.5 + sway + rx * fold * std::cos(th), 0.5 + ry * fold * std::sin(th), z);
    }
  }
  connect_tube(m, segments, rings);
  return m;
}

TriMesh two_lobes(int subdivisions) {
  TriMesh left = icosphere(Vec3(0.25, 0.5, 0.5), 0.15, subdivisions);
  TriMesh m = left;
  const auto offset = static_cast<std::int32_t>(left.vertices.size());
  // Mirror image of the left lobe; reversing winding keeps normals outward.
  for (const Vec3& p : left.vertices) m.vertices.emplace_back(1.0 - p.x(), p.y(), p.z());
  for (const Triangle& t : left.triangles)
    m.triangles.push_back({t[0] + offset, t[2] + offset, t[1] + offset});
  m.nocs_labels = m.vertices;
  m.frame = Frame::canonical;
  return m;
}

}  // namespace garmentkit::shapes
