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
#include "garmentkit/winding.hpp"

#include <algorithm>
#include <numeric>

#include "garmentkit/parallel.hpp"

namespace garmentkit {
namespace {

constexpr double kInv4Pi = 0.25 * std::numbers::inv_pi;
constexpr double kNearSurfaceFraction = 1e-7;

}  // namespace

SolidAngle solid_angle_triangle(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  if (q == a || q == b || q == c) return {0.0, true};
  return {solid_angle_value(q, a, b, c), false};
}

double winding_exact(const TriMesh& mesh, const Vec3& q) {
  double sum = 0.0;
  for (const Triangle& t : mesh.triangles)
    sum += solid_angle_value(q, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
  return sum * kInv4Pi;
}

WindingSample winding_exact_checked(const TriMesh& mesh, const Vec3& q) {
  WindingSample out;
  double sum = 0.0;
  double nearest = std::numeric_limits<double>::infinity();
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    const SolidAngle s = solid_angle_triangle(q, a, b, c);
    sum += s.steradians;
    if (s.degenerate) ++out.degenerate_triangles;
    nearest = std::min(nearest, point_triangle_distance(q, a, b, c));
  }
  out.value = sum * kInv4Pi;
  out.near_surface = nearest < kNearSurfaceFraction * mesh.bounds().diagonal();
  return out;
}

WindingAccel WindingAccel::build(const TriMesh& mesh, int leaf_size) {
  if (mesh.triangles.empty()) throw InvariantError("build_accel: mesh has no triangles");
  check_invariants(mesh);

  WindingAccel accel;
  accel.leaf_size_ = std::max(1, leaf_size);
  const auto n = static_cast<std::int32_t>(mesh.triangles.size());
  accel.order_.resize(n);
  std::iota(accel.order_.begin(), accel.order_.end(), 0);

  std::vector<Vec3> centroids(n);
  std::vector<double> areas(n);
  std::vector<Vec3> area_normals(n);
  accel.tris_.resize(n);
  for (std::int32_t i = 0; i < n; ++i) {
    const Triangle& t = mesh.triangles[i];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    accel.tris_[i] = {a, b, c};
    centroids[i] = (a + b + c) / 3.0;
    area_normals[i] = 0.5 * triangle_cross(a, b, c);
    areas[i] = area_normals[i].norm();
  }
  accel.nodes_.reserve(2 * static_cast<std::size_t>(n / accel.leaf_size_ + 1));
  accel.build_node(0, n, centroids, areas, area_normals);

  // Store triangles in slot order so leaves read contiguous memory.
  std::vector<Tri> ordered(n);
  for (std::int32_t s = 0; s < n; ++s) ordered[s] = accel.tris_[accel.order_[s]];
  accel.tris_ = std::move(ordered);
  return accel;
}

std::int32_t WindingAccel::build_node(std::int32_t begin, std::int32_t end,
                                      std::vector<Vec3>& centroids, std::vector<double>& areas,
                                      std::vector<Vec3>& area_normals) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  for (std::int32_t s = begin; s < end; ++s) {
    const Tri& t = tris_[order_[s]];
    node.box.extend(t.a);
    node.box.extend(t.b);
    node.box.extend(t.c);
  }

  if (end - begin <= leaf_size_) {
    Vec3 weighted = Vec3::Zero();
    for (std::int32_t s = begin; s < end; ++s) {
      const std::int32_t t = order_[s];
      node.dipole += area_normals[t];
      node.area += areas[t];
      weighted += areas[t] * centroids[t];
    }
    node.centroid = node.area > 0.0 ? Vec3(weighted / node.area) : node.box.center();
    for (std::int32_t s = begin; s < end; ++s) {
      const std::int32_t t = order_[s];
      const Tri& tri = tris_[t];
      node.moment += area_normals[t] * (centroids[t] - node.centroid).transpose();
      // Exact second moment of the triangle about the node centroid.
      const Vec3 w0 = tri.a - node.centroid, w1 = tri.b - node.centroid, w2 = tri.c - node.centroid;
      const Vec3 sum = w0 + w1 + w2;
      const Eigen::Matrix3d second = (areas[t] / 12.0) * (w0 * w0.transpose() + w1 * w1.transpose() +
                                                           w2 * w2.transpose() + sum * sum.transpose());
      if (areas[t] > 0.0) {
        const Vec3 unit = area_normals[t] / areas[t];
        for (int i = 0; i < 3; ++i) node.second[i] += unit[i] * second;
      }
    }
  } else {
    const Vec3 extent = node.box.extent();
    int axis = 0;
    if (extent[1] > extent[axis]) axis = 1;
    if (extent[2] > extent[axis]) axis = 2;
    const std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::int32_t x, std::int32_t y) {
                       const double cx = centroids[x][axis];
                       const double cy = centroids[y][axis];
                       return cx < cy || (cx == cy && x < y);
                     });
    node.left = build_node(begin, mid, centroids, areas, area_normals);
    node.right = build_node(mid, end, centroids, areas, area_normals);
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    node.dipole = l.dipole + r.dipole;
    node.area = l.area + r.area;
    node.centroid = node.area > 0.0 ? Vec3((l.area * l.centroid + r.area * r.centroid) / node.area)
                                    : node.box.center();
    node.moment = l.moment + l.dipole * (l.centroid - node.centroid).transpose() + r.moment +
                  r.dipole * (r.centroid - node.centroid).transpose();
    for (const Node* child : {&l, &r}) {
      const Vec3 e = child->centroid - node.centroid;
      for (int i = 0; i < 3; ++i) {
        const Vec3 m = child->moment.row(i).transpose();
        node.second[i] += child->second[i] + m * e.transpose() + e * m.transpose() +
                          child->dipole[i] * e * e.transpose();
      }
    }
  }

  // Radius of the sphere about the centroid that encloses the node's box.
  double radius2 = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p((corner & 1) ? node.box.max.x() : node.box.min.x(),
                 (corner & 2) ? node.box.max.y() : node.box.min.y(),
                 (corner & 4) ? node.box.max.z() : node.box.min.z());
    radius2 = std::max(radius2, (p - node.centroid).squaredNorm());
  }
  node.radius = std::sqrt(radius2);
  for (int i = 0; i < 3; ++i) {
    node.second_u += node.second[i].row(i).transpose();
    node.second_v[i] = node.second[i].trace();
  }
  nodes_[index] = node;
  return index;
}

double WindingAccel::winding(const Vec3& q, const WindingQueryParams& params) const {
  const double beta2 = params.beta * params.beta;
  const bool allow_far = !params.exact_fallback;
  double sum = 0.0;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (allow_far) {
      const Vec3 d = node.centroid - q;
      const double r2 = d.squaredNorm();
      if (r2 > beta2 * node.radius * node.radius) {
        // Dipole plus first-moment terms of the expansion about c, with d = c - q.
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        const double inv_r2 = 1.0 / r2;
        sum += inv_r3 * (node.dipole.dot(d) + node.moment.trace() -
                         3.0 * d.dot(node.moment * d) * inv_r2);
        const double cubic = d[0] * d.dot(node.second[0] * d) + d[1] * d.dot(node.second[1] * d) +
                             d[2] * d.dot(node.second[2] * d);
        sum += 0.5 * inv_r3 * inv_r2 *
               (15.0 * cubic * inv_r2 - 6.0 * node.second_u.dot(d) - 3.0 * node.second_v.dot(d));
        continue;
      }
    }
    if (node.is_leaf()) {
      for (std::int32_t s = node.begin; s < node.end; ++s) {
        const Tri& t = tris_[s];
        sum += solid_angle_value(q, t.a, t.b, t.c);
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
  return sum * kInv4Pi;
}

ClosestHit WindingAccel::closest(const Vec3& q, double max_distance) const {
  ClosestHit hit;
  double best2 = max_distance * max_distance;
  hit.distance = max_distance;
  std::int32_t stack[128];
  int top = 0;
  if (nodes_.front().box.squared_distance(q) <= best2) stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squared_distance(q) > best2) continue;
    if (node.is_leaf()) {
      for (std::int32_t s = node.begin; s < node.end; ++s) {
        const Tri& t = tris_[s];
        const Vec3 p = closest_point_on_triangle(q, t.a, t.b, t.c);
        const double d2 = (p - q).squaredNorm();
        if (d2 < best2 || (d2 == best2 && (hit.triangle < 0 || order_[s] < hit.triangle))) {
          best2 = d2;
          hit.triangle = order_[s];
          hit.point = p;
        }
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squared_distance(q);
    const double dr = nodes_[node.right].box.squared_distance(q);
    // Visit the nearer child first.
    if (dl <= dr) {
      if (dr <= best2) stack[top++] = node.right;
      if (dl <= best2) stack[top++] = node.left;
    } else {
      if (dl <= best2) stack[top++] = node.left;
      if (dr <= best2) stack[top++] = node.right;
    }
  }
  if (hit.triangle >= 0) hit.distance = std::sqrt(best2);
  return hit;
}

bool WindingAccel::near_surface(const Vec3& q) const {
  const double tol = kNearSurfaceFraction * bounds().diagonal();
  const ClosestHit hit = closest(q, tol);
  return hit.triangle >= 0 && hit.distance < tol;
}

std::vector<double> winding_batch(const WindingAccel& accel, std::span<const Vec3> queries,
                                  const WindingQueryParams& params) {
  std::vector<double> out(queries.size());
  parallel_for(queries.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = accel.winding(queries[i], params);
  }, 64);
  return out;
}

}  // namespace garmentkit
