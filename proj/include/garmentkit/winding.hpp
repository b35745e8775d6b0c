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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "garmentkit/geometry.hpp"
#include "garmentkit/mesh_io.hpp"

namespace garmentkit {

/// Far-field admissibility: a node of bounding radius r around its expansion
/// center c is approximated when |q - c| > beta * r. exact_fallback disables
/// the approximation entirely (every triangle is summed exactly).
struct WindingQueryParams {
  double beta = 2.0;
  bool exact_fallback = false;
};

struct SolidAngle {
  double steradians = 0.0;
  /// q coincides with a triangle vertex; steradians is then 0.
  bool degenerate = false;
};

/// Signed solid angle of triangle (a,b,c) seen from q (Van Oosterom and
/// Strackee). Positive when q lies behind the triangle, i.e. on the side
/// opposite its right-handed normal, so outward-oriented closed surfaces
/// give +4 pi at interior points. Zero-area triangles give 0.
inline double solid_angle_value(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ra = a - q;
  const Vec3 rb = b - q;
  const Vec3 rc = c - q;
  const double la = ra.norm();
  const double lb = rb.norm();
  const double lc = rc.norm();
  // det(ra, rb, rc) written with edge vectors so zero-area triangles give exactly 0.
  const double numerator = ra.dot((b - a).cross(c - a));
  const double denominator = la * lb * lc + ra.dot(rb) * lc + ra.dot(rc) * lb + rb.dot(rc) * la;
  return 2.0 * std::atan2(numerator, denominator);
}

SolidAngle solid_angle_triangle(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c);

struct WindingSample {
  double value = 0.0;
  /// Distance to the nearest triangle is below 1e-7 x bbox diagonal.
  bool near_surface = false;
  /// Number of triangles with a vertex coincident with the query.
  std::size_t degenerate_triangles = 0;
};

/// (1 / 4 pi) * sum of per-triangle solid angles.
double winding_exact(const TriMesh& mesh, const Vec3& q);

/// winding_exact plus near-surface and degeneracy diagnostics.
WindingSample winding_exact_checked(const TriMesh& mesh, const Vec3& q);

inline constexpr int kDefaultLeafSize = 16;

struct ClosestHit {
  double distance = std::numeric_limits<double>::infinity();
  /// Index into the source mesh's triangles, -1 when nothing was within range.
  std::int32_t triangle = -1;
  Vec3 point = Vec3::Zero();
};

/// Bounding volume hierarchy over a triangle soup with per-node far-field
/// expansions (dipole plus first and second moments) for fast winding
/// numbers. Also answers exact closest-point
/// queries. Immutable after construction and safe to share across threads.
class WindingAccel {
 public:
  struct Node {
    Aabb box;
    /// Sum over the subtree of triangle area times unit normal.
    Vec3 dipole = Vec3::Zero();
    /// Sum of area_normal * (triangle centroid - centroid)^T.
    Eigen::Matrix3d moment = Eigen::Matrix3d::Zero();
    /// second[i] = sum over triangles of n_i * integral of (x - c)(x - c)^T dA.
    std::array<Eigen::Matrix3d, 3> second{Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Zero(),
                                          Eigen::Matrix3d::Zero()};
    /// Contractions of second: u_k = sum_i second[i](i,k), v_i = trace(second[i]).
    Vec3 second_u = Vec3::Zero();
    Vec3 second_v = Vec3::Zero();
    /// Area-weighted centroid; the far-field expansion center.
    Vec3 centroid = Vec3::Zero();
    /// Radius of the sphere about centroid that encloses the node box.
    double radius = 0.0;
    double area = 0.0;
    std::int32_t begin = 0;
    std::int32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return left < 0; }
  };

  /// Median split along the longest axis of each node's box. Throws
  /// InvariantError when the mesh has no triangles.
  static WindingAccel build(const TriMesh& mesh, int leaf_size = kDefaultLeafSize);

  const std::vector<Node>& nodes() const { return nodes_; }
  /// Source triangle index stored in each leaf slot.
  std::span<const std::int32_t> triangle_order() const { return order_; }
  int leaf_size() const { return leaf_size_; }
  const Aabb& bounds() const { return nodes_.front().box; }
  std::size_t triangle_count() const { return order_.size(); }

  double winding(const Vec3& q, const WindingQueryParams& params = {}) const;

  /// Exact nearest surface point, searching no farther than max_distance.
  ClosestHit closest(const Vec3& q,
                     double max_distance = std::numeric_limits<double>::infinity()) const;

  /// True when q is within 1e-7 x bbox diagonal of a triangle.
  bool near_surface(const Vec3& q) const;

 private:
  struct Tri {
    Vec3 a, b, c;
  };

  std::int32_t build_node(std::int32_t begin, std::int32_t end, std::vector<Vec3>& centroids,
                          std::vector<double>& areas, std::vector<Vec3>& area_normals);

  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
  std::vector<Tri> tris_;
  int leaf_size_ = kDefaultLeafSize;
};

inline WindingAccel build_accel(const TriMesh& mesh, int leaf_size = kDefaultLeafSize) {
  return WindingAccel::build(mesh, leaf_size);
}

inline double winding_fast(const WindingAccel& accel, const Vec3& q,
                           const WindingQueryParams& params = {}) {
  return accel.winding(q, params);
}

/// Data-parallel winding_fast. Output order matches query order and each
/// value is independent of the worker count.
std::vector<double> winding_batch(const WindingAccel& accel, std::span<const Vec3> queries,
                                  const WindingQueryParams& params = {});

}  // namespace garmentkit
