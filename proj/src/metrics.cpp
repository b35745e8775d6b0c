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

#include "garmentkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "garmentkit/kdtree.hpp"
#include "garmentkit/parallel.hpp"
#include "garmentkit/winding.hpp"

namespace garmentkit {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Sum in index order so results do not depend on the thread count.
double ordered_mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

}  // namespace

PointCloud sample_surface(const TriMesh& mesh, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw InvariantError("sample count must be at least 1");
  check_invariants(mesh);
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    total += triangle_area(mesh.vertices[mesh.triangles[t][0]], mesh.vertices[mesh.triangles[t][1]], mesh.vertices[mesh.triangles[t][2]]);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw InvariantError("cannot sample a mesh with no non-degenerate triangle");

  std::mt19937_64 rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n));
  std::vector<Vec3> labels;
  for (std::int64_t s = 0; s < n; ++s) {
    const double pick = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const Triangle& tri = mesh.triangles[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(uniform01(rng));
    const double r2 = uniform01(rng);
    const double w0 = 1.0 - r1, w1 = r1 * (1.0 - r2), w2 = r1 * r2;
    cloud.points.push_back(w0 * mesh.vertices[tri[0]] + w1 * mesh.vertices[tri[1]] +
                           w2 * mesh.vertices[tri[2]]);
    if (mesh.nocs_labels) {
      const auto& l = *mesh.nocs_labels;
      const Vec3 v = w0 * l[tri[0]] + w1 * l[tri[1]] + w2 * l[tri[2]];
      labels.push_back(v.cwiseMax(0.0).cwiseMin(1.0));
    }
  }
  if (mesh.nocs_labels) cloud.nocs = std::move(labels);
  return cloud;
}

double directed_chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw InvariantError("chamfer distance needs non-empty point sets");
  const KdTree tree(b);
  std::vector<double> d(a.size());
  parallel_for(a.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) d[i] = std::sqrt(tree.nearest(a[i]).squared_distance);
  });
  return ordered_mean(d);
}

ChamferResult chamfer(const TriMesh& pred, const TriMesh& gt, std::int64_t n, std::uint64_t seed) {
  const PointCloud a = sample_surface(pred, n, seed);
  const PointCloud b = sample_surface(gt, n, seed);
  ChamferResult r;
  r.accuracy_mean = directed_chamfer(a.points, b.points);
  r.completeness_mean = directed_chamfer(b.points, a.points);
  r.symmetric_mean = 0.5 * (r.accuracy_mean + r.completeness_mean);
  r.sample_count = n;
  r.seed = seed;
  return r;
}

ChamferResult chamfer_to_surface(const TriMesh& pred, const TriMesh& gt, std::int64_t n,
                                 std::uint64_t seed) {
  auto directed = [](const PointCloud& samples, const TriMesh& target) {
    const WindingAccel accel = build_accel(target);
    std::vector<double> d(samples.points.size());
    parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) d[i] = accel.closest(samples.points[i]).distance;
    });
    return ordered_mean(d);
  };
  ChamferResult r;
  r.accuracy_mean = directed(sample_surface(pred, n, seed), gt);
  r.completeness_mean = directed(sample_surface(gt, n, seed), pred);
  r.symmetric_mean = 0.5 * (r.accuracy_mean + r.completeness_mean);
  r.sample_count = n;
  r.seed = seed;
  return r;
}

double correspondence_distance(const TriMesh& pred, const TriMesh& gt, std::int64_t n,
                               std::uint64_t seed) {
  if (!pred.nocs_labels || !gt.nocs_labels)
    throw InvariantError("correspondence distance requires NOCS labels on both meshes");
  const PointCloud a = sample_surface(pred, n, seed);
  const PointCloud b = sample_surface(gt, n, seed);
  const KdTree labels(*b.nocs);
  std::vector<double> d(a.points.size());
  parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto match = labels.nearest((*a.nocs)[i]).index;
      d[i] = (a.points[i] - b.points[static_cast<std::size_t>(match)]).norm();
    }
  });
  return ordered_mean(d);
}

double nocs_error(std::span<const Vec3> pred, std::span<const Vec3> gt, bool symmetric,
                  Axis mirror_axis) {
  if (pred.size() != gt.size())
    throw InvariantError("NOCS error needs equal-length label arrays (" + std::to_string(pred.size()) +
                         " vs " + std::to_string(gt.size()) + ")");
  if (pred.empty()) return 0.0;
  double plain = 0.0, mirrored = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    plain += (pred[i] - gt[i]).norm();
    if (symmetric) mirrored += (pred[i] - mirror_nocs(gt[i], mirror_axis)).norm();
  }
  const auto count = static_cast<double>(pred.size());
  return symmetric ? std::min(plain, mirrored) / count : plain / count;
}

Vec3 infer_grasp_nocs(const PointCloud& cloud) {
  if (cloud.points.empty()) throw InvariantError("grasp inference needs a non-empty point cloud");
  if (!cloud.nocs) throw InvariantError("grasp inference needs a NOCS channel");
  std::size_t best = 0;
  double best_d2 = cloud.points[0].squaredNorm();
  for (std::size_t i = 1; i < cloud.points.size(); ++i) {
    const double d2 = cloud.points[i].squaredNorm();
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return (*cloud.nocs)[best];
}

TriMesh rotate_z(const TriMesh& mesh, double angle) {
  TriMesh out = mesh;
  const double c = std::cos(angle), s = std::sin(angle);
  for (Vec3& v : out.vertices) v = Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
  return out;
}

AlignResult align_rotation_z(const TriMesh& pred, const PointCloud& observed, int coarse_steps,
                             int refine_iters, std::int64_t n, std::uint64_t seed) {
  if (observed.points.empty()) throw InvariantError("alignment needs a non-empty observed cloud");
  if (coarse_steps < 1) throw InvariantError("coarse_steps must be at least 1");
  if (refine_iters < 0) throw InvariantError("refine_iters must be non-negative");

  const KdTree tree(sample_surface(pred, n, seed).points);
  std::vector<double> d(observed.points.size());
  // Rotating the observation by -theta is the same as rotating pred by theta.
  auto objective = [&](double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    parallel_for(d.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Vec3& p = observed.points[i];
        const Vec3 q(c * p.x() + s * p.y(), -s * p.x() + c * p.y(), p.z());
        d[i] = std::sqrt(tree.nearest(q).squared_distance);
      }
    });
    return ordered_mean(d);
  };

  AlignResult r;
  const double step = 2.0 * std::numbers::pi / coarse_steps;
  int best_k = 0;
  for (int k = 0; k < coarse_steps; ++k) {
    r.coarse_objectives.push_back(objective(step * k));
    if (r.coarse_objectives[k] < r.coarse_objectives[best_k]) best_k = k;
  }
  double best_angle = step * best_k;
  double best_value = r.coarse_objectives[best_k];

  if (coarse_steps > 1 && refine_iters > 0) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_angle - step, b = best_angle + step;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    auto consider = [&](double x, double f) {
      if (f < best_value) {
        best_value = f;
        best_angle = x;
      }
    };
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < refine_iters; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = objective(x1);
        consider(x1, f1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = objective(x2);
        consider(x2, f2);
      }
    }
  }

  r.angle = normalize_angle(best_angle);
  r.objective = best_value;
  r.aligned = rotate_z(pred, r.angle);
  return r;
}

}  // namespace garmentkit
