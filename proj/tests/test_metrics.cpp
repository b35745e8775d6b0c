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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "garmentkit/diagnostics.hpp"
#include "garmentkit/kdtree.hpp"
#include "garmentkit/metrics.hpp"
#include "garmentkit/shapes.hpp"

namespace garmentkit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double distance_to(const TriMesh& m, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Triangle& t : m.triangles)
    best = std::min(best, point_triangle_distance(q, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
  return best;
}

TriMesh unit_square_uneven() {
  // Two triangles of areas 0.5 * 0.3 and 0.5 * 0.7 making the unit square.
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.3, 1, 0}};
  m.triangles = {{0, 4, 3}, {0, 1, 2}, {0, 2, 4}};
  return m;
}

TEST(KdTree, MatchesBruteForceWithTies) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> grid(0, 6);
  std::vector<Vec3> pts;
  for (int i = 0; i < 3000; ++i) pts.emplace_back(grid(rng) * 0.5, grid(rng) * 0.5, grid(rng) * 0.5);
  const KdTree tree(pts);
  std::uniform_real_distribution<double> u(-0.5, 3.5);
  for (int q = 0; q < 2000; ++q) {
    const Vec3 p = q % 2 ? Vec3(u(rng), u(rng), u(rng)) : Vec3(grid(rng) * 0.25, grid(rng) * 0.25, 1.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if ((pts[i] - p).squaredNorm() < (pts[best] - p).squaredNorm()) best = i;
    const Neighbor n = tree.nearest(p);
    ASSERT_EQ(static_cast<std::size_t>(n.index), best) << q;
    ASSERT_EQ(n.squared_distance, (pts[best] - p).squaredNorm());
  }
  EXPECT_THROW(KdTree(std::vector<Vec3>{}).nearest(Vec3::Zero()), InvariantError);
}

TEST(SampleSurface, DensityFollowsArea) {
  const TriMesh m = unit_square_uneven();
  const PointCloud cloud = sample_surface(m, 100000, 5);
  std::size_t left = 0;
  for (const Vec3& p : cloud.points) {
    EXPECT_EQ(p.z(), 0.0);
    // Points of the first triangle satisfy x < 0.3 y.
    if (p.x() < 0.3 * p.y()) ++left;
  }
  EXPECT_NEAR(static_cast<double>(left) / cloud.points.size(), 0.15, 0.15 * 0.02);
}

TEST(SampleSurface, PointsLieOnMeshAndAreDeterministic) {
  const TriMesh shell = shapes::garment_shell(30, 15);
  const PointCloud one = sample_surface(shell, 1, 0);
  ASSERT_EQ(one.points.size(), 1u);
  EXPECT_LT(distance_to(shell, one.points[0]), 1e-9);
  const PointCloud a = sample_surface(shell, 500, 17), b = sample_surface(shell, 500, 17);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(sample_surface(shell, 500, 18).points, a.points);
  for (const Vec3& p : a.points) ASSERT_LT(distance_to(shell, p), 1e-9);
  EXPECT_FALSE(a.nocs.has_value());
  EXPECT_THROW(sample_surface(shell, 0, 0), InvariantError);
  TriMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  flat.triangles = {{0, 1, 2}};
  EXPECT_THROW(sample_surface(flat, 10, 0), InvariantError);
}

TEST(SampleSurface, InterpolatesLabels) {
  const TriMesh lobes = shapes::two_lobes(2);
  const PointCloud cloud = sample_surface(lobes, 2000, 3);
  ASSERT_TRUE(cloud.nocs.has_value());
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    ASSERT_LT(((*cloud.nocs)[i] - cloud.points[i]).norm(), 1e-12);
}

TEST(Chamfer, SelfDistanceIsZero) {
  const TriMesh shell = shapes::garment_shell(40, 21);
  const ChamferResult r = chamfer(shell, shell, 3000, 9);
  EXPECT_EQ(r.symmetric_mean, 0.0);
  EXPECT_EQ(r.sample_count, 3000);
  EXPECT_EQ(r.seed, 9u);
}

TEST(Chamfer, TranslatedPlate) {
  const double d = 0.01;
  const TriMesh a = shapes::plate(0.0, 0.0, 0.0, 1.0, 10), b = shapes::plate(0.0, 0.0, d, 1.0, 10);
  const ChamferResult r = chamfer(a, b);
  EXPECT_GE(r.symmetric_mean, d * (1 - 1e-12));
  EXPECT_LE(r.symmetric_mean, 0.0105);
  const ChamferResult exact = chamfer_to_surface(a, b, 2000, 0);
  EXPECT_NEAR(exact.symmetric_mean, d, 1e-12);
}

TEST(Chamfer, SwapAndRigidMotion) {
  const TriMesh a = shapes::garment_shell(40, 21);
  const TriMesh b = shapes::icosphere(Vec3(0.5, 0.5, 0.5), 0.3, 2);
  const ChamferResult ab = chamfer(a, b, 2000, 4), ba = chamfer(b, a, 2000, 4);
  EXPECT_EQ(ab.accuracy_mean, ba.completeness_mean);
  EXPECT_EQ(ab.completeness_mean, ba.accuracy_mean);
  EXPECT_EQ(ab.symmetric_mean, ba.symmetric_mean);
  EXPECT_DOUBLE_EQ(ab.symmetric_mean, 0.5 * (ab.accuracy_mean + ab.completeness_mean));

  TriMesh ma = rotate_z(a, 0.7), mb = rotate_z(b, 0.7);
  for (Vec3& v : ma.vertices) v += Vec3(1.5, -2.0, 0.25);
  for (Vec3& v : mb.vertices) v += Vec3(1.5, -2.0, 0.25);
  EXPECT_NEAR(chamfer(ma, mb, 2000, 4).symmetric_mean, ab.symmetric_mean, 1e-9);
}

TEST(Chamfer, DirectedNeedsPoints) {
  const std::vector<Vec3> some{{0, 0, 0}};
  EXPECT_THROW(directed_chamfer(some, {}), InvariantError);
  EXPECT_THROW(directed_chamfer({}, some), InvariantError);
  EXPECT_DOUBLE_EQ(directed_chamfer(some, std::vector<Vec3>{{3, 4, 0}, {0, 0, 2}}), 2.0);
}

TEST(Correspondence, MirroredLabelsOnSymmetricShape) {
  const TriMesh gt = shapes::two_lobes(3);
  TriMesh pred = gt;
  for (Vec3& l : *pred.nocs_labels) l = mirror_nocs(l, Axis::x);
  EXPECT_EQ(correspondence_distance(gt, gt, 5000, 2), 0.0);
  const double dn = correspondence_distance(pred, gt, 5000, 2);
  // Each sample matches a point near its mirror image: mean |1 - 2x| over the lobes.
  const PointCloud s = sample_surface(pred, 5000, 2);
  double expect = 0.0;
  for (const Vec3& p : s.points) expect += std::abs(1.0 - 2.0 * p.x());
  expect /= s.points.size();
  EXPECT_NEAR(dn, expect, 0.02);
  EXPECT_GT(dn, 0.4);
  EXPECT_EQ(chamfer(pred, gt, 5000, 2).symmetric_mean, 0.0);
}

TEST(Correspondence, ConstantLabelsMatchFirstSample) {
  TriMesh gt = shapes::garment_shell(30, 15);
  // Zero labels interpolate to exactly zero, so every gt sample ties.
  gt.nocs_labels = std::vector<Vec3>(gt.vertices.size(), Vec3::Zero());
  TriMesh pred = gt;
  const PointCloud a = sample_surface(pred, 400, 6), b = sample_surface(gt, 400, 6);
  double expect = 0.0;
  for (const Vec3& p : a.points) expect += (p - b.points[0]).norm();
  EXPECT_DOUBLE_EQ(correspondence_distance(pred, gt, 400, 6), expect / 400);
}

TEST(Correspondence, RequiresLabels) {
  const TriMesh plain = shapes::box(Vec3::Zero(), Vec3::Ones());
  const TriMesh labeled = shapes::two_lobes(1);
  EXPECT_THROW(correspondence_distance(plain, labeled), InvariantError);
  EXPECT_THROW(correspondence_distance(labeled, plain), InvariantError);
}

TEST(NocsError, PlainAndSymmetricModes) {
  const std::vector<Vec3> gt{{0.1, 0.2, 0.3}, {0.9, 0.5, 0.5}, {0.4, 0.4, 0.0}};
  std::vector<Vec3> mirrored;
  for (const Vec3& g : gt) mirrored.push_back(mirror_nocs(g, Axis::x));
  EXPECT_EQ(nocs_error(gt, gt, false), 0.0);
  EXPECT_EQ(nocs_error(gt, gt, true), 0.0);
  EXPECT_NEAR(nocs_error(mirrored, gt, false), (0.8 + 0.8 + 0.2) / 3, 1e-12);
  EXPECT_EQ(nocs_error(mirrored, gt, true), 0.0);
  EXPECT_GT(nocs_error(mirrored, gt, true, Axis::y), 0.0);
  EXPECT_THROW(nocs_error(gt, std::vector<Vec3>(2), false), InvariantError);
}

TEST(Grasp, NearestToOriginWithTies) {
  PointCloud cloud;
  cloud.points = {{1, 0, 0}, {0, 0, 0.5}, {0.5, 0, 0}, {0, 0, 0}};
  cloud.nocs = std::vector<Vec3>{{0.1, 0.1, 0.1}, {0.2, 0.2, 0.2}, {0.3, 0.3, 0.3}, {0.4, 0.4, 0.4}};
  EXPECT_EQ(infer_grasp_nocs(cloud), Vec3(0.4, 0.4, 0.4));
  cloud.points[3] = Vec3(0, 0.5, 0);
  EXPECT_EQ(infer_grasp_nocs(cloud), Vec3(0.2, 0.2, 0.2));

  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(-1, 1);
  PointCloud random;
  random.nocs.emplace();
  for (int i = 0; i < 1000; ++i) {
    random.points.emplace_back(u(rng), u(rng), u(rng));
    random.nocs->emplace_back((u(rng) + 1) / 2, (u(rng) + 1) / 2, (u(rng) + 1) / 2);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < random.points.size(); ++i)
    if (random.points[i].norm() < random.points[best].norm()) best = i;
  EXPECT_EQ(infer_grasp_nocs(random), (*random.nocs)[best]);

  EXPECT_THROW(infer_grasp_nocs(PointCloud{}), InvariantError);
  random.nocs.reset();
  EXPECT_THROW(infer_grasp_nocs(random), InvariantError);
}

class Alignment : public ::testing::Test {
 protected:
  // Garment hanging from the origin, as in the gripper frame.
  static TriMesh hanging() {
    TriMesh m = shapes::garment_shell(60, 31);
    for (Vec3& v : m.vertices) v -= Vec3(0.35, 0.45, 0.9);
    return m;
  }
};

TEST_F(Alignment, RecoversKnownRotation) {
  const TriMesh pred = hanging();
  const PointCloud observed = sample_surface(rotate_z(pred, 37 * kDeg), 3000, 7);
  const AlignResult r = align_rotation_z(pred, observed, 72, 20, 5000, 0);
  EXPECT_NEAR(r.angle, 37 * kDeg, 1 * kDeg);
  ASSERT_EQ(r.coarse_objectives.size(), 72u);
  for (double c : r.coarse_objectives) EXPECT_LE(r.objective, c);
  EXPECT_EQ(r.aligned.vertices, rotate_z(pred, r.angle).vertices);

  const AlignResult again = align_rotation_z(pred, observed, 72, 20, 5000, 0);
  EXPECT_EQ(again.angle, r.angle);
  EXPECT_EQ(again.objective, r.objective);
}

TEST_F(Alignment, UnrotatedGivesZero) {
  const TriMesh pred = hanging();
  const AlignResult r = align_rotation_z(pred, sample_surface(pred, 3000, 8), 72, 20, 5000, 0);
  EXPECT_NEAR(r.angle, 0.0, 0.5 * kDeg);
  EXPECT_GT(r.angle, -std::numbers::pi);
  EXPECT_LE(r.angle, std::numbers::pi);
}

TEST_F(Alignment, SymmetricShapePicksLowestCoarseOptimum) {
  // A closed cylinder about z is optimal at every angle up to sampling noise.
  const TriMesh cyl = shapes::capless_cylinder(Vec3(0, 0, -1), 0.2, 0.8, 72, 8);
  const PointCloud observed = sample_surface(cyl, 2000, 9);
  const AlignResult r = align_rotation_z(cyl, observed, 12, 0, 4000, 1);
  const auto lowest = std::min_element(r.coarse_objectives.begin(), r.coarse_objectives.end());
  EXPECT_DOUBLE_EQ(r.angle, std::remainder(2 * std::numbers::pi / 12 * (lowest - r.coarse_objectives.begin()),
                                           2 * std::numbers::pi));
  EXPECT_EQ(r.objective, *lowest);
  // The spread over angles is sampling noise only.
  const auto highest = std::max_element(r.coarse_objectives.begin(), r.coarse_objectives.end());
  EXPECT_LT(*highest - *lowest, 0.1 * *lowest);
}

TEST_F(Alignment, DegenerateArguments) {
  const TriMesh pred = hanging();
  const PointCloud observed = sample_surface(pred, 500, 1);
  const AlignResult one = align_rotation_z(pred, observed, 1, 20, 2000, 0);
  EXPECT_EQ(one.angle, 0.0);
  EXPECT_EQ(one.coarse_objectives.size(), 1u);
  EXPECT_THROW(align_rotation_z(pred, PointCloud{}), InvariantError);
  EXPECT_THROW(align_rotation_z(pred, observed, 0), InvariantError);
  EXPECT_THROW(align_rotation_z(pred, observed, 8, -1), InvariantError);
}

}  // namespace
}  // namespace garmentkit
