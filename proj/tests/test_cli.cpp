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
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "garmentkit/feature_scatter.hpp"
#include "garmentkit/metrics.hpp"
#include "garmentkit/shapes.hpp"
#include "garmentkit/surface_extract.hpp"
#include "garmentkit/volb.hpp"
#include "test_util.hpp"

namespace garmentkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json read_json(const fs::path& p) {
  const auto bytes = testing::file_bytes(p);
  return json::parse(bytes.begin(), bytes.end());
}

PointCloud labeled_cloud(std::size_t n, int feature_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  c.nocs.emplace();
  c.confidence.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(u(rng), u(rng), u(rng));
    c.nocs->emplace_back(u(rng), u(rng), u(rng));
    c.confidence->emplace_back(u(rng), u(rng), u(rng));
  }
  if (feature_dim > 0) {
    c.feature_dim = feature_dim;
    c.features.emplace(n * feature_dim);
    for (float& f : *c.features) f = static_cast<float>(u(rng));
  }
  return c;
}

TEST(CliNormalize, CubeScale) {
  const auto dir = testing::scratch_dir();
  save_mesh(shapes::box(Vec3(1, 1, 1), Vec3(3, 3, 3)), dir / "cube.obj");
  const CliResult r = cli_run({"normalize", (dir / "cube.obj").string(), "--category", "tshirt", "--out-dir",
                         (dir / "out").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json t = read_json(dir / "out" / "transform.json");
  EXPECT_DOUBLE_EQ(t["scale"].get<double>(), 0.5);
  const TriMesh normalized = load_mesh(dir / "out" / "cube.obj");
  const Aabb b = normalized.bounds();
  EXPECT_NEAR((b.min - Vec3::Zero()).norm(), 0.0, 1e-12);
  EXPECT_NEAR((b.max - Vec3::Ones()).norm(), 0.0, 1e-12);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));

  // Re-applying the saved transform under the same category reproduces the output.
  const CliResult again = cli_run({"normalize", (dir / "cube.obj").string(), "--category", "tshirt", "--out-dir",
                             (dir / "again").string(), "--transform", (dir / "out" / "transform.json").string()});
  ASSERT_EQ(again.code, cli::kExitOk) << again.err;
  EXPECT_EQ(testing::file_bytes(dir / "out" / "cube.obj"), testing::file_bytes(dir / "again" / "cube.obj"));
}

TEST(CliNormalize, UsageErrors) {
  const auto dir = testing::scratch_dir();
  EXPECT_EQ(cli_run({"normalize", "--category", "tshirt", "--out-dir", dir.string()}).code, cli::kExitUsage);
  save_mesh(shapes::box(Vec3::Zero(), Vec3::Ones()), dir / "cube.obj");
  ASSERT_EQ(cli_run({"normalize", (dir / "cube.obj").string(), "--category", "tshirt", "--out-dir",
                     (dir / "a").string()}).code,
            cli::kExitOk);
  const CliResult mismatch = cli_run({"normalize", (dir / "cube.obj").string(), "--category", "dress", "--out-dir",
                                (dir / "b").string(), "--transform", (dir / "a" / "transform.json").string()});
  EXPECT_EQ(mismatch.code, cli::kExitUsage);
  EXPECT_NE(mismatch.err.find("tshirt"), std::string::npos);
  EXPECT_EQ(cli_run({}).code, cli::kExitUsage);
  EXPECT_EQ(cli_run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(cli_run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(cli_run({"--version"}).code, cli::kExitOk);
}

TEST(CliField, CubeWnf) {
  const auto dir = testing::scratch_dir();
  TriMesh cube = shapes::box(Vec3(0.2, 0.2, 0.2), Vec3(0.8, 0.8, 0.8));
  cube.frame = Frame::canonical;
  save_mesh(cube, dir / "cube.ply");
  const CliResult r = cli_run({"field", (dir / "cube.ply").string(), "--kind", "wnf", "--dims", "32", "-o",
                         (dir / "cube.volb").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const ScalarGrid g = read_volb(dir / "cube.volb");
  EXPECT_EQ(g.spec, canonical_grid(32));
  EXPECT_NEAR(g.at(16, 16, 16), 1.0, 0.01);
  EXPECT_NEAR(g.at(1, 1, 1), 0.0, 0.01);
  const json m = read_json(dir / "cube.volb.manifest.json");
  EXPECT_EQ(m["command"], "field");
  EXPECT_EQ(m["params"]["kind"], "wnf");
  EXPECT_EQ(m["version"], cli::kVersion);
  EXPECT_TRUE(m.contains("wall_time"));
}

TEST(CliField, OccupancyAndTsdfDefaults) {
  const auto dir = testing::scratch_dir();
  TriMesh shell = shapes::garment_shell(60, 31);
  shell.frame = Frame::canonical;
  save_mesh(shell, dir / "shell.ply");
  const CliResult occ = cli_run({"field", (dir / "shell.ply").string(), "--kind", "occ", "-o", (dir / "occ.volb").string()});
  ASSERT_EQ(occ.code, cli::kExitOk) << occ.err;
  const auto at = occ.out.find("occupancy_rate ");
  ASSERT_NE(at, std::string::npos);
  const double rate = std::stod(occ.out.substr(at + 15));
  EXPECT_GT(rate, 0.0);
  EXPECT_LT(rate, 0.02);
  EXPECT_EQ(read_volb(dir / "occ.volb").spec.dims, (std::array<int, 3>{64, 64, 64}));

  const CliResult tsdf = cli_run({"field", (dir / "shell.ply").string(), "--kind", "tsdf", "--dims", "16", "-o",
                            (dir / "t.volb").string()});
  ASSERT_EQ(tsdf.code, cli::kExitOk) << tsdf.err;
  const json m = read_json(dir / "t.volb.manifest.json");
  EXPECT_DOUBLE_EQ(m["params"]["trunc"].get<double>(), 10 * canonical_grid(16).voxel_size);
  EXPECT_EQ(read_volb(dir / "t.volb").trunc, m["params"]["trunc"].get<double>());

  EXPECT_EQ(cli_run({"field", (dir / "shell.ply").string(), "--kind", "sdf", "-o", (dir / "x.volb").string()}).code,
            cli::kExitUsage);
  EXPECT_EQ(cli_run({"field", (dir / "missing.ply").string(), "-o", (dir / "x.volb").string()}).code,
            cli::kExitFailure);
}

TEST(CliExtract, CylinderOpenings) {
  const auto dir = testing::scratch_dir();
  TriMesh cyl = shapes::capless_cylinder(Vec3(0.5, 0.5, 0.15), 0.15, 0.7, 64, 32);
  cyl.frame = Frame::canonical;
  save_mesh(cyl, dir / "cyl.ply");
  ASSERT_EQ(cli_run({"field", (dir / "cyl.ply").string(), "--dims", "48", "-o", (dir / "cyl.volb").string()}).code,
            cli::kExitOk);
  const CliResult r = cli_run({"extract", (dir / "cyl.volb").string(), "-o", (dir / "cyl_mc.ply").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const LabeledMesh labeled = load_labeled_mesh(dir / "cyl_mc.ply");
  EXPECT_GT(labeled.opening_count(), 0u);
  EXPECT_LT(labeled.opening_count(), labeled.mesh.vertex_count());
  // Vertices on the axis region of the end caps are openings; mid-height wall vertices are not.
  for (std::size_t v = 0; v < labeled.mesh.vertex_count(); ++v) {
    const Vec3& p = labeled.mesh.vertices[v];
    const double rho = std::hypot(p.x() - 0.5, p.y() - 0.5);
    if (rho < 0.05) EXPECT_TRUE(labeled.is_opening[v]);
    if (std::abs(p.z() - 0.5) < 0.1 && std::abs(rho - 0.15) < 0.03) EXPECT_FALSE(labeled.is_opening[v]);
  }
}

TEST(CliExtract, ConstantVolumeWarns) {
  const auto dir = testing::scratch_dir();
  const GridSpec spec{{8, 8, 8}, Vec3::Zero(), 0.125};
  write_volb(ScalarGrid{spec, FieldKind::wnf, std::vector<float>(512, 0.0f), {}}, dir / "flat.volb");
  const CliResult r = cli_run({"extract", (dir / "flat.volb").string(), "-o", (dir / "flat.ply").string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(load_labeled_mesh(dir / "flat.ply").mesh.vertex_count(), 0u);
  const CliResult high = cli_run({"extract", (dir / "flat.volb").string(), "--iso", "7", "-o", (dir / "h.ply").string()});
  EXPECT_EQ(high.code, cli::kExitOk);
  EXPECT_NE(high.err.find("warning"), std::string::npos);
}

TEST(CliScatter, SinglePointShuffleAndChannels) {
  const auto dir = testing::scratch_dir();
  save_point_cloud(labeled_cloud(1, 0, 1), dir / "one.ply");
  ASSERT_EQ(cli_run({"scatter", (dir / "one.ply").string(), "-o", (dir / "one.volb").string()}).code, cli::kExitOk);
  const FeatureVolume one = read_feature_volb(dir / "one.volb");
  EXPECT_EQ(one.dims, 32);
  EXPECT_EQ(std::count(one.occupancy_mask.begin(), one.occupancy_mask.end(), 1), 1);

  const PointCloud cloud = labeled_cloud(3000, kDefaultBackboneDim, 2);
  PointCloud shuffled = cloud;
  std::vector<std::size_t> order(cloud.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled.points[i] = cloud.points[order[i]];
    (*shuffled.nocs)[i] = (*cloud.nocs)[order[i]];
    (*shuffled.confidence)[i] = (*cloud.confidence)[order[i]];
    std::copy_n(cloud.features->data() + order[i] * 128, 128, shuffled.features->data() + i * 128);
  }
  save_point_cloud(cloud, dir / "a.ply");
  save_point_cloud(shuffled, dir / "b.ply");
  ASSERT_EQ(cli_run({"scatter", (dir / "a.ply").string(), "-o", (dir / "a.volb").string()}).code, cli::kExitOk);
  ASSERT_EQ(cli_run({"scatter", (dir / "b.ply").string(), "-o", (dir / "b.volb").string()}).code, cli::kExitOk);
  EXPECT_EQ(testing::file_bytes(dir / "a.volb"), testing::file_bytes(dir / "b.volb"));
  EXPECT_EQ(read_feature_volb(dir / "a.volb").channels, 137);

  PointCloud bare;
  bare.points = {{0, 0, 0}};
  save_point_cloud(bare, dir / "bare.ply");
  EXPECT_EQ(cli_run({"scatter", (dir / "bare.ply").string(), "-o", (dir / "c.volb").string()}).code,
            cli::kExitFailure);
}

TEST(CliEval, ChamferCorrAndNocs) {
  const auto dir = testing::scratch_dir();
  save_mesh(shapes::two_lobes(2), dir / "lobes.ply");
  save_mesh(shapes::box(Vec3::Zero(), Vec3::Ones()), dir / "box.ply");
  const std::string manifest = (dir / "eval.json").string();
  const CliResult self = cli_run({"--manifest", manifest, "eval", (dir / "lobes.ply").string(),
                            (dir / "lobes.ply").string(), "--n", "2000"});
  ASSERT_EQ(self.code, cli::kExitOk) << self.err;
  const json record = json::parse(self.out);
  EXPECT_EQ(record["metric"], "chamfer");
  EXPECT_EQ(record["value"].get<double>(), 0.0);
  EXPECT_EQ(record["n"], 2000);
  EXPECT_EQ(record["seed"], 0);
  EXPECT_EQ(record["units"], "native");
  EXPECT_TRUE(fs::exists(manifest));

  const CliResult again = cli_run({"--manifest", manifest, "eval", (dir / "lobes.ply").string(),
                             (dir / "box.ply").string(), "--n", "2000", "--seed", "5", "--units", "cm"});
  const CliResult repeat = cli_run({"--manifest", manifest, "eval", (dir / "lobes.ply").string(),
                              (dir / "box.ply").string(), "--n", "2000", "--seed", "5", "--units", "cm"});
  ASSERT_EQ(again.code, cli::kExitOk);
  EXPECT_EQ(again.out, repeat.out);
  EXPECT_NEAR(json::parse(again.out)["value"].get<double>(),
              100 * chamfer(load_mesh(dir / "lobes.ply"), load_mesh(dir / "box.ply"), 2000, 5).symmetric_mean,
              1e-9);

  const CliResult corr = cli_run({"--manifest", manifest, "eval", (dir / "box.ply").string(),
                            (dir / "lobes.ply").string(), "--metric", "corr"});
  EXPECT_EQ(corr.code, cli::kExitFailure);
  EXPECT_NE(corr.err.find("label"), std::string::npos);
  EXPECT_EQ(cli_run({"--manifest", manifest, "eval", (dir / "box.ply").string(), (dir / "box.ply").string(),
                     "--metric", "emd"}).code,
            cli::kExitUsage);

  PointCloud gt = labeled_cloud(50, 0, 4), mirrored = gt;
  for (Vec3& l : *mirrored.nocs) l = mirror_nocs(l, Axis::x);
  save_point_cloud(gt, dir / "gt.ply");
  save_point_cloud(mirrored, dir / "m.ply");
  const CliResult nocs = cli_run({"--manifest", manifest, "eval", (dir / "m.ply").string(), (dir / "gt.ply").string(),
                            "--metric", "nocs", "--symmetric", "-o", (dir / "nocs.json").string()});
  ASSERT_EQ(nocs.code, cli::kExitOk) << nocs.err;
  EXPECT_NEAR(read_json(dir / "nocs.json")["value"].get<double>(), 0.0, 1e-7);
}

TEST(CliAlign, RecoversRotation) {
  const auto dir = testing::scratch_dir();
  TriMesh pred = shapes::garment_shell(60, 31);
  for (Vec3& v : pred.vertices) v -= Vec3(0.35, 0.45, 0.9);
  save_mesh(pred, dir / "pred.ply");
  save_point_cloud(sample_surface(rotate_z(pred, 37 * std::numbers::pi / 180), 3000, 7), dir / "obs.ply");
  const CliResult r = cli_run({"align", (dir / "pred.ply").string(), (dir / "obs.ply").string(), "--n", "5000", "-o",
                         (dir / "aligned.ply").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NEAR(json::parse(r.out)["angle_deg"].get<double>(), 37.0, 1.0);
  EXPECT_TRUE(fs::exists(dir / "aligned.ply"));
  EXPECT_TRUE(fs::exists(dir / "aligned.ply.manifest.json"));

  const CliResult one = cli_run({"--manifest", (dir / "m.json").string(), "align", (dir / "pred.ply").string(),
                           (dir / "obs.ply").string(), "--steps", "1", "--n", "1000"});
  ASSERT_EQ(one.code, cli::kExitOk);
  EXPECT_EQ(json::parse(one.out)["angle"].get<double>(), 0.0);

  save_point_cloud(PointCloud{}, dir / "empty.ply");
  EXPECT_EQ(cli_run({"--manifest", (dir / "m.json").string(), "align", (dir / "pred.ply").string(),
                     (dir / "empty.ply").string()}).code,
            cli::kExitFailure);
  EXPECT_EQ(cli_run({"align", (dir / "pred.ply").string(), (dir / "obs.ply").string(), "--steps", "0"}).code,
            cli::kExitUsage);
}

TEST(CliManifest, IdenticalRunsDifferOnlyInWallTime) {
  const auto dir = testing::scratch_dir();
  TriMesh cube = shapes::box(Vec3(0.2, 0.2, 0.2), Vec3(0.8, 0.8, 0.8));
  cube.frame = Frame::canonical;
  save_mesh(cube, dir / "cube.ply");
  for (const char* name : {"a", "b"}) {
    const std::string threads = name[0] == 'a' ? "1" : "3";
    ASSERT_EQ(cli_run({"--threads", threads, "--manifest", (dir / (std::string(name) + ".json")).string(), "field",
                       (dir / "cube.ply").string(), "--dims", "24", "-o", (dir / "cube.volb").string()}).code,
              cli::kExitOk);
    fs::rename(dir / "cube.volb", dir / (std::string(name) + ".volb"));
  }
  EXPECT_EQ(testing::file_bytes(dir / "a.volb"), testing::file_bytes(dir / "b.volb"));
  json a = read_json(dir / "a.json"), b = read_json(dir / "b.json");
  for (json* j : {&a, &b}) {
    j->erase("wall_time");
    (*j)["params"].erase("threads");
  }
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace garmentkit
