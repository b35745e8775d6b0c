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

#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "garmentkit/diagnostics.hpp"
#include "garmentkit/feature_scatter.hpp"
#include "garmentkit/field_volume.hpp"
#include "garmentkit/mesh_io.hpp"
#include "garmentkit/metrics.hpp"
#include "garmentkit/nocs.hpp"
#include "garmentkit/parallel.hpp"
#include "garmentkit/surface_extract.hpp"
#include "garmentkit/volb.hpp"
#include "garmentkit/winding.hpp"

namespace garmentkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Semantic usage problems that CLI11 cannot catch; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Manifest {
  std::string command;
  json params = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
};

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

void write_manifest(const Manifest& m, const fs::path& path, double wall_time) {
  json j;
  j["command"] = m.command;
  j["params"] = m.params;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["seed"] = m.seed;
  j["version"] = kVersion;
  j["wall_time"] = wall_time;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write manifest " + path.string());
  f << j.dump(2) << "\n";
  if (!f) throw IoError("failed writing manifest " + path.string());
}

fs::path manifest_path(const std::string& explicit_path, const std::string& primary_output,
                       const std::string& command) {
  if (!explicit_path.empty()) return explicit_path;
  if (!primary_output.empty()) return primary_output + ".manifest.json";
  return command + ".manifest.json";
}

struct Options {
  // normalize
  std::vector<std::string> inputs;
  std::string category;
  std::string out_dir;
  std::string transform;
  // field
  std::string mesh;
  std::string kind = "wnf";
  std::optional<int> dims;
  std::optional<double> trunc;
  double beta = 2.0;
  std::string bounds = "auto";
  // extract
  std::string volume;
  double iso = kDefaultIsoLevel;
  double open_threshold = kDefaultOpeningThreshold;
  // scatter
  std::string cloud;
  int feature_dims = kDefaultFeatureDims;
  // eval / align
  std::string pred;
  std::string gt;
  std::string metric = "chamfer";
  std::int64_t n = kDefaultSampleCount;
  std::uint64_t seed = 0;
  std::string units = "native";
  bool symmetric = false;
  std::string mirror_axis = "x";
  std::string observed;
  int steps = 72;
  int refine = 20;
  // shared
  std::string out;
  std::string manifest;
  int threads = 0;
};

void cmd_normalize(const Options& o, Manifest& m, std::ostream& out) {
  if (o.inputs.empty()) throw UsageError("normalize needs at least one input mesh");
  if (o.category.empty()) throw UsageError("normalize needs --category");
  std::vector<TriMesh> meshes;
  for (const auto& p : o.inputs) meshes.push_back(load_mesh(p));

  NocsTransform t;
  if (!o.transform.empty()) {
    t = load_nocs_transform(o.transform);
    if (t.category_id != o.category)
      throw UsageError("transform " + o.transform + " belongs to category '" + t.category_id +
                       "', not '" + o.category + "'");
    m.inputs.push_back(o.transform);
  } else {
    t = fit_category_transform(meshes, o.category);
  }

  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  const fs::path transform_path = dir / "transform.json";
  if (o.transform.empty()) {
    save_nocs_transform(t, transform_path);
    m.outputs.push_back(transform_path.string());
  }
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const fs::path src(o.inputs[i]);
    const fs::path dst = dir / src.filename();
    save_mesh(apply_nocs(t, meshes[i]), dst);
    m.inputs.push_back(o.inputs[i]);
    m.outputs.push_back(dst.string());
  }
  m.params = {{"category", o.category},
              {"scale", t.scale},
              {"translation", vec_json(t.translation)},
              {"fitted", o.transform.empty()}};
  out << to_json(t) << "\n";
}

GridSpec field_grid(const TriMesh& mesh, const std::string& bounds, int dims) {
  if (bounds == "unit") return canonical_grid(dims);
  if (bounds == "mesh") return grid_for_bounds(mesh.bounds(), dims);
  if (bounds == "auto")
    return mesh.frame == Frame::canonical ? canonical_grid(dims) : grid_for_bounds(mesh.bounds(), dims);
  throw UsageError("unknown --bounds value '" + bounds + "' (expected auto, unit or mesh)");
}

void cmd_field(const Options& o, Manifest& m, std::ostream& out) {
  FieldKind kind;
  try {
    kind = parse_field_kind(o.kind);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const int dims = o.dims.value_or(kind == FieldKind::occupancy ? kDefaultOccupancyDims : kDefaultFieldDims);
  const TriMesh mesh = load_mesh(o.mesh);
  const GridSpec spec = field_grid(mesh, o.bounds, dims);
  const WindingQueryParams params{o.beta, false};

  ScalarGrid grid;
  std::optional<double> trunc;
  if (kind == FieldKind::occupancy) {
    grid = rasterize_occupancy(mesh, spec);
  } else {
    const WindingAccel accel = build_accel(mesh);
    if (kind == FieldKind::wnf) {
      grid = rasterize_wnf(mesh, spec, accel, params);
    } else {
      trunc = o.trunc.value_or(default_trunc(spec));
      grid = kind == FieldKind::tsdf ? rasterize_tsdf(mesh, spec, *trunc, accel, params)
                                     : rasterize_tdf(mesh, spec, *trunc, accel);
    }
  }
  write_volb(grid, o.out);

  m.inputs.push_back(o.mesh);
  m.outputs.push_back(o.out);
  m.params = {{"kind", to_string(kind)},
              {"dims", dims},
              {"bounds", o.bounds},
              {"origin", vec_json(spec.origin)},
              {"voxel_size", spec.voxel_size}};
  if (kind == FieldKind::wnf || kind == FieldKind::tsdf) m.params["beta"] = o.beta;
  if (trunc) m.params["trunc"] = *trunc;

  out << "wrote " << to_string(kind) << " volume " << dims << "^3 to " << o.out << "\n";
  if (kind == FieldKind::occupancy) {
    const double rate = occupancy_rate(grid);
    m.params["occupancy_rate"] = rate;
    out << "occupancy_rate " << rate << "\n";
  }
}

void cmd_extract(const Options& o, Manifest& m, std::ostream& out) {
  const ScalarGrid grid = read_volb(o.volume);
  const TriMesh surface = marching_cubes(grid, o.iso);
  const double threshold = opening_threshold(grid.spec, o.open_threshold);
  const LabeledMesh labeled = classify_openings(surface, grid, threshold, o.iso);
  save_labeled_mesh(labeled, o.out);

  m.inputs.push_back(o.volume);
  m.outputs.push_back(o.out);
  m.params = {{"iso", o.iso},
              {"open_threshold", o.open_threshold},
              {"threshold_absolute", threshold},
              {"vertices", labeled.mesh.vertex_count()},
              {"triangles", labeled.mesh.triangle_count()},
              {"opening_vertices", labeled.opening_count()}};
  out << "extracted " << labeled.mesh.vertex_count() << " vertices, " << labeled.mesh.triangle_count()
      << " triangles, " << labeled.opening_count() << " opening vertices\n";
}

void cmd_scatter(const Options& o, Manifest& m, std::ostream& out) {
  if (o.feature_dims < 1) throw UsageError("--dims must be positive");
  const PointCloud cloud = load_point_cloud(o.cloud);
  const ScatterInput input = assemble_features(cloud);
  const FeatureVolume volume = scatter_max(input, o.feature_dims);
  write_volb(volume, o.out);

  m.inputs.push_back(o.cloud);
  m.outputs.push_back(o.out);
  m.params = {{"dims", o.feature_dims}, {"channels", volume.channels}, {"points", cloud.size()}};
  out << "scattered " << cloud.size() << " points into " << o.feature_dims << "^3 x " << volume.channels
      << " channels\n";
}

void cmd_eval(const Options& o, Manifest& m, std::ostream& out) {
  if (o.units != "native" && o.units != "cm") throw UsageError("--units must be native or cm");
  if (o.n < 1) throw UsageError("--n must be positive");
  const double scale = o.units == "cm" ? 100.0 : 1.0;
  json record = {{"metric", o.metric}, {"n", o.n}, {"seed", o.seed}, {"units", o.units}};

  if (o.metric == "chamfer") {
    const ChamferResult r = chamfer(load_mesh(o.pred), load_mesh(o.gt), o.n, o.seed);
    record["value"] = scale * r.symmetric_mean;
    record["accuracy"] = scale * r.accuracy_mean;
    record["completeness"] = scale * r.completeness_mean;
  } else if (o.metric == "corr") {
    record["value"] = scale * correspondence_distance(load_mesh(o.pred), load_mesh(o.gt), o.n, o.seed);
  } else if (o.metric == "nocs") {
    const PointCloud pred = load_point_cloud(o.pred);
    const PointCloud gt = load_point_cloud(o.gt);
    if (!pred.nocs || !gt.nocs) throw InvariantError("nocs metric requires NOCS labels on both inputs");
    Axis axis;
    try {
      axis = parse_axis(o.mirror_axis);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    // NOCS space is unitless; no display scale applies.
    record["value"] = nocs_error(*pred.nocs, *gt.nocs, o.symmetric, axis);
    record["units"] = "nocs";
    record["n"] = pred.nocs->size();
    record["symmetric"] = o.symmetric;
  } else {
    throw UsageError("unknown --metric '" + o.metric + "' (expected chamfer, corr or nocs)");
  }

  const std::string text = record.dump();
  out << text << "\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot write " + o.out);
    f << text << "\n";
    m.outputs.push_back(o.out);
  }
  m.inputs = {o.pred, o.gt};
  m.params = {{"metric", o.metric}, {"n", o.n}, {"units", o.units}};
  if (o.metric == "nocs") {
    m.params["symmetric"] = o.symmetric;
    m.params["mirror_axis"] = o.mirror_axis;
  }
}

void cmd_align(const Options& o, Manifest& m, std::ostream& out) {
  if (o.steps < 1) throw UsageError("--steps must be at least 1");
  if (o.refine < 0) throw UsageError("--refine must be non-negative");
  const TriMesh pred = load_mesh(o.pred);
  const PointCloud observed = load_point_cloud(o.observed);
  const AlignResult r = align_rotation_z(pred, observed, o.steps, o.refine, o.n, o.seed);
  if (!o.out.empty()) {
    save_mesh(r.aligned, o.out);
    m.outputs.push_back(o.out);
  }
  m.inputs = {o.pred, o.observed};
  m.params = {{"steps", o.steps}, {"refine", o.refine}, {"n", o.n}, {"angle", r.angle},
              {"objective", r.objective}};
  const json record = {{"angle", r.angle},
                       {"angle_deg", r.angle * 180.0 / std::numbers::pi},
                       {"objective", r.objective},
                       {"seed", o.seed}};
  out << record.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"garmentkit: winding-number fields, canonical coordinates and garment metrics", "garmentkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;
  app.add_option("--threads", o.threads, "Worker thread cap (0: GARMENTKIT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--manifest", o.manifest, "Manifest path (default: <output>.manifest.json)");

  auto* normalize = app.add_subcommand("normalize", "Fit or apply a category NOCS transform");
  normalize->add_option("inputs", o.inputs, "Input meshes (OBJ or PLY)");
  normalize->add_option("--category", o.category, "Category id")->required();
  normalize->add_option("--out-dir", o.out_dir, "Output directory")->required();
  normalize->add_option("--transform", o.transform, "Apply an existing transform instead of fitting");

  auto* field = app.add_subcommand("field", "Rasterize a mesh into a scalar volume");
  field->add_option("mesh", o.mesh, "Input mesh")->required();
  field->add_option("--kind", o.kind, "wnf, occ, tsdf or tdf")->capture_default_str();
  field->add_option("--dims", o.dims, "Grid resolution (default 128, 64 for occ)");
  field->add_option("--trunc", o.trunc, "Truncation distance for tsdf/tdf (default 10 voxels)");
  field->add_option("--beta", o.beta, "Far-field acceptance ratio")->capture_default_str();
  field->add_option("--bounds", o.bounds, "auto, unit or mesh")->capture_default_str();
  field->add_option("-o,--out", o.out, "Output .volb")->required();

  auto* extract = app.add_subcommand("extract", "Marching cubes with opening labels");
  extract->add_option("volume", o.volume, "Input .volb")->required();
  extract->add_option("--iso", o.iso, "Iso level")->capture_default_str();
  extract->add_option("--open-threshold", o.open_threshold, "Gradient threshold in units of 1/h")
      ->capture_default_str();
  extract->add_option("-o,--out", o.out, "Output labeled .ply")->required();

  auto* scatter = app.add_subcommand("scatter", "Scatter point features into a feature volume");
  scatter->add_option("cloud", o.cloud, "Input point cloud PLY")->required();
  scatter->add_option("--dims", o.feature_dims, "Volume resolution")->capture_default_str();
  scatter->add_option("-o,--out", o.out, "Output .volb")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a prediction against ground truth");
  eval->add_option("pred", o.pred, "Predicted mesh or labeled cloud")->required();
  eval->add_option("gt", o.gt, "Ground-truth mesh or labeled cloud")->required();
  eval->add_option("--metric", o.metric, "chamfer, corr or nocs")->capture_default_str();
  eval->add_option("--n", o.n, "Samples per mesh")->capture_default_str();
  eval->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  eval->add_option("--units", o.units, "native or cm")->capture_default_str();
  eval->add_flag("--symmetric", o.symmetric, "nocs: also score against mirrored labels");
  eval->add_option("--mirror-axis", o.mirror_axis, "nocs: mirror axis")->capture_default_str();
  eval->add_option("-o,--out", o.out, "Also write the JSON record here");

  auto* align = app.add_subcommand("align", "Align a mesh to an observation about the z axis");
  align->add_option("pred", o.pred, "Mesh in the task frame")->required();
  align->add_option("observed", o.observed, "Observed point cloud PLY")->required();
  align->add_option("--steps", o.steps, "Coarse angle count")->capture_default_str();
  align->add_option("--refine", o.refine, "Golden-section iterations")->capture_default_str();
  align->add_option("--n", o.n, "Samples drawn from pred")->capture_default_str();
  align->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  align->add_option("-o,--out", o.out, "Aligned mesh output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_thread_count(o.threads);
  auto previous = set_warning_handler([&err](const std::string& msg) { err << "warning: " << msg << "\n"; });
  struct Restore {
    WarningHandler& handler;
    ~Restore() { set_warning_handler(handler); }
  } restore{previous};

  Manifest m;
  m.command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    if (m.command == "normalize") {
      cmd_normalize(o, m, out);
    } else if (m.command == "field") {
      cmd_field(o, m, out);
    } else if (m.command == "extract") {
      cmd_extract(o, m, out);
    } else if (m.command == "scatter") {
      cmd_scatter(o, m, out);
    } else if (m.command == "eval") {
      cmd_eval(o, m, out);
      m.seed = o.seed;
    } else {
      cmd_align(o, m, out);
      m.seed = o.seed;
    }
    m.params["threads"] = o.threads;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const fs::path mpath = m.command == "normalize" && o.manifest.empty()
                               ? fs::path(o.out_dir) / "manifest.json"
                               : manifest_path(o.manifest, o.out, m.command);
    write_manifest(m, mpath, wall);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace garmentkit::cli
