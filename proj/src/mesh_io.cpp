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
#include "garmentkit/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "garmentkit/ply.hpp"

namespace garmentkit {
namespace {

constexpr const char* kFrameTask = "frame task";
constexpr const char* kFrameCanonical = "frame canonical";

const char* frame_comment(Frame f) { return f == Frame::canonical ? kFrameCanonical : kFrameTask; }

void check_triangles(const std::vector<Triangle>& tris, std::size_t n_vertices,
                     const std::vector<std::string>* context) {
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const Triangle& tri = tris[t];
    auto prefix = [&] {
      return context ? (*context)[t] : "triangle " + std::to_string(t) + ": ";
    };
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || static_cast<std::size_t>(tri[k]) >= n_vertices) {
        throw InvariantError(prefix() + "vertex index " + std::to_string(tri[k]) +
                             " out of range (" + std::to_string(n_vertices) + " vertices)");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw InvariantError(prefix() + "triangle references the same vertex twice");
  }
}

bool in_unit_cube(const Vec3& p) {
  return (p.array() >= 0.0).all() && (p.array() <= 1.0).all();
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view tok, const std::string& context) {
  double v = 0.0;
  const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
    throw ParseError(context + "invalid number '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  TriMesh mesh;
  std::vector<std::string> face_context;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = path.string() + ":" + std::to_string(line_no) + ": ";
    std::string_view sv(line);
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    if (sv.starts_with("#")) {
      if (sv == std::string("# ") + kFrameCanonical) mesh.frame = Frame::canonical;
      continue;
    }
    const auto tok = tokens(sv);
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError(ctx + "vertex needs 3 coordinates");
      mesh.vertices.emplace_back(parse_double(tok[1], ctx), parse_double(tok[2], ctx),
                                 parse_double(tok[3], ctx));
    } else if (tok[0] == "f") {
      if (tok.size() != 4)
        throw ParseError(ctx + "face with " + std::to_string(tok.size() - 1) +
                         " vertices; only triangles are supported");
      Triangle t{};
      for (int k = 0; k < 3; ++k) {
        std::string_view idx = tok[k + 1];
        idx = idx.substr(0, idx.find('/'));
        long long v = 0;
        const auto r = std::from_chars(idx.data(), idx.data() + idx.size(), v);
        if (r.ec != std::errc() || r.ptr != idx.data() + idx.size() || v == 0)
          throw ParseError(ctx + "invalid face index '" + std::string(tok[k + 1]) + "'");
        // OBJ is 1-based; negative indices count back from the latest vertex.
        const long long zero_based =
            v > 0 ? v - 1 : static_cast<long long>(mesh.vertices.size()) + v;
        t[k] = static_cast<std::int32_t>(std::clamp<long long>(zero_based, -1, 2147483647LL));
      }
      mesh.triangles.push_back(t);
      face_context.push_back(ctx);
    }
    // vn, vt, o, g, s, usemtl, mtllib ... carry nothing we keep.
  }
  check_triangles(mesh.triangles, mesh.vertices.size(), &face_context);
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  if (mesh.nocs_labels)
    throw InvariantError("OBJ cannot store per-vertex NOCS labels; save as PLY instead");
  std::string out;
  out += "# ";
  out += frame_comment(mesh.frame);
  out += "\n";
  for (const Vec3& v : mesh.vertices)
    out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  for (const Triangle& t : mesh.triangles)
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
           std::to_string(t[2] + 1) + "\n";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << out;
  if (!f) throw IoError("write failed: " + path.string());
}

std::vector<Vec3> gather_vec3(const PlyDocument& doc, const char* x, const char* y, const char* z) {
  const auto& cx = doc.require(x).values;
  const auto& cy = doc.require(y).values;
  const auto& cz = doc.require(z).values;
  std::vector<Vec3> out(doc.vertex_count);
  for (std::size_t i = 0; i < doc.vertex_count; ++i) out[i] = Vec3(cx[i], cy[i], cz[i]);
  return out;
}

void push_vec3(PlyDocument& doc, const std::vector<Vec3>& values, const char* x, const char* y,
               const char* z, PlyScalar type = PlyScalar::float32, double scale = 1.0) {
  const char* names[3] = {x, y, z};
  for (int a = 0; a < 3; ++a) {
    PlyColumn c{names[a], type, {}};
    c.values.reserve(values.size());
    for (const Vec3& v : values) c.values.push_back(v[a] * scale);
    doc.vertex_columns.push_back(std::move(c));
  }
}

Frame frame_from_comments(const std::vector<std::string>& comments) {
  for (const auto& c : comments)
    if (c == kFrameCanonical) return Frame::canonical;
  return Frame::task;
}

TriMesh load_ply_mesh(const std::filesystem::path& path) {
  const PlyDocument doc = read_ply(path);
  TriMesh mesh;
  mesh.frame = frame_from_comments(doc.comments);
  mesh.vertices = gather_vec3(doc, "x", "y", "z");
  if (doc.find("nocs_x")) mesh.nocs_labels = gather_vec3(doc, "nocs_x", "nocs_y", "nocs_z");
  mesh.triangles = doc.faces;
  std::vector<std::string> context;
  context.reserve(doc.faces.size());
  for (std::size_t f = 0; f < doc.faces.size(); ++f) {
    std::ostringstream os;
    os << path.string() << (doc.locations_are_lines ? ":" : " @byte ") << doc.face_locations[f]
       << ": ";
    context.push_back(os.str());
  }
  check_triangles(mesh.triangles, mesh.vertices.size(), &context);
  if (mesh.nocs_labels) {
    for (std::size_t i = 0; i < mesh.nocs_labels->size(); ++i)
      if (!in_unit_cube((*mesh.nocs_labels)[i]))
        throw InvariantError(path.string() + ": vertex " + std::to_string(i) +
                             " has a NOCS label outside [0,1]^3");
  }
  return mesh;
}

void save_ply_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  PlyDocument doc;
  doc.comments.push_back(frame_comment(mesh.frame));
  doc.vertex_count = mesh.vertices.size();
  push_vec3(doc, mesh.vertices, "x", "y", "z");
  if (mesh.nocs_labels) push_vec3(doc, *mesh.nocs_labels, "nocs_x", "nocs_y", "nocs_z");
  doc.has_faces = true;
  doc.faces = mesh.triangles;
  write_ply(path, doc);
}

}  // namespace

void check_invariants(const TriMesh& mesh) {
  check_triangles(mesh.triangles, mesh.vertices.size(), nullptr);
  if (mesh.nocs_labels) {
    if (mesh.nocs_labels->size() != mesh.vertices.size())
      throw InvariantError("nocs_labels length " + std::to_string(mesh.nocs_labels->size()) +
                           " does not match vertex count " + std::to_string(mesh.vertices.size()));
    for (std::size_t i = 0; i < mesh.nocs_labels->size(); ++i)
      if (!in_unit_cube((*mesh.nocs_labels)[i]))
        throw InvariantError("vertex " + std::to_string(i) + " has a NOCS label outside [0,1]^3");
  }
}

void check_invariants(const PointCloud& cloud) {
  const std::size_t n = cloud.points.size();
  auto check_len = [n](std::size_t len, const char* what) {
    if (len != n)
      throw InvariantError(std::string(what) + " channel length " + std::to_string(len) +
                           " does not match point count " + std::to_string(n));
  };
  if (cloud.colors) check_len(cloud.colors->size(), "colors");
  if (cloud.nocs) check_len(cloud.nocs->size(), "nocs");
  if (cloud.confidence) check_len(cloud.confidence->size(), "confidence");
  if (cloud.features) {
    if (cloud.feature_dim < 0) throw InvariantError("negative feature dimension");
    const std::size_t expected = n * static_cast<std::size_t>(cloud.feature_dim);
    if (cloud.features->size() != expected)
      throw InvariantError("features buffer holds " + std::to_string(cloud.features->size()) +
                           " values, expected " + std::to_string(expected));
  }
}

MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".ply") return MeshFormat::ply;
  throw IoError("cannot infer mesh format from extension of " + path.string());
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  return format == MeshFormat::obj ? load_obj(path) : load_ply_mesh(path);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, format_from_extension(path));
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  check_invariants(mesh);
  if (format == MeshFormat::obj)
    save_obj(mesh, path);
  else
    save_ply_mesh(mesh, path);
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  save_mesh(mesh, path, format_from_extension(path));
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  const PlyDocument doc = read_ply(path);
  PointCloud cloud;
  cloud.points = gather_vec3(doc, "x", "y", "z");
  if (const PlyColumn* r = doc.find("red")) {
    const bool bytes = r->type == PlyScalar::uint8;
    auto colors = gather_vec3(doc, "red", "green", "blue");
    if (bytes)
      for (Vec3& c : colors) c /= 255.0;
    cloud.colors = std::move(colors);
  }
  if (doc.find("nocs_x")) cloud.nocs = gather_vec3(doc, "nocs_x", "nocs_y", "nocs_z");
  if (doc.find("conf_x")) cloud.confidence = gather_vec3(doc, "conf_x", "conf_y", "conf_z");
  int dim = 0;
  while (doc.find("feat_" + std::to_string(dim))) ++dim;
  if (dim > 0) {
    std::vector<float> features(doc.vertex_count * dim);
    for (int c = 0; c < dim; ++c) {
      const auto& col = doc.require("feat_" + std::to_string(c)).values;
      for (std::size_t i = 0; i < doc.vertex_count; ++i)
        features[i * dim + c] = static_cast<float>(col[i]);
    }
    cloud.features = std::move(features);
    cloud.feature_dim = dim;
  }
  check_invariants(cloud);
  return cloud;
}

void save_point_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  check_invariants(cloud);
  PlyDocument doc;
  doc.vertex_count = cloud.points.size();
  push_vec3(doc, cloud.points, "x", "y", "z");
  if (cloud.colors) push_vec3(doc, *cloud.colors, "red", "green", "blue", PlyScalar::uint8, 255.0);
  if (cloud.nocs) push_vec3(doc, *cloud.nocs, "nocs_x", "nocs_y", "nocs_z");
  if (cloud.confidence) push_vec3(doc, *cloud.confidence, "conf_x", "conf_y", "conf_z");
  if (cloud.features) {
    for (int c = 0; c < cloud.feature_dim; ++c) {
      PlyColumn col{"feat_" + std::to_string(c), PlyScalar::float32, {}};
      col.values.reserve(doc.vertex_count);
      for (std::size_t i = 0; i < doc.vertex_count; ++i)
        col.values.push_back((*cloud.features)[i * cloud.feature_dim + c]);
      doc.vertex_columns.push_back(std::move(col));
    }
  }
  write_ply(path, doc);
}

ValidationReport validate(const TriMesh& mesh, double area_epsilon) {
  ValidationReport report;
  if (!mesh.vertices.empty()) report.bbox = mesh.bounds();
  else report.bbox = Aabb{Vec3::Zero(), Vec3::Zero()};

  const auto n = static_cast<std::int64_t>(mesh.vertices.size());
  auto valid = [n](const Triangle& t) {
    return t[0] >= 0 && t[1] >= 0 && t[2] >= 0 && t[0] < n && t[1] < n && t[2] < n;
  };

  for (const Triangle& t : mesh.triangles) {
    if (!valid(t)) continue;
    if (triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < area_epsilon)
      ++report.degenerate_triangle_count;
  }

  std::vector<std::size_t> order(mesh.vertices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto lex_less = [&](std::size_t a, std::size_t b) {
    const Vec3& p = mesh.vertices[a];
    const Vec3& q = mesh.vertices[b];
    if (p.x() != q.x()) return p.x() < q.x();
    if (p.y() != q.y()) return p.y() < q.y();
    return p.z() < q.z();
  };
  std::sort(order.begin(), order.end(), lex_less);
  for (std::size_t i = 1; i < order.size(); ++i)
    if (mesh.vertices[order[i]] == mesh.vertices[order[i - 1]]) ++report.duplicate_vertex_count;

  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  auto key = [](std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  };
  bool all_valid = true;
  for (const Triangle& t : mesh.triangles) {
    if (!valid(t)) {
      all_valid = false;
      continue;
    }
    for (int k = 0; k < 3; ++k) ++directed[key(t[k], t[(k + 1) % 3])];
  }
  bool watertight = all_valid && !mesh.triangles.empty();
  for (const auto& [k, count] : directed) {
    if (!watertight) break;
    const auto a = static_cast<std::int32_t>(k >> 32);
    const auto b = static_cast<std::int32_t>(k & 0xffffffffu);
    const auto it = directed.find(key(b, a));
    if (count != 1 || it == directed.end() || it->second != 1) watertight = false;
  }
  report.is_watertight = watertight;
  return report;
}

}  // namespace garmentkit
