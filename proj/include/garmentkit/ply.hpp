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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "garmentkit/geometry.hpp"

namespace garmentkit {

enum class PlyScalar { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

/// One scalar vertex property. Values are widened to double on read and
/// narrowed to the declared type on write.
struct PlyColumn {
  std::string name;
  PlyScalar type = PlyScalar::float32;
  std::vector<double> values;
};

/// Minimal PLY document: the vertex element's scalar properties plus an
/// optional triangle face element. Other elements are skipped on read.
struct PlyDocument {
  std::vector<std::string> comments;
  std::size_t vertex_count = 0;
  std::vector<PlyColumn> vertex_columns;
  bool has_faces = false;
  std::vector<Triangle> faces;
  /// Source line (ASCII) or byte offset (binary) of each face, for messages.
  std::vector<std::size_t> face_locations;
  bool locations_are_lines = false;

  const PlyColumn* find(std::string_view name) const;
  /// Throws ParseError when the column is absent.
  const PlyColumn& require(std::string_view name) const;
};

/// Reads ASCII or binary little-endian PLY. Faces must be triangles.
PlyDocument read_ply(const std::filesystem::path& path);

/// Writes binary little-endian PLY with the document's columns in order.
void write_ply(const std::filesystem::path& path, const PlyDocument& doc);

}  // namespace garmentkit
