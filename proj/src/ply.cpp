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

#include "garmentkit/ply.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "binary PLY/VOLB I/O assumes a little-endian host");

namespace garmentkit {
namespace {

struct PropertyDecl {
  std::string name;
  PlyScalar type = PlyScalar::float32;
  bool is_list = false;
  PlyScalar count_type = PlyScalar::uint8;
};

struct ElementDecl {
  std::string name;
  std::size_t count = 0;
  std::vector<PropertyDecl> properties;
};

std::optional<PlyScalar> parse_scalar(std::string_view s) {
  if (s == "char" || s == "int8") return PlyScalar::int8;
  if (s == "uchar" || s == "uint8") return PlyScalar::uint8;
  if (s == "short" || s == "int16") return PlyScalar::int16;
  if (s == "ushort" || s == "uint16") return PlyScalar::uint16;
  if (s == "int" || s == "int32") return PlyScalar::int32;
  if (s == "uint" || s == "uint32") return PlyScalar::uint32;
  if (s == "float" || s == "float32") return PlyScalar::float32;
  if (s == "double" || s == "float64") return PlyScalar::float64;
  return std::nullopt;
}

const char* scalar_name(PlyScalar t) {
  switch (t) {
    case PlyScalar::int8: return "char";
    case PlyScalar::uint8: return "uchar";
    case PlyScalar::int16: return "short";
    case PlyScalar::uint16: return "ushort";
    case PlyScalar::int32: return "int";
    case PlyScalar::uint32: return "uint";
    case PlyScalar::float32: return "float";
    case PlyScalar::float64: return "double";
  }
  return "float";
}

std::size_t scalar_size(PlyScalar t) {
  switch (t) {
    case PlyScalar::int8:
    case PlyScalar::uint8: return 1;
    case PlyScalar::int16:
    case PlyScalar::uint16: return 2;
    case PlyScalar::int32:
    case PlyScalar::uint32:
    case PlyScalar::float32: return 4;
    case PlyScalar::float64: return 8;
  }
  return 4;
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double decode_binary(PlyScalar t, const char* p) {
  switch (t) {
    case PlyScalar::int8: return load_le<std::int8_t>(p);
    case PlyScalar::uint8: return load_le<std::uint8_t>(p);
    case PlyScalar::int16: return load_le<std::int16_t>(p);
    case PlyScalar::uint16: return load_le<std::uint16_t>(p);
    case PlyScalar::int32: return load_le<std::int32_t>(p);
    case PlyScalar::uint32: return load_le<std::uint32_t>(p);
    case PlyScalar::float32: return load_le<float>(p);
    case PlyScalar::float64: return load_le<double>(p);
  }
  return 0.0;
}

template <typename T>
void store_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void encode_binary(std::string& out, PlyScalar t, double v) {
  auto clamp_round = [](double x, double lo, double hi) {
    return std::clamp(std::nearbyint(x), lo, hi);
  };
  switch (t) {
    case PlyScalar::int8: store_le(out, static_cast<std::int8_t>(clamp_round(v, -128, 127))); break;
    case PlyScalar::uint8: store_le(out, static_cast<std::uint8_t>(clamp_round(v, 0, 255))); break;
    case PlyScalar::int16: store_le(out, static_cast<std::int16_t>(clamp_round(v, -32768, 32767))); break;
    case PlyScalar::uint16: store_le(out, static_cast<std::uint16_t>(clamp_round(v, 0, 65535))); break;
    case PlyScalar::int32: store_le(out, static_cast<std::int32_t>(clamp_round(v, -2147483648.0, 2147483647.0))); break;
    case PlyScalar::uint32: store_le(out, static_cast<std::uint32_t>(clamp_round(v, 0, 4294967295.0))); break;
    case PlyScalar::float32: store_le(out, static_cast<float>(v)); break;
    case PlyScalar::float64: store_le(out, v); break;
  }
}

std::vector<std::string_view> split_ws(std::string_view line) {
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

std::string where(const std::filesystem::path& path, std::size_t loc, bool line) {
  std::ostringstream os;
  os << path.string() << (line ? ":" : " @byte ") << loc << ": ";
  return os.str();
}

// Sequential reader over the body in either encoding.
class BodyReader {
 public:
  BodyReader(const std::filesystem::path& path, std::string_view body,
             std::size_t body_offset, std::size_t first_line, bool ascii)
      : path_(path), body_(body), base_(body_offset), line_(first_line), ascii_(ascii) {}

  double next(PlyScalar type) {
    if (!ascii_) {
      const std::size_t n = scalar_size(type);
      if (pos_ + n > body_.size())
        throw ParseError(where(path_, base_ + pos_, false) + "unexpected end of binary data");
      const double v = decode_binary(type, body_.data() + pos_);
      pos_ += n;
      return v;
    }
    skip_space();
    if (pos_ >= body_.size())
      throw ParseError(where(path_, line_, true) + "unexpected end of ASCII data");
    std::size_t end = pos_;
    while (end < body_.size() && !std::isspace(static_cast<unsigned char>(body_[end]))) ++end;
    const std::string_view tok = body_.substr(pos_, end - pos_);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParseError(where(path_, line_, true) + "invalid number '" + std::string(tok) + "'");
    pos_ = end;
    return v;
  }

  // Location of the next value: line number (ASCII) or absolute byte offset.
  std::size_t location() {
    if (ascii_) {
      skip_space();
      return line_;
    }
    return base_ + pos_;
  }

 private:
  void skip_space() {
    while (pos_ < body_.size() && std::isspace(static_cast<unsigned char>(body_[pos_]))) {
      if (body_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  const std::filesystem::path& path_;
  std::string_view body_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::size_t line_;
  bool ascii_;
};

}  // namespace

const PlyColumn* PlyDocument::find(std::string_view name) const {
  for (const auto& c : vertex_columns)
    if (c.name == name) return &c;
  return nullptr;
}

const PlyColumn& PlyDocument::require(std::string_view name) const {
  if (const PlyColumn* c = find(name)) return *c;
  throw ParseError("PLY vertex property '" + std::string(name) + "' is missing");
}

PlyDocument read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  PlyDocument doc;
  std::vector<ElementDecl> elements;
  bool ascii = false;
  bool have_format = false;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_done = false;
  while (pos < data.size()) {
    const std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) break;
    std::string_view line(data.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    const std::string err = where(path, line_no, true);

    if (line_no == 1) {
      if (line != "ply") throw ParseError(err + "missing 'ply' magic");
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") {
      header_done = true;
      break;
    }
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError(err + "bad format line");
      if (tok[1] == "ascii") {
        ascii = true;
      } else if (tok[1] == "binary_little_endian") {
        ascii = false;
      } else {
        throw ParseError(err + "unsupported PLY format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "comment") {
      const std::size_t start = line.find("comment") + 7;
      std::string_view rest = line.substr(std::min(line.size(), start));
      if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      doc.comments.emplace_back(rest);
    } else if (tok[0] == "obj_info") {
      continue;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError(err + "bad element line");
      ElementDecl e;
      e.name = std::string(tok[1]);
      const auto r = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), e.count);
      if (r.ec != std::errc()) throw ParseError(err + "bad element count");
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError(err + "property before element");
      PropertyDecl p;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = parse_scalar(tok[2]);
        const auto it = parse_scalar(tok[3]);
        if (!ct || !it) throw ParseError(err + "bad list property types");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
        p.name = std::string(tok[4]);
      } else if (tok.size() == 3) {
        const auto t = parse_scalar(tok[1]);
        if (!t) throw ParseError(err + "unknown property type '" + std::string(tok[1]) + "'");
        p.type = *t;
        p.name = std::string(tok[2]);
      } else {
        throw ParseError(err + "bad property line");
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      throw ParseError(err + "unexpected header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!header_done) throw ParseError(path.string() + ": PLY header is not terminated");
  if (!have_format) throw ParseError(path.string() + ": PLY header has no format line");

  BodyReader reader(path, std::string_view(data).substr(pos), pos, line_no + 1, ascii);
  doc.locations_are_lines = ascii;
  for (const ElementDecl& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    std::vector<int> column_of(e.properties.size(), -1);
    if (is_vertex) {
      doc.vertex_count = e.count;
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        if (e.properties[i].is_list) continue;
        column_of[i] = static_cast<int>(doc.vertex_columns.size());
        doc.vertex_columns.push_back({e.properties[i].name, e.properties[i].type, {}});
        doc.vertex_columns.back().values.reserve(e.count);
      }
    }
    if (is_face) {
      doc.has_faces = true;
      doc.faces.reserve(e.count);
      doc.face_locations.reserve(e.count);
    }
    for (std::size_t row = 0; row < e.count; ++row) {
      const std::size_t row_loc = reader.location();
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        const PropertyDecl& p = e.properties[pi];
        if (!p.is_list) {
          const double v = reader.next(p.type);
          if (column_of[pi] >= 0) doc.vertex_columns[column_of[pi]].values.push_back(v);
          continue;
        }
        const double count_d = reader.next(p.count_type);
        if (count_d < 0 || count_d != std::floor(count_d))
          throw ParseError(where(path, row_loc, ascii) + "invalid list length");
        const auto count = static_cast<std::size_t>(count_d);
        const bool indices = is_face && (p.name == "vertex_indices" || p.name == "vertex_index");
        if (indices && count != 3)
          throw ParseError(where(path, row_loc, ascii) + "face with " + std::to_string(count) +
                           " vertices; only triangles are supported");
        Triangle t{};
        for (std::size_t k = 0; k < count; ++k) {
          const double v = reader.next(p.type);
          if (indices) {
            if (v != std::floor(v) || std::abs(v) > 2147483647.0)
              throw ParseError(where(path, row_loc, ascii) + "non-integer vertex index");
            t[k] = static_cast<std::int32_t>(v);
          }
        }
        if (indices) {
          doc.faces.push_back(t);
          doc.face_locations.push_back(row_loc);
        }
      }
    }
  }
  return doc;
}

void write_ply(const std::filesystem::path& path, const PlyDocument& doc) {
  for (const auto& c : doc.vertex_columns)
    if (c.values.size() != doc.vertex_count)
      throw InvariantError("PLY column '" + c.name + "' length does not match vertex count");

  std::string out;
  out += "ply\nformat binary_little_endian 1.0\n";
  for (const auto& c : doc.comments) out += "comment " + c + "\n";
  out += "element vertex " + std::to_string(doc.vertex_count) + "\n";
  for (const auto& c : doc.vertex_columns)
    out += std::string("property ") + scalar_name(c.type) + " " + c.name + "\n";
  if (doc.has_faces) {
    out += "element face " + std::to_string(doc.faces.size()) + "\n";
    out += "property list uchar int vertex_indices\n";
  }
  out += "end_header\n";

  std::size_t row_bytes = 0;
  for (const auto& c : doc.vertex_columns) row_bytes += scalar_size(c.type);
  out.reserve(out.size() + row_bytes * doc.vertex_count + 13 * doc.faces.size());
  for (std::size_t v = 0; v < doc.vertex_count; ++v)
    for (const auto& c : doc.vertex_columns) encode_binary(out, c.type, c.values[v]);
  if (doc.has_faces) {
    for (const Triangle& t : doc.faces) {
      store_le<std::uint8_t>(out, 3);
      for (int k = 0; k < 3; ++k) store_le<std::int32_t>(out, t[k]);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace garmentkit
