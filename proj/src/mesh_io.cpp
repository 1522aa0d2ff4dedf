#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "texprint/error.hpp"
#include "texprint/mesh.hpp"

namespace texprint {
namespace {

static_assert(std::endian::native == std::endian::little, "STL I/O assumes a little-endian host");

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

TriMesh load_obj(std::string_view text) {
  std::vector<Vec3> pos;
  std::vector<Face> faces;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto toks = split_ws(line);
    if (toks[0] == "v") {
      if (toks.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      pos.emplace_back(parse_double(toks[1], line_no), parse_double(toks[2], line_no), parse_double(toks[3], line_no));
    } else if (toks[0] == "f") {
      std::vector<int> idx;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        const std::string_view ref = toks[i].substr(0, toks[i].find('/'));
        long v = 0;
        const auto res = std::from_chars(ref.data(), ref.data() + ref.size(), v);
        if (res.ec != std::errc{} || res.ptr != ref.data() + ref.size() || v == 0) {
          throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + std::string(toks[i]) + "'");
        }
        // Negative indices are relative to the vertices read so far.
        const long resolved = v > 0 ? v - 1 : static_cast<long>(pos.size()) + v;
        idx.push_back(static_cast<int>(resolved));
      }
      if (idx.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
      if (idx.size() > 4) {
        throw ParseError("line " + std::to_string(line_no) + ": " + std::to_string(idx.size()) +
                         "-gon faces are not supported (triangles and quads only)");
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
    // vn, vt, o, g, s, usemtl, mtllib: ignored.
    if (end == text.size()) break;
  }
  if (faces.empty()) throw ParseError("OBJ contains no faces");
  try {
    validate_indices(pos, faces);
  } catch (const InvalidInput& e) {
    throw ParseError(e.what());
  }
  return TriMesh(std::move(pos), std::move(faces));
}

// Merges points closer than kStlWeldTolerance using a uniform hash grid.
class Welder {
 public:
  int insert(const Vec3& p) {
    const auto cell = cell_of(p);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          const auto it = grid_.find(key(cell[0] + dx, cell[1] + dy, cell[2] + dz));
          if (it == grid_.end()) continue;
          for (int id : it->second) {
            if ((points_[static_cast<std::size_t>(id)] - p).norm() <= kStlWeldTolerance) return id;
          }
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[key(cell[0], cell[1], cell[2])].push_back(id);
    return id;
  }
  std::vector<Vec3> take() { return std::move(points_); }

 private:
  static std::array<long, 3> cell_of(const Vec3& p) {
    return {static_cast<long>(std::floor(p.x() / kStlWeldTolerance)),
            static_cast<long>(std::floor(p.y() / kStlWeldTolerance)),
            static_cast<long>(std::floor(p.z() / kStlWeldTolerance))};
  }
  static std::uint64_t key(long x, long y, long z) {
    std::uint64_t h = 1469598103934665603ull;
    for (long v : {x, y, z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
  std::vector<Vec3> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

TriMesh weld_triangles(const std::vector<std::array<Vec3, 3>>& tris) {
  Welder w;
  std::vector<Face> faces;
  faces.reserve(tris.size());
  for (const auto& t : tris) {
    const Face f{w.insert(t[0]), w.insert(t[1]), w.insert(t[2])};
    // Triangles collapsed by welding carry no area; drop them.
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    faces.push_back(f);
  }
  if (faces.empty()) throw ParseError("STL contains no non-degenerate triangles");
  return TriMesh(w.take(), std::move(faces));
}

TriMesh load_stl_ascii(std::string_view text) {
  std::vector<std::array<Vec3, 3>> tris;
  std::array<Vec3, 3> cur;
  int k = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto toks = split_ws(trim(text.substr(start, end - start)));
    ++line_no;
    start = end + 1;
    if (toks.empty()) continue;
    if (toks[0] == "vertex") {
      if (toks.size() < 4 || k >= 3) throw ParseError("line " + std::to_string(line_no) + ": bad vertex record");
      cur[static_cast<std::size_t>(k++)] = Vec3(parse_double(toks[1], line_no), parse_double(toks[2], line_no),
                                                parse_double(toks[3], line_no));
    } else if (toks[0] == "endloop") {
      if (k != 3) throw ParseError("line " + std::to_string(line_no) + ": facet without 3 vertices");
      tris.push_back(cur);
      k = 0;
    }
  }
  if (tris.empty()) throw ParseError("ASCII STL contains no facets");
  return weld_triangles(tris);
}

TriMesh load_stl_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 84) throw ParseError("binary STL shorter than its 84-byte header");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + 80, 4);
  if (bytes.size() != 84 + static_cast<std::size_t>(count) * 50) {
    throw ParseError("binary STL size " + std::to_string(bytes.size()) + " does not match triangle count " +
                     std::to_string(count));
  }
  std::vector<std::array<Vec3, 3>> tris(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint8_t* rec = bytes.data() + 84 + static_cast<std::size_t>(i) * 50;
    for (int v = 0; v < 3; ++v) {
      float xyz[3];
      std::memcpy(xyz, rec + 12 + v * 12, 12);
      if (!std::isfinite(xyz[0]) || !std::isfinite(xyz[1]) || !std::isfinite(xyz[2])) {
        throw ParseError("binary STL triangle " + std::to_string(i) + " has a non-finite coordinate");
      }
      tris[i][static_cast<std::size_t>(v)] = Vec3(xyz[0], xyz[1], xyz[2]);
    }
  }
  return weld_triangles(tris);
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint8_t b[4];
  std::memcpy(b, &v, 4);
  out.insert(out.end(), b, b + 4);
}

}  // namespace

TriMesh load_mesh(std::span<const std::uint8_t> bytes, MeshFormat format) {
  if (bytes.empty()) throw ParseError("empty mesh input");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (format == MeshFormat::Obj) return load_obj(text);
  // An ASCII STL starts with "solid"; some binary exporters also do, so the
  // binary size check wins when it is consistent.
  if (bytes.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + 80, 4);
    if (bytes.size() == 84 + static_cast<std::size_t>(count) * 50) return load_stl_binary(bytes);
  }
  if (text.substr(0, 5) == "solid") return load_stl_ascii(text);
  return load_stl_binary(bytes);
}

std::vector<std::uint8_t> export_mesh(const TriMesh& mesh, ExportFormat format) {
  std::vector<std::uint8_t> out;
  if (format == ExportFormat::StlBinary) {
    out.reserve(84 + mesh.face_count() * 50);
    std::string header = "texprint binary STL";
    header.resize(80, ' ');
    out.insert(out.end(), header.begin(), header.end());
    const auto count = static_cast<std::uint32_t>(mesh.face_count());
    std::uint8_t cb[4];
    std::memcpy(cb, &count, 4);
    out.insert(out.end(), cb, cb + 4);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
      const Vec3 n = mesh.face_normal(static_cast<int>(f));
      for (int i = 0; i < 3; ++i) put_f32(out, static_cast<float>(n[i]));
      for (int v : mesh.face(static_cast<int>(f))) {
        const Vec3& p = mesh.position(v);
        for (int i = 0; i < 3; ++i) put_f32(out, static_cast<float>(p[i]));
      }
      out.push_back(0);
      out.push_back(0);
    }
    return out;
  }
  std::string s;
  s.reserve(mesh.vertex_count() * 64 + mesh.face_count() * 32);
  char buf[128];
  for (const Vec3& p : mesh.positions()) {
    const int n = std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    s.append(buf, static_cast<std::size_t>(n));
  }
  for (const Face& f : mesh.faces()) {
    const int n = std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    s.append(buf, static_cast<std::size_t>(n));
  }
  out.assign(s.begin(), s.end());
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to '" + path + "'");
}

std::optional<MeshFormat> format_from_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  std::string ext(path.substr(dot + 1));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "obj") return MeshFormat::Obj;
  if (ext == "stl") return MeshFormat::Stl;
  return std::nullopt;
}

TriMesh load_mesh_file(const std::string& path) {
  const auto fmt = format_from_path(path);
  if (!fmt) throw ParseError("cannot tell mesh format of '" + path + "' (expected .obj or .stl)");
  const auto bytes = read_file(path);
  return load_mesh(bytes, *fmt);
}

}  // namespace texprint
