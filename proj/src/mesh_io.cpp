#include "hobipb/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace hobipb {

namespace {

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

std::optional<double> to_double(std::string_view tok) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> to_long(std::string_view tok) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) return std::nullopt;
  return v;
}

// Calls fn(tokens, line_number) for every non-blank, non-comment line.
template <class Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (!toks.empty()) fn(toks, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

std::optional<std::array<double, 6>> vert_record(const std::vector<std::string_view>& toks) {
  if (toks.size() < 6) return std::nullopt;
  std::array<double, 6> v{};
  for (int k = 0; k < 6; ++k) {
    auto d = to_double(toks[k]);
    if (!d) return std::nullopt;
    v[k] = *d;
  }
  return v;
}

std::optional<std::array<long, 3>> face_record(const std::vector<std::string_view>& toks) {
  if (toks.size() < 3) return std::nullopt;
  std::array<long, 3> f{};
  for (int k = 0; k < 3; ++k) {
    auto d = to_long(toks[k]);
    if (!d) return std::nullopt;
    f[k] = *d;
  }
  return f;
}

std::string format_edge(int a, int b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

double FlatMesh::face_area(std::size_t f) const {
  const auto& t = faces[f];
  return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

Vec3 FlatMesh::face_centroid(std::size_t f) const {
  const auto& t = faces[f];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Vec3 FlatMesh::face_normal(std::size_t f) const {
  const auto& t = faces[f];
  return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).normalized();
}

double FlatMesh::total_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(f);
  return a;
}

void validate_mesh(const FlatMesh& mesh) {
  const auto nv = static_cast<long>(mesh.vertices.size());
  if (mesh.normals.size() != mesh.vertices.size())
    throw ValidationError("normal count " + std::to_string(mesh.normals.size()) +
                          " differs from vertex count " + std::to_string(nv));
  for (std::size_t i = 0; i < mesh.normals.size(); ++i) {
    if (std::abs(mesh.normals[i].norm() - 1.0) > 1e-12)
      throw ValidationError("normal of vertex " + std::to_string(i) + " is not unit length");
  }
  std::map<std::pair<int, int>, int> edge_use;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv)
        throw IndexError("face " + std::to_string(f) + " references vertex " + std::to_string(t[k]) +
                         " outside [0, " + std::to_string(nv) + ")");
    }
    const Vec3 g = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    const Vec3 mean_n = mesh.normals[t[0]] + mesh.normals[t[1]] + mesh.normals[t[2]];
    if (!(g.dot(mean_n) > 0.0))
      throw ValidationError("face " + std::to_string(f) + " is oriented against its vertex normals");
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
  }
  for (const auto& [edge, count] : edge_use) {
    if (count != 2)
      throw ValidationError("mesh is not closed: edge " + format_edge(edge.first, edge.second) + " is used by " +
                            std::to_string(count) + " faces");
  }
}

FlatMesh parse_msms(std::string_view vert_text, std::string_view face_text) {
  FlatMesh mesh;
  bool first = true;
  for_each_record(vert_text, [&](const auto& toks, std::size_t line) {
    auto rec = vert_record(toks);
    const bool header_candidate = std::exchange(first, false);
    if (!rec) {
      if (header_candidate) return;
      throw ParseError("vertex record needs 6 reals (x y z nx ny nz)", line);
    }
    const Vec3 n((*rec)[3], (*rec)[4], (*rec)[5]);
    const double len = n.norm();
    if (!(len > 0.0)) throw ParseError("vertex normal has zero length", line);
    mesh.vertices.emplace_back((*rec)[0], (*rec)[1], (*rec)[2]);
    mesh.normals.push_back(n / len);
  });

  first = true;
  const auto nv = static_cast<long>(mesh.vertices.size());
  for_each_record(face_text, [&](const auto& toks, std::size_t line) {
    auto rec = face_record(toks);
    const bool header_candidate = std::exchange(first, false);
    if (!rec) {
      if (header_candidate) return;
      throw ParseError("face record needs 3 integer vertex indices", line);
    }
    Face f{};
    for (int k = 0; k < 3; ++k) {
      const long idx = (*rec)[k];
      if (idx < 1 || idx > nv)
        throw IndexError("line " + std::to_string(line) + ": vertex index " + std::to_string(idx) +
                         " outside [1, " + std::to_string(nv) + "]");
      f[k] = static_cast<int>(idx - 1);
    }
    mesh.faces.push_back(f);
  });

  validate_mesh(mesh);
  return mesh;
}

MsmsText write_msms(const FlatMesh& mesh, int digits) {
  std::ostringstream v;
  v.setf(std::ios::fixed);
  v.precision(digits);
  v << "# MSMS solvent excluded surface vertices\n"
    << "#vertex #sphere density probe_r\n"
    << mesh.vertices.size() << " 0 0.00 0.00\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& p = mesh.vertices[i];
    const auto& n = mesh.normals[i];
    v << p.x() << ' ' << p.y() << ' ' << p.z() << ' ' << n.x() << ' ' << n.y() << ' ' << n.z() << " 0 0 1\n";
  }
  std::ostringstream f;
  f << "# MSMS solvent excluded surface triangles\n"
    << "#faces #sphere density probe_r\n"
    << mesh.faces.size() << " 0 0.00 0.00\n";
  for (const auto& t : mesh.faces) f << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << " 1 0\n";
  return {v.str(), f.str()};
}

FlatMesh icosahedral_sphere(int level, double radius, const Vec3& center) {
  if (level < 0 || level > 7) throw DomainError("icosphere level must be in [0, 7], got " + std::to_string(level));
  if (!(radius > 0.0)) throw DomainError("icosphere radius must be positive");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> unit = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                            {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : unit) p.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (auto& t : faces) {
    if ((unit[t[1]] - unit[t[0]]).cross(unit[t[2]] - unit[t[0]]).dot(unit[t[0]]) < 0.0) std::swap(t[1], t[2]);
  }

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      unit.push_back((unit[a] + unit[b]).normalized());
      const int id = static_cast<int>(unit.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& t : faces) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  FlatMesh mesh;
  mesh.vertices.reserve(unit.size());
  mesh.normals = unit;
  for (const auto& u : unit) mesh.vertices.push_back(center + radius * u);
  mesh.faces = std::move(faces);
  return mesh;
}

FlatMesh radial_project(const FlatMesh& mesh, const Vec3& center, double radius) {
  FlatMesh out = mesh;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    const Vec3 d = mesh.vertices[i] - center;
    const double len = d.norm();
    if (!(len > 0.0)) throw GeometryError("vertex " + std::to_string(i) + " coincides with the projection center");
    const Vec3 dir = d / len;
    out.vertices[i] = center + radius * dir;
    out.normals[i] = dir;
  }
  return out;
}

ChargeSystem parse_charges(std::string_view text) {
  ChargeSystem cs;
  for_each_record(text, [&](const auto& toks, std::size_t line) {
    if (toks.size() < 4 || toks.size() > 5) throw ParseError("charge record needs x y z q [radius]", line);
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < toks.size(); ++k) {
      auto d = to_double(toks[k]);
      if (!d) throw ParseError("non-numeric field '" + std::string(toks[k]) + "'", line);
      v[k] = *d;
    }
    cs.positions.emplace_back(v[0], v[1], v[2]);
    cs.charges.push_back(v[3]);
  });
  return cs;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hobipb
