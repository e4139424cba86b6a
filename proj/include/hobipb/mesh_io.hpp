#pragma once

#include "hobipb/common.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace hobipb {

using Face = std::array<int, 3>;

/// Closed triangulated surface with per-vertex outward unit normals.
/// Face indices are 0-based and counter-clockwise seen from outside.
struct FlatMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<Face> faces;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_faces() const { return faces.size(); }

  double face_area(std::size_t f) const;
  Vec3 face_centroid(std::size_t f) const;
  /// Unit geometric normal of a flat face (right-hand rule on the index order).
  Vec3 face_normal(std::size_t f) const;
  double total_area() const;
};

/// Point charges in Angstrom / elementary-charge units.
struct ChargeSystem {
  std::vector<Vec3> positions;
  std::vector<double> charges;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
};

/// Checks unit normals, index range, face orientation against vertex normals
/// and closedness (every undirected edge used by exactly two faces).
/// Throws IndexError or ValidationError naming the first offending item.
void validate_mesh(const FlatMesh& mesh);

/// Parses an MSMS .vert/.face pair. Comment lines start with '#'; the first
/// non-comment line of each file is skipped when it is not a data record
/// (the MSMS count header). Face indices are 1-based in the files.
FlatMesh parse_msms(std::string_view vert_text, std::string_view face_text);

struct MsmsText {
  std::string vert;
  std::string face;
};

/// Emits the MSMS layout read by parse_msms with `digits` decimals.
MsmsText write_msms(const FlatMesh& mesh, int digits = 3);

/// Regular icosahedron refined `level` times (each triangle into four), all
/// vertices on the sphere, exact radial normals. level <= 7.
FlatMesh icosahedral_sphere(int level, double radius, const Vec3& center = Vec3::Zero());

/// Moves every vertex radially onto the sphere and resets normals to the exact
/// radial direction.
FlatMesh radial_project(const FlatMesh& mesh, const Vec3& center, double radius);

/// Reads "x y z q [radius]" records; '#' starts a comment.
ChargeSystem parse_charges(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace hobipb
