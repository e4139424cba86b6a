#pragma once

#include "hobipb/common.hpp"
#include "hobipb/mesh_io.hpp"
#include "hobipb/quadrature.hpp"

#include <array>
#include <functional>
#include <utility>

namespace hobipb {

/// x(t) = c0 + c1 t + c2 t^2 + c3 t^3 for t in [0, 1].
struct CubicArc {
  Vec3 c0, c1, c2, c3;

  Vec3 point(double t) const { return c0 + t * (c1 + t * (c2 + t * c3)); }
  Vec3 d1(double t) const { return c1 + t * (2.0 * c2 + 3.0 * t * c3); }
  Vec3 d2(double t) const { return 2.0 * c2 + 6.0 * t * c3; }
};

/// Cubic Hermite arc through p0 and p1 whose end tangents are orthogonal to
/// n0 and n1. Each end tangent is the chord projected onto the plane of the
/// end normal; its length 2|c| / (1 + cos a), with a the angle between the
/// projected tangent and the chord, makes the arc reproduce a circular arc to
/// high order and a straight chord exactly. Throws GeometryError when a
/// normal is (nearly) parallel to the chord or p0 == p1.
CubicArc fit_arc(const Vec3& p0, const Vec3& n0, const Vec3& p1, const Vec3& n1);

inline Vec3 arc_point(const CubicArc& arc, double t) { return arc.point(t); }

struct ArcNormal {
  Vec3 normal;
  /// True when the curvature vanished and `reference` was returned instead.
  bool fallback = false;
};

/// Unit curvature normal at t, signed to have positive dot product with
/// `reference`. Returns `reference` (flagged) when |curvature| < 1e-12.
ArcNormal arc_normal(const CubicArc& arc, double t, const Vec3& reference);

/// Collapsed-square coordinates: u = r + s, v = s / (r + s); (0, 0) at the origin.
std::pair<double, double> rs_to_uv(double r, double s);

inline constexpr int kElementNodes = 10;

/// Reference coordinates of the ten element nodes. Index k is node k+1 of the
/// layout: node 1 = (0,0), node 4 = (1,0), node 9 = (0,1) are the flat vertices,
/// nodes 2,3 sit at u = 1/3, nodes 5,6 at u = 2/3 on the edges leaving node 1,
/// nodes 7,8 on the opposite edge and node 10 = (1/3,1/3) is interior.
inline constexpr std::array<std::array<double, 2>, kElementNodes> kNodeRS = {{
    {0.0, 0.0},
    {1.0 / 3.0, 0.0},
    {0.0, 1.0 / 3.0},
    {1.0, 0.0},
    {2.0 / 3.0, 0.0},
    {0.0, 2.0 / 3.0},
    {2.0 / 3.0, 1.0 / 3.0},
    {1.0 / 3.0, 2.0 / 3.0},
    {0.0, 1.0},
    {1.0 / 3.0, 1.0 / 3.0},
}};

/// Zero-based positions of the three vertex nodes in the node arrays.
inline constexpr std::array<int, 3> kVertexNodes = {0, 3, 8};

struct CurvedElement {
  std::array<Vec3, kElementNodes> nodes;
  std::array<Vec3, kElementNodes> node_normals;
  /// Global vertex indices at local (r,s) = (0,0), (1,0), (0,1).
  std::array<int, 3> vertex_ids{};
};

struct SurfaceFrame {
  Vec3 position;
  Vec3 d_dr;
  Vec3 d_ds;
  Vec3 normal;
  double jacobian = 0.0;
};

/// Promotes face `face_index` of `mesh` to a ten-node cubic patch.
CurvedElement build_curved_element(const FlatMesh& mesh, std::size_t face_index);

/// Cubic Lagrange basis on the ten reference nodes.
std::array<double, kElementNodes> shape_functions(double r, double s);

/// (dN/dr, dN/ds) for every basis function.
std::array<std::array<double, 2>, kElementNodes> shape_gradients(double r, double s);

/// Position, tangents, unit normal and area factor |x_r x x_s| at (r, s).
/// Throws GeometryError when the Jacobian drops below 1e-14.
SurfaceFrame element_frame(const CurvedElement& elem, double r, double s);

/// Sum over rule points of f(frame) * jacobian * weight.
double integrate_element(const CurvedElement& elem, const std::function<double(const SurfaceFrame&)>& integrand,
                         const TriangleRule& rule);

}  // namespace hobipb
