#include "hobipb/curved_geometry.hpp"

#include <Eigen/LU>

#include <cmath>

namespace hobipb {

namespace {

using Monomials = Eigen::Matrix<double, kElementNodes, 1>;

// {1, r, s, r^2, rs, s^2, r^3, r^2 s, r s^2, s^3}
Monomials monomials(double r, double s) {
  Monomials m;
  m << 1.0, r, s, r * r, r * s, s * s, r * r * r, r * r * s, r * s * s, s * s * s;
  return m;
}

Monomials monomials_dr(double r, double s) {
  Monomials m;
  m << 0.0, 1.0, 0.0, 2.0 * r, s, 0.0, 3.0 * r * r, 2.0 * r * s, s * s, 0.0;
  return m;
}

Monomials monomials_ds(double r, double s) {
  Monomials m;
  m << 0.0, 0.0, 1.0, 0.0, r, 2.0 * s, 0.0, r * r, 2.0 * r * s, 3.0 * s * s;
  return m;
}

// Column k holds the monomial coefficients of N_k.
const Eigen::Matrix<double, kElementNodes, kElementNodes>& basis_coefficients() {
  static const Eigen::Matrix<double, kElementNodes, kElementNodes> coeffs = [] {
    Eigen::Matrix<double, kElementNodes, kElementNodes> v;
    for (int j = 0; j < kElementNodes; ++j) v.row(j) = monomials(kNodeRS[j][0], kNodeRS[j][1]).transpose();
    Eigen::FullPivLU<Eigen::Matrix<double, kElementNodes, kElementNodes>> lu(v);
    if (!lu.isInvertible()) throw Error("ten-node Vandermonde matrix is singular");
    Eigen::Matrix<double, kElementNodes, kElementNodes> c = lu.inverse();
    // Kronecker self-check at the nodes.
    for (int j = 0; j < kElementNodes; ++j) {
      const Monomials n = c.transpose() * monomials(kNodeRS[j][0], kNodeRS[j][1]);
      for (int k = 0; k < kElementNodes; ++k) {
        if (std::abs(n[k] - (j == k ? 1.0 : 0.0)) > 1e-12) throw Error("ten-node basis failed its Kronecker self-test");
      }
    }
    return c;
  }();
  return coeffs;
}

Vec3 projected_tangent(const Vec3& chord, const Vec3& n, double chord_len) {
  const Vec3 t = chord - chord.dot(n) * n;
  const double len = t.norm();
  if (!(len >= 1e-12 * chord_len)) throw GeometryError("arc end normal is parallel to the chord");
  const double cos_a = std::min(1.0, len / chord_len);
  return (2.0 * chord_len / (1.0 + cos_a) / len) * t;
}

Vec3 blend_normal(const Vec3& n0, const Vec3& n1, double t) {
  const Vec3 n = (1.0 - t) * n0 + t * n1;
  const double len = n.norm();
  return len > 1e-12 ? Vec3(n / len) : n0;
}

// Node normal on an arc: curvature normal, or the blended endpoint normal
// projected off the tangent when the curve bends away from the surface
// (inflected or strongly twisted space arcs).
Vec3 node_normal(const CubicArc& arc, double t, const Vec3& n0, const Vec3& n1) {
  const Vec3 ref = blend_normal(n0, n1, t);
  const ArcNormal an = arc_normal(arc, t, ref);
  if (an.fallback || an.normal.dot(ref) >= 0.5) return an.normal;
  const Vec3 tau = arc.d1(t).normalized();
  const Vec3 p = ref - ref.dot(tau) * tau;
  const double len = p.norm();
  return len > 1e-12 ? Vec3(p / len) : ref;
}

struct EdgeArc {
  CubicArc arc;
  Vec3 n_start;
  Vec3 n_end;
  bool reversed = false;

  // Node parameters are thirds; snapping keeps 1 - 1/3 and 2/3 the same bits.
  double param(double u) const {
    const double t = reversed ? 1.0 - u : u;
    const double k = std::round(3.0 * t);
    return std::abs(3.0 * t - k) < 1e-9 ? k / 3.0 : t;
  }
  Vec3 point(double u) const { return arc.point(param(u)); }
  Vec3 normal(double u) const { return node_normal(arc, param(u), n_start, n_end); }
};

// Arc between two mesh vertices fitted in ascending global index order, so
// neighbouring elements share bitwise-identical edge nodes.
EdgeArc mesh_edge_arc(const FlatMesh& mesh, int a, int b) {
  EdgeArc e;
  e.reversed = a > b;
  const int lo = e.reversed ? b : a;
  const int hi = e.reversed ? a : b;
  e.arc = fit_arc(mesh.vertices[lo], mesh.normals[lo], mesh.vertices[hi], mesh.normals[hi]);
  e.n_start = mesh.normals[lo];
  e.n_end = mesh.normals[hi];
  return e;
}

}  // namespace

CubicArc fit_arc(const Vec3& p0, const Vec3& n0, const Vec3& p1, const Vec3& n1) {
  const Vec3 chord = p1 - p0;
  const double len = chord.norm();
  if (!(len > 0.0)) throw GeometryError("arc endpoints coincide");
  const Vec3 t0 = projected_tangent(chord, n0, len);
  const Vec3 t1 = projected_tangent(chord, n1, len);
  CubicArc arc;
  arc.c0 = p0;
  arc.c1 = t0;
  arc.c2 = 3.0 * chord - 2.0 * t0 - t1;
  arc.c3 = -2.0 * chord + t0 + t1;
  return arc;
}

ArcNormal arc_normal(const CubicArc& arc, double t, const Vec3& reference) {
  const Vec3 x1 = arc.d1(t);
  const Vec3 x2 = arc.d2(t);
  const double speed2 = x1.squaredNorm();
  if (!(speed2 > 0.0)) return {reference, true};
  const Vec3 k = (x2 - (x1.dot(x2) / speed2) * x1) / std::sqrt(speed2);
  const double kn = k.norm();
  if (kn < 1e-12) return {reference, true};
  Vec3 n = k / kn;
  if (n.dot(reference) < 0.0) n = -n;
  return {n, false};
}

std::pair<double, double> rs_to_uv(double r, double s) {
  const double u = r + s;
  if (u == 0.0) return {0.0, 0.0};
  return {u, s / u};
}

CurvedElement build_curved_element(const FlatMesh& mesh, std::size_t face_index) {
  if (face_index >= mesh.faces.size())
    throw IndexError("face " + std::to_string(face_index) + " does not exist");
  const Face& f = mesh.faces[face_index];
  CurvedElement e;
  e.vertex_ids = f;
  try {
    const EdgeArc a12 = mesh_edge_arc(mesh, f[0], f[1]);
    const EdgeArc a13 = mesh_edge_arc(mesh, f[0], f[2]);
    const EdgeArc a23 = mesh_edge_arc(mesh, f[1], f[2]);

    for (int k = 0; k < 3; ++k) {
      e.nodes[kVertexNodes[k]] = mesh.vertices[f[k]];
      e.node_normals[kVertexNodes[k]] = mesh.normals[f[k]];
    }
    // Generate every non-vertex node from its (u, v) coordinates: v = 0 lies
    // on arc 1-2, v = 1 on arc 1-3, u = 1 on arc 2-3.
    for (int k = 0; k < kElementNodes; ++k) {
      if (k == kVertexNodes[0] || k == kVertexNodes[1] || k == kVertexNodes[2]) continue;
      const auto [u, v] = rs_to_uv(kNodeRS[k][0], kNodeRS[k][1]);
      if (v == 0.0) {
        e.nodes[k] = a12.point(u);
        e.node_normals[k] = a12.normal(u);
      } else if (v == 1.0) {
        e.nodes[k] = a13.point(u);
        e.node_normals[k] = a13.normal(u);
      } else if (u == 1.0) {
        e.nodes[k] = a23.point(v);
        e.node_normals[k] = a23.normal(v);
      } else {
        // Interior: cross arc between the two edge points at this u.
        const Vec3 y1 = a12.point(u), y2 = a13.point(u);
        const Vec3 m1 = a12.normal(u), m2 = a13.normal(u);
        const CubicArc cross = fit_arc(y1, m1, y2, m2);
        e.nodes[k] = cross.point(v);
        e.node_normals[k] = node_normal(cross, v, m1, m2);
      }
    }
  } catch (const GeometryError& err) {
    throw GeometryError("face " + std::to_string(face_index) + ": " + err.what());
  }
  return e;
}

std::array<double, kElementNodes> shape_functions(double r, double s) {
  const Monomials n = basis_coefficients().transpose() * monomials(r, s);
  std::array<double, kElementNodes> out{};
  for (int k = 0; k < kElementNodes; ++k) out[k] = n[k];
  return out;
}

std::array<std::array<double, 2>, kElementNodes> shape_gradients(double r, double s) {
  const auto& c = basis_coefficients();
  const Monomials dr = c.transpose() * monomials_dr(r, s);
  const Monomials ds = c.transpose() * monomials_ds(r, s);
  std::array<std::array<double, 2>, kElementNodes> out{};
  for (int k = 0; k < kElementNodes; ++k) out[k] = {dr[k], ds[k]};
  return out;
}

SurfaceFrame element_frame(const CurvedElement& elem, double r, double s) {
  const auto n = shape_functions(r, s);
  const auto g = shape_gradients(r, s);
  SurfaceFrame fr;
  fr.position.setZero();
  fr.d_dr.setZero();
  fr.d_ds.setZero();
  Vec3 interp_normal = Vec3::Zero();
  for (int k = 0; k < kElementNodes; ++k) {
    fr.position += n[k] * elem.nodes[k];
    fr.d_dr += g[k][0] * elem.nodes[k];
    fr.d_ds += g[k][1] * elem.nodes[k];
    interp_normal += n[k] * elem.node_normals[k];
  }
  const Vec3 c = fr.d_dr.cross(fr.d_ds);
  fr.jacobian = c.norm();
  if (!(fr.jacobian >= 1e-14)) throw GeometryError("element Jacobian vanishes");
  fr.normal = c / fr.jacobian;
  if (fr.normal.dot(interp_normal) < 0.0) fr.normal = -fr.normal;
  return fr;
}

double integrate_element(const CurvedElement& elem, const std::function<double(const SurfaceFrame&)>& integrand,
                         const TriangleRule& rule) {
  double sum = 0.0;
  for (std::size_t m = 0; m < rule.size(); ++m) {
    const SurfaceFrame fr = element_frame(elem, rule.r[m], rule.s[m]);
    sum += integrand(fr) * fr.jacobian * rule.w[m];
  }
  return sum;
}

}  // namespace hobipb
