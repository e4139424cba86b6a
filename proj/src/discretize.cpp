#include "hobipb/bem_solver.hpp"

#include <algorithm>

namespace hobipb {

std::string_view scheme_name(Scheme s) { return s == Scheme::hobi ? "hobi" : "lobi"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "hobi") return Scheme::hobi;
  if (name == "lobi") return Scheme::lobi;
  throw DomainError("unknown scheme '" + std::string(name) + "' (expected hobi or lobi)");
}

void SolverConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("GMRES tolerance must lie in (0, 1)");
  if (restart < 1) throw DomainError("GMRES restart length must be at least 1");
  if (max_iterations < 1) throw DomainError("GMRES iteration limit must be at least 1");
  if (singular_points < 1 || singular_points > 32) throw DomainError("singular rule size must lie in [1, 32]");
}

void QuadraturePoints::reserve(std::size_t n) {
  for (auto* v : {&x, &y, &z, &nx, &ny, &nz}) v->reserve(n);
  field_weight.reserve(n);
  field_index.reserve(n);
}

void QuadraturePoints::push_back(const Vec3& p, const Vec3& n, const std::array<double, 3>& w,
                                 const std::array<int, 3>& idx) {
  x.push_back(p.x());
  y.push_back(p.y());
  z.push_back(p.z());
  nx.push_back(n.x());
  ny.push_back(n.y());
  nz.push_back(n.z());
  field_weight.push_back(w);
  field_index.push_back(idx);
}

std::size_t QuadraturePoints::bytes() const {
  return size() * (6 * sizeof(double) + sizeof(std::array<double, 3>) + sizeof(std::array<int, 3>));
}

std::span<const int> DiscretizedProblem::singular_elements(std::size_t i) const {
  return {incident_.data() + incident_offset_[i], incident_offset_[i + 1] - incident_offset_[i]};
}

std::size_t DiscretizedProblem::max_singular_elements() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i + 1 < incident_offset_.size(); ++i)
    best = std::max(best, incident_offset_[i + 1] - incident_offset_[i]);
  return best;
}

std::size_t DiscretizedProblem::cache_bytes() const {
  return regular_.bytes() + singular_.bytes() + elements_.size() * sizeof(CurvedElement) +
         incident_.size() * sizeof(int) + (incident_offset_.size() + singular_offset_.size()) * sizeof(std::size_t) +
         target_pos_.size() * 2 * sizeof(Vec3);
}

namespace {

void build_lobi(const FlatMesh& mesh, std::vector<Vec3>& pos, std::vector<Vec3>& normal,
                QuadraturePoints& points, std::vector<std::size_t>& offset, std::vector<int>& incident) {
  const std::size_t nf = mesh.num_faces();
  pos.resize(nf);
  normal.resize(nf);
  points.reserve(nf);
  offset.resize(nf + 1);
  incident.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    pos[f] = mesh.face_centroid(f);
    normal[f] = mesh.face_normal(f);
    const int fi = static_cast<int>(f);
    points.push_back(pos[f], normal[f], {mesh.face_area(f), 0.0, 0.0}, {fi, fi, fi});
    offset[f] = f;
    incident[f] = fi;
  }
  offset[nf] = nf;
}

}  // namespace

DiscretizedProblem discretize(const FlatMesh& mesh, const PhysicalParams& params, const ChargeSystem& charges,
                              const SolverConfig& config) {
  params.validate();
  config.validate();
  validate_mesh(mesh);
  if (charges.positions.size() != charges.charges.size()) throw DomainError("charge positions and values differ in length");

  DiscretizedProblem p;
  p.mesh_ = mesh;
  p.params_ = params;
  p.charges_ = charges;
  p.config_ = config;
  p.regular_rule_ = gauss_radau_rule();
  p.singular_rule_ = duffy_rule(config.singular_points);
  const int workers = resolve_workers(config.workers);

  if (config.scheme == Scheme::lobi) {
    p.points_per_element_ = 1;
    build_lobi(mesh, p.target_pos_, p.target_normal_, p.regular_, p.incident_offset_, p.incident_);
    p.singular_offset_.assign(p.target_pos_.size() + 1, 0);
    return p;
  }

  const std::size_t nv = mesh.num_vertices();
  const std::size_t nf = mesh.num_faces();
  p.target_pos_ = mesh.vertices;
  p.target_normal_ = mesh.normals;

  // Curved elements, built concurrently into disjoint slots.
  p.elements_.resize(nf);
  parallel_for(nf, workers, [&](IndexRange r, int) {
    for (std::size_t f = r.begin; f < r.end; ++f) p.elements_[f] = build_curved_element(mesh, f);
  });

  // Regular-rule frames, element-major.
  const TriangleRule& reg = p.regular_rule_;
  const std::size_t q = reg.size();
  p.points_per_element_ = q;
  std::vector<SurfaceFrame> frames(nf * q);
  parallel_for(nf, workers, [&](IndexRange r, int) {
    for (std::size_t f = r.begin; f < r.end; ++f) {
      for (std::size_t m = 0; m < q; ++m) frames[f * q + m] = element_frame(p.elements_[f], reg.r[m], reg.s[m]);
    }
  });
  p.regular_.reserve(nf * q);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t m = 0; m < q; ++m) {
      const SurfaceFrame& fr = frames[f * q + m];
      const double wj = reg.w[m] * fr.jacobian;
      const double lam[3] = {1.0 - reg.r[m] - reg.s[m], reg.r[m], reg.s[m]};
      p.regular_.push_back(fr.position, fr.normal, {wj * lam[0], wj * lam[1], wj * lam[2]}, p.elements_[f].vertex_ids);
    }
  }

  // Vertex -> incident faces (ascending by construction).
  std::vector<std::size_t> count(nv + 1, 0);
  for (const auto& t : mesh.faces)
    for (int v : t) ++count[v + 1];
  for (std::size_t i = 0; i < nv; ++i) count[i + 1] += count[i];
  p.incident_offset_ = count;
  p.incident_.resize(count[nv]);
  std::vector<std::size_t> fill(count.begin(), count.end() - 1);
  for (std::size_t f = 0; f < nf; ++f)
    for (int v : mesh.faces[f]) p.incident_[fill[v]++] = static_cast<int>(f);

  // Duffy frames: for vertex i on element j, rotate local barycentrics so i
  // is the collapsed corner, then evaluate on the unrotated element.
  const TriangleRule& sing = p.singular_rule_;
  const std::size_t qs = sing.size();
  p.singular_offset_.resize(nv + 1);
  for (std::size_t i = 0; i <= nv; ++i) p.singular_offset_[i] = p.incident_offset_[i] * qs;
  std::vector<SurfaceFrame> sframes(p.incident_.size() * qs);
  std::vector<std::array<double, 3>> slam(p.incident_.size() * qs);
  parallel_for(nv, workers, [&](IndexRange r, int) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      for (std::size_t k = p.incident_offset_[i]; k < p.incident_offset_[i + 1]; ++k) {
        const CurvedElement& e = p.elements_[p.incident_[k]];
        const int local = static_cast<int>(std::find(e.vertex_ids.begin(), e.vertex_ids.end(), static_cast<int>(i)) -
                                           e.vertex_ids.begin());
        for (std::size_t m = 0; m < qs; ++m) {
          std::array<double, 3> lam{};
          lam[local] = 1.0 - sing.r[m] - sing.s[m];
          lam[(local + 1) % 3] = sing.r[m];
          lam[(local + 2) % 3] = sing.s[m];
          slam[k * qs + m] = lam;
          sframes[k * qs + m] = element_frame(e, lam[1], lam[2]);
        }
      }
    }
  });
  p.singular_.reserve(sframes.size());
  for (std::size_t k = 0; k < p.incident_.size(); ++k) {
    const CurvedElement& e = p.elements_[p.incident_[k]];
    for (std::size_t m = 0; m < qs; ++m) {
      const SurfaceFrame& fr = sframes[k * qs + m];
      const auto& lam = slam[k * qs + m];
      const double wj = sing.w[m] * fr.jacobian;
      p.singular_.push_back(fr.position, fr.normal, {wj * lam[0], wj * lam[1], wj * lam[2]}, e.vertex_ids);
    }
  }
  return p;
}

}  // namespace hobipb
