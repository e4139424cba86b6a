#pragma once

#include "hobipb/common.hpp"
#include "hobipb/curved_geometry.hpp"
#include "hobipb/kernels.hpp"
#include "hobipb/mesh_io.hpp"
#include "hobipb/parallel.hpp"
#include "hobipb/quadrature.hpp"

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace hobipb {

/// HOBI: curved elements, unknowns at vertices, regular + Duffy quadrature.
/// LOBI: flat triangles, unknowns at centroids, one-point centroid rule.
enum class Scheme { hobi, lobi };

std::string_view scheme_name(Scheme s);
/// Throws DomainError for anything but "hobi" / "lobi".
Scheme parse_scheme(std::string_view name);

struct SolverConfig {
  double tol = 1e-6;
  int restart = 100;
  int max_iterations = 1000;
  /// < 1 selects all hardware threads.
  int workers = 0;
  Scheme scheme = Scheme::hobi;
  /// Gauss-Legendre points per direction of the singular (Duffy) rule.
  int singular_points = 4;

  void validate() const;
};

/// Source quadrature points in structure-of-arrays layout. Each point carries
/// W_{m,n} = rule weight * surface Jacobian * linear field weight of its
/// element's n-th vertex, together with that vertex's global unknown index.
struct QuadraturePoints {
  std::vector<double> x, y, z;
  std::vector<double> nx, ny, nz;
  std::vector<std::array<double, 3>> field_weight;
  std::vector<std::array<int, 3>> field_index;

  std::size_t size() const { return x.size(); }
  void reserve(std::size_t n);
  void push_back(const Vec3& p, const Vec3& n, const std::array<double, 3>& w, const std::array<int, 3>& idx);
  std::size_t bytes() const;
};

class DiscretizedProblem {
 public:
  const FlatMesh& mesh() const { return mesh_; }
  const PhysicalParams& params() const { return params_; }
  const ChargeSystem& charges() const { return charges_; }
  const SolverConfig& config() const { return config_; }
  Scheme scheme() const { return config_.scheme; }

  /// Collocation targets: N_v for HOBI, N_f for LOBI.
  std::size_t num_targets() const { return target_pos_.size(); }
  /// Length of the unknown vector: 2 * num_targets().
  std::size_t num_unknowns() const { return 2 * num_targets(); }
  const std::vector<Vec3>& target_positions() const { return target_pos_; }
  const std::vector<Vec3>& target_normals() const { return target_normal_; }

  /// Curved elements (HOBI only; empty for LOBI).
  const std::vector<CurvedElement>& elements() const { return elements_; }
  /// Points per element of the regular rule (1 for LOBI).
  std::size_t points_per_element() const { return points_per_element_; }
  /// Regular-rule points, element-major: element j owns
  /// [j * points_per_element(), (j + 1) * points_per_element()).
  const QuadraturePoints& regular_points() const { return regular_; }

  /// Elements touching target i (HOBI: faces incident to vertex i; LOBI: face i),
  /// ascending. These are skipped by the regular sum for row i.
  std::span<const int> singular_elements(std::size_t i) const;
  /// Duffy points of all rows (HOBI only); row i owns singular_range(i).
  /// Each element is rotated so that vertex i sits at (r, s) = (0, 0).
  const QuadraturePoints& singular_cache() const { return singular_; }
  IndexRange singular_range(std::size_t i) const { return {singular_offset_[i], singular_offset_[i + 1]}; }
  std::size_t max_singular_elements() const;

  const TriangleRule& regular_rule() const { return regular_rule_; }
  const TriangleRule& singular_rule() const { return singular_rule_; }
  /// Deterministic lower bound on cache memory in bytes.
  std::size_t cache_bytes() const;

 private:
  friend DiscretizedProblem discretize(const FlatMesh&, const PhysicalParams&, const ChargeSystem&,
                                       const SolverConfig&);

  FlatMesh mesh_;
  PhysicalParams params_;
  ChargeSystem charges_;
  SolverConfig config_;
  TriangleRule regular_rule_;
  TriangleRule singular_rule_;
  std::vector<Vec3> target_pos_;
  std::vector<Vec3> target_normal_;
  std::vector<CurvedElement> elements_;
  std::size_t points_per_element_ = 0;
  QuadraturePoints regular_;
  std::vector<std::size_t> incident_offset_;
  std::vector<int> incident_;
  std::vector<std::size_t> singular_offset_;
  QuadraturePoints singular_;
};

/// Validates the mesh and builds every geometry and quadrature cache.
DiscretizedProblem discretize(const FlatMesh& mesh, const PhysicalParams& params, const ChargeSystem& charges,
                              const SolverConfig& config);

/// Matrix-free operator application. `workers` < 1 uses the problem's
/// configured worker count. Output is independent of the worker count.
std::vector<double> matvec_hobi(const DiscretizedProblem& problem, std::span<const double> u, int workers = 0);
std::vector<double> matvec_lobi(const DiscretizedProblem& problem, std::span<const double> u, int workers = 0);
std::vector<double> apply_operator(const DiscretizedProblem& problem, std::span<const double> u, int workers = 0);

/// (S1 at every target, then S2 at every target).
std::vector<double> assemble_rhs(const DiscretizedProblem& problem);

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations, zero
/// initial guess, stopping when |b - Ax| <= tol |b| (true residual checked at
/// every restart boundary). Throws ConvergenceError after max_iterations.
GmresResult gmres(const LinearOperator& apply, std::span<const double> b, const SolverConfig& config);

struct SurfaceSolution {
  std::vector<double> phi;
  std::vector<double> dphi_dn;
  Scheme scheme = Scheme::hobi;
  int iterations = 0;
  double residual = 0.0;

  std::vector<double> packed() const;
};

SurfaceSolution gmres_solve(const DiscretizedProblem& problem, std::span<const double> b);
/// assemble_rhs + gmres_solve.
SurfaceSolution solve(const DiscretizedProblem& problem);

/// Reaction potential at each charge, in G0 = 1/(4 pi R) units.
std::vector<double> reaction_potentials(const DiscretizedProblem& problem, const SurfaceSolution& solution);
/// Electrostatic solvation energy in kcal/mol.
double solvation_energy(const DiscretizedProblem& problem, const SurfaceSolution& solution);

/// max_i |num_i - exact_i| / max_i |exact_i|.
double surface_potential_error(std::span<const double> numerical, std::span<const double> exact);

/// log(coarse_error / fine_error) / |log(coarse_mesh / fine_mesh)|: positive
/// for converging errors whether "mesh" is a spacing or a density.
double convergence_order(double coarse_mesh, double fine_mesh, double coarse_error, double fine_error);

}  // namespace hobipb
