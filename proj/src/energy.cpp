#include "hobipb/bem_solver.hpp"

namespace hobipb {

std::vector<double> reaction_potentials(const DiscretizedProblem& problem, const SurfaceSolution& solution) {
  const std::size_t n = problem.num_targets();
  if (solution.phi.size() != n || solution.dphi_dn.size() != n)
    throw DomainError("surface solution does not match the discretization");
  const QuadraturePoints& pts = problem.regular_points();
  const ChargeSystem& ch = problem.charges();

  // Interior Green representation minus the Coulomb part:
  // phi_reac(x) = int G0 dphi/dn - dG0/dn_y phi dS.
  std::vector<double> out(ch.size(), 0.0);
  parallel_for(ch.size(), resolve_workers(problem.config().workers), [&](IndexRange r, int) {
    for (std::size_t k = r.begin; k < r.end; ++k) {
      const Vec3& x = ch.positions[k];
      double s = 0.0;
      for (std::size_t m = 0; m < pts.size(); ++m) {
        const auto& w = pts.field_weight[m];
        const auto& idx = pts.field_index[m];
        const double a = w[0] * solution.dphi_dn[idx[0]] + w[1] * solution.dphi_dn[idx[1]] +
                         w[2] * solution.dphi_dn[idx[2]];
        const double b = w[0] * solution.phi[idx[0]] + w[1] * solution.phi[idx[1]] + w[2] * solution.phi[idx[2]];
        const double dx = x.x() - pts.x[m], dy = x.y() - pts.y[m], dz = x.z() - pts.z[m];
        const double r2 = dx * dx + dy * dy + dz * dz;
        const double inv_r = 1.0 / std::sqrt(r2);
        const double g = kInv4Pi * inv_r;
        const double dny = dx * pts.nx[m] + dy * pts.ny[m] + dz * pts.nz[m];
        s += g * a - g * inv_r * inv_r * dny * b;
      }
      out[k] = s;
    }
  });
  return out;
}

double solvation_energy(const DiscretizedProblem& problem, const SurfaceSolution& solution) {
  const auto phi = reaction_potentials(problem, solution);
  double e = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) e += problem.charges().charges[k] * phi[k];
  return 0.5 * kEnergyUnits * e;
}

}  // namespace hobipb
