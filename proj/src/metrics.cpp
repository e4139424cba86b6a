#include "hobipb/bem_solver.hpp"

#include <cmath>

namespace hobipb {

double surface_potential_error(std::span<const double> numerical, std::span<const double> exact) {
  if (numerical.size() != exact.size() || exact.empty())
    throw DomainError("error norm needs two non-empty vectors of equal length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num = std::max(num, std::abs(numerical[i] - exact[i]));
    den = std::max(den, std::abs(exact[i]));
  }
  if (den == 0.0) throw DomainError("exact solution is identically zero");
  return num / den;
}

double convergence_order(double coarse_mesh, double fine_mesh, double coarse_error, double fine_error) {
  if (!(coarse_mesh > 0.0 && fine_mesh > 0.0 && coarse_error > 0.0 && fine_error > 0.0))
    throw DomainError("convergence order needs positive mesh sizes and errors");
  if (coarse_mesh == fine_mesh) throw DomainError("convergence order needs two distinct meshes");
  return std::log(coarse_error / fine_error) / std::abs(std::log(coarse_mesh / fine_mesh));
}

}  // namespace hobipb
