#pragma once

#include "hobipb/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hobipb {

/// Quadrature on the reference triangle {r, s >= 0, r + s <= 1}.
/// Weights sum to the reference area 1/2.
struct TriangleRule {
  std::vector<double> r;
  std::vector<double> s;
  std::vector<double> w;
  std::string name;
  /// Highest total degree d such that all monomials r^a s^b, a + b <= d,
  /// are integrated to 1e-13 relative accuracy. Measured, not declared.
  int exactness_degree = -1;

  std::size_t size() const { return w.size(); }
};

/// Exact integral of r^a s^b over the reference triangle: a! b! / (a + b + 2)!.
double reference_monomial_integral(int a, int b);

/// Highest total degree integrated exactly by `rule` (checked up to max_degree).
int measure_exactness_degree(const TriangleRule& rule, int max_degree = 12);

/// Four-point regular rule: a collapsed 2x2 product of Gauss-Jacobi(1,0)
/// points in the collapsed direction and Gauss-Legendre points along the
/// edge, mapped by r = x(1-y), s = xy. Positive weights, exact to degree 3.
const TriangleRule& gauss_radau_rule();

/// n-point Gauss-Legendre rule mapped to [0, 1]; 1 <= n <= 32.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_1d(int n);

/// n x n tensor Gauss-Legendre rule on the unit square pushed through
/// r = (1-y)x, s = yx. Weights include the map's Jacobian x, so a 1/R
/// singularity at (r, s) = (0, 0) is integrated as a smooth function.
TriangleRule duffy_rule(int n);

}  // namespace hobipb
