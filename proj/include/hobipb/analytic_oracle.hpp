#pragma once

// Reference solutions of the linearized Poisson-Boltzmann problem for point
// charges inside a dielectric sphere centered at the origin. Potentials use
// the same scaling as the solver: a charge q contributes q / (4 pi eps1 R)
// inside the cavity.

#include "hobipb/common.hpp"
#include "hobipb/kernels.hpp"
#include "hobipb/mesh_io.hpp"

#include <vector>

namespace hobipb {

struct SphereProblem {
  double radius = 1.0;
  PhysicalParams params;
  ChargeSystem charges;

  /// Throws DomainError unless radius > 0 and every charge sits strictly
  /// inside (|y| < radius - 1e-9).
  void validate() const;
};

struct CenteredSolution {
  double energy = 0.0;   // kcal/mol
  double phi = 0.0;      // surface potential, uniform
  double dphi_dn = 0.0;  // interior normal derivative, uniform
};

/// Closed form for a single charge at the origin. Throws DomainError for
/// anything else.
CenteredSolution kirkwood_centered(const SphereProblem& problem);

/// a * k_n'(x) / k_n(x) evaluated as x * k_n'(x) / k_n(x) for x = kappa * a;
/// equals -(n + 1) at x = 0.
double bessel_k_log_derivative(int n, double x);

/// k_0..k_{n_max} with the normalization k_0(x) = exp(-x) / x, by upward
/// recurrence k_{n+1} = k_{n-1} + (2n + 1) / x * k_n.
std::vector<double> bessel_k(int n_max, double x);

/// Legendre expansion of the reaction field, truncated after n_terms modes
/// (n = 0 .. n_terms - 1).
class KirkwoodSeries {
 public:
  static constexpr int kDefaultTerms = 40;

  explicit KirkwoodSeries(const SphereProblem& problem, int n_terms = kDefaultTerms);

  int n_terms() const { return n_terms_; }
  const SphereProblem& problem() const { return problem_; }

  /// Solvation energy in kcal/mol.
  double energy() const;
  /// Reaction potential at an interior point.
  double reaction_potential(const Vec3& x) const;
  /// Surface potential and interior normal derivative at the surface point in
  /// the direction of x (x is projected radially onto the sphere).
  double potential(const Vec3& x) const;
  double normal_derivative(const Vec3& x) const;

  /// Ratio of the magnitudes of the last two surface-potential modes,
  /// maximized over charges; approaches the largest eccentricity rho / a.
  double tail_ratio() const;
  /// Magnitude of the truncated tail of the surface series, estimated
  /// geometrically from the last term and tail_ratio().
  double tail_estimate() const;
  /// False when tail_ratio() exceeds 0.99.
  bool converged() const { return tail_ratio() <= 0.99; }

  /// Smallest term count whose geometric tail estimate is below `tol`
  /// relative to the leading reaction mode, capped at `max_terms`.
  static int terms_for(const SphereProblem& problem, double tol, int max_terms = 2000);

 private:
  SphereProblem problem_;
  int n_terms_;
  // coef_[k][n] = B_n a^n for charge k, multiplying (r/a)^n P_n(cos angle to y_k).
  std::vector<std::vector<double>> coef_;
  std::vector<Vec3> dir_;
  std::vector<double> rho_;
};

}  // namespace hobipb
