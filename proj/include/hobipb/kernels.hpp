#pragma once

#include "hobipb/common.hpp"
#include "hobipb/mesh_io.hpp"

#include <cmath>

namespace hobipb {

/// Dielectric constants of the solute (eps1) and solvent (eps2) and the
/// Debye-Hueckel screening parameter kappa in 1/Angstrom.
struct PhysicalParams {
  double eps1 = 1.0;
  double eps2 = 80.0;
  double kappa = 0.0;

  /// Dielectric ratio entering the boundary equations: solvent over solute.
  double eps() const { return eps2 / eps1; }
  /// Throws DomainError unless eps1 > 0, eps2 > 0 and kappa >= 0.
  void validate() const;
};

double g0(const Vec3& x, const Vec3& y);
double g_kappa(const Vec3& x, const Vec3& y, double kappa);

struct KernelValues {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

/// Pointwise kernel formulas shared by the scalar paths. `d` = x - y.
/// All four kernels are written as differences of the Coulomb and screened
/// terms so they vanish exactly when kappa = 0 and eps = 1.
struct KernelFormula {
  double eps;
  double inv_eps;
  double kappa;

  KernelValues operator()(double dx, double dy, double dz, double nxx, double nxy, double nxz, double nyx,
                          double nyy, double nyz) const {
    const double r2 = dx * dx + dy * dy + dz * dz;
    const double r = std::sqrt(r2);
    const double inv_r = 1.0 / r;
    const double inv_r2 = inv_r * inv_r;
    const double g = kInv4Pi * inv_r;
    const double t0 = g * inv_r2;
    const double kr = kappa * r;
    const double e = std::exp(-kr);
    const double a = 1.0 + kr;
    const double ea = e * a;
    const double tk = t0 * ea;
    const double dnx = dx * nxx + dy * nxy + dz * nxz;
    const double dny = dx * nyx + dy * nyy + dz * nyz;
    const double nn = nxx * nyx + nxy * nyy + nxz * nyz;
    KernelValues kv;
    kv.k1 = g * (1.0 - e);
    kv.k2 = dny * (eps * tk - t0);
    kv.k3 = dnx * (inv_eps * tk - t0);
    kv.k4 = t0 * ((ea - 1.0) * nn - (e * (3.0 * a + kr * kr) - 3.0) * (dnx * dny * inv_r2));
    return kv;
  }
};

/// K1..K4 of the second-kind boundary formulation at target (x, nx) and
/// source (y, ny):
///   K1 = G0 - Gk
///   K2 = eps dGk/dny - dG0/dny
///   K3 = dG0/dnx - (1/eps) dGk/dnx
///   K4 = d2Gk/dnxdny - d2G0/dnxdny
/// with eps = eps2/eps1. Throws SingularityError when x == y.
KernelValues kernel_block(const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3& ny, const PhysicalParams& params);

struct SourceValues {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// S1 = sum q_k G0(x, y_k) / eps1 and S2 = sum q_k dG0(x, y_k)/dnx / eps1.
/// The 1/eps1 factor makes the surface potential the physical potential
/// divided by 4*pi (Gaussian units, e_c / Angstrom).
SourceValues source_terms(const Vec3& x, const Vec3& nx, const ChargeSystem& charges, const PhysicalParams& params);

/// kcal/mol per (e_c^2 / Angstrom) for potentials in the G0 = 1/(4 pi R) scaling:
/// 332.0716 * 4 pi.
inline constexpr double kEnergyUnits = 332.0716 * 4.0 * kPi;

}  // namespace hobipb
