#include "hobipb/kernels.hpp"

namespace hobipb {

void PhysicalParams::validate() const {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw DomainError("dielectric constants must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be finite and non-negative");
}

double g0(const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw SingularityError("G0 evaluated at coincident points");
  return kInv4Pi / r;
}

double g_kappa(const Vec3& x, const Vec3& y, double kappa) {
  const double r = (x - y).norm();
  if (!(r > 0.0)) throw SingularityError("Gk evaluated at coincident points");
  return kInv4Pi * std::exp(-kappa * r) / r;
}

KernelValues kernel_block(const Vec3& x, const Vec3& nx, const Vec3& y, const Vec3& ny, const PhysicalParams& params) {
  const Vec3 d = x - y;
  if (!(d.squaredNorm() > 0.0)) throw SingularityError("kernel evaluated at coincident points");
  const KernelFormula f{params.eps(), 1.0 / params.eps(), params.kappa};
  return f(d.x(), d.y(), d.z(), nx.x(), nx.y(), nx.z(), ny.x(), ny.y(), ny.z());
}

SourceValues source_terms(const Vec3& x, const Vec3& nx, const ChargeSystem& charges, const PhysicalParams& params) {
  SourceValues sv;
  for (std::size_t k = 0; k < charges.size(); ++k) {
    const Vec3 d = x - charges.positions[k];
    const double r2 = d.squaredNorm();
    if (!(r2 > 0.0)) throw SingularityError("surface point coincides with charge " + std::to_string(k));
    const double r = std::sqrt(r2);
    const double g = kInv4Pi / r;
    sv.s1 += charges.charges[k] * g;
    sv.s2 -= charges.charges[k] * g * d.dot(nx) / r2;
  }
  sv.s1 /= params.eps1;
  sv.s2 /= params.eps1;
  return sv;
}

}  // namespace hobipb
