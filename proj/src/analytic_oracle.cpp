#include "hobipb/analytic_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace hobipb {

namespace {

// P_0..P_{n-1}(t).
void legendre_all(int n, double t, std::vector<double>& p) {
  p.resize(static_cast<std::size_t>(n));
  p[0] = 1.0;
  if (n > 1) p[1] = t;
  for (int k = 2; k < n; ++k) p[k] = ((2.0 * k - 1.0) * t * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
}

}  // namespace

void SphereProblem::validate() const {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  params.validate();
  if (charges.positions.size() != charges.charges.size()) throw DomainError("charge positions and values differ in length");
  for (const auto& y : charges.positions)
    if (!(y.norm() < radius - 1e-9)) throw DomainError("every charge must lie strictly inside the sphere");
}

CenteredSolution kirkwood_centered(const SphereProblem& problem) {
  problem.validate();
  if (problem.charges.size() != 1 || problem.charges.positions[0].norm() != 0.0)
    throw DomainError("closed form needs exactly one charge at the origin; use KirkwoodSeries instead");
  const double q = problem.charges.charges[0];
  const double a = problem.radius;
  const auto& p = problem.params;
  const double ka = 1.0 + p.kappa * a;
  CenteredSolution s;
  s.phi = q * kInv4Pi / (a * p.eps2 * ka);
  s.dphi_dn = -q * kInv4Pi / (p.eps1 * a * a);
  const double reaction = q * kInv4Pi / a * (1.0 / (p.eps2 * ka) - 1.0 / p.eps1);
  s.energy = 0.5 * kEnergyUnits * q * reaction;
  return s;
}

std::vector<double> bessel_k(int n_max, double x) {
  if (n_max < 0 || !(x > 0.0)) throw DomainError("bessel_k needs n_max >= 0 and x > 0");
  std::vector<double> k(static_cast<std::size_t>(n_max) + 1);
  k[0] = std::exp(-x) / x;
  double prev = k[0];  // k_{-1} = k_0
  for (int n = 0; n < n_max; ++n) {
    const double next = prev + (2.0 * n + 1.0) / x * k[n];
    prev = k[n];
    k[n + 1] = next;
  }
  return k;
}

double bessel_k_log_derivative(int n, double x) {
  if (n < 0 || x < 0.0) throw DomainError("log derivative needs n >= 0 and x >= 0");
  if (x == 0.0) return -(n + 1.0);
  // r_n = k_{n-1} / k_n, r_0 = 1, 1 / r_{n+1} = r_n + (2n + 1) / x.
  double r = 1.0;
  for (int m = 0; m < n; ++m) r = 1.0 / (r + (2.0 * m + 1.0) / x);
  return -x * r - (n + 1.0);
}

KirkwoodSeries::KirkwoodSeries(const SphereProblem& problem, int n_terms) : problem_(problem), n_terms_(n_terms) {
  problem_.validate();
  if (n_terms < 1) throw DomainError("series needs at least one term");
  const double a = problem_.radius;
  const double e1 = problem_.params.eps1;
  const double e2 = problem_.params.eps2;
  const double x = problem_.params.kappa * a;
  std::vector<double> factor(static_cast<std::size_t>(n_terms));
  for (int n = 0; n < n_terms; ++n) {
    const double L = bessel_k_log_derivative(n, x);
    factor[n] = (e2 * L + e1 * (n + 1.0)) / (e1 * n - e2 * L);
  }
  const std::size_t nc = problem_.charges.size();
  coef_.resize(nc);
  dir_.resize(nc);
  rho_.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const Vec3& y = problem_.charges.positions[k];
    rho_[k] = y.norm();
    dir_[k] = rho_[k] > 0.0 ? Vec3(y / rho_[k]) : Vec3(0.0, 0.0, 1.0);
    coef_[k].resize(static_cast<std::size_t>(n_terms));
    const double lead = problem_.charges.charges[k] * kInv4Pi / (e1 * a);
    double t = 1.0;
    for (int n = 0; n < n_terms; ++n) {
      coef_[k][n] = lead * t * factor[n];
      t *= rho_[k] / a;
    }
  }
}

double KirkwoodSeries::reaction_potential(const Vec3& x) const {
  const double r = x.norm();
  const double ra = r / problem_.radius;
  const Vec3 xh = r > 0.0 ? Vec3(x / r) : Vec3(0.0, 0.0, 1.0);
  std::vector<double> p;
  double s = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    legendre_all(n_terms_, xh.dot(dir_[k]), p);
    double rn = 1.0;
    for (int n = 0; n < n_terms_; ++n) {
      s += coef_[k][n] * rn * p[n];
      rn *= ra;
    }
  }
  return s;
}

double KirkwoodSeries::energy() const {
  double e = 0.0;
  for (std::size_t j = 0; j < coef_.size(); ++j)
    e += problem_.charges.charges[j] * reaction_potential(problem_.charges.positions[j]);
  return 0.5 * kEnergyUnits * e;
}

double KirkwoodSeries::potential(const Vec3& x) const {
  const double a = problem_.radius;
  const Vec3 xs = a * x.normalized();
  double coulomb = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k)
    coulomb += problem_.charges.charges[k] * kInv4Pi / ((xs - problem_.charges.positions[k]).norm() * problem_.params.eps1);
  return coulomb + reaction_potential(xs);
}

double KirkwoodSeries::normal_derivative(const Vec3& x) const {
  const double a = problem_.radius;
  const Vec3 xh = x.normalized();
  const Vec3 xs = a * xh;
  std::vector<double> p;
  double s = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    const Vec3 d = xs - problem_.charges.positions[k];
    const double R = d.norm();
    s -= problem_.charges.charges[k] * kInv4Pi / problem_.params.eps1 * d.dot(xh) / (R * R * R);
    legendre_all(n_terms_, xh.dot(dir_[k]), p);
    for (int n = 1; n < n_terms_; ++n) s += n * coef_[k][n] * p[n] / a;
  }
  return s;
}

double KirkwoodSeries::tail_ratio() const {
  if (n_terms_ < 2) return std::all_of(rho_.begin(), rho_.end(), [](double r) { return r == 0.0; }) ? 0.0 : 1.0;
  double best = 0.0;
  for (const auto& c : coef_) {
    const double last = std::abs(c[n_terms_ - 1]);
    const double prev = std::abs(c[n_terms_ - 2]);
    if (prev > 0.0) best = std::max(best, last / prev);
  }
  return best;
}

double KirkwoodSeries::tail_estimate() const {
  const double t = tail_ratio();
  if (t >= 1.0) return INFINITY;
  double last = 0.0;
  for (const auto& c : coef_) last += std::abs(c[n_terms_ - 1]);
  return last * t / (1.0 - t);
}

int KirkwoodSeries::terms_for(const SphereProblem& problem, double tol, int max_terms) {
  problem.validate();
  double rho = 0.0;
  for (const auto& y : problem.charges.positions) rho = std::max(rho, y.norm() / problem.radius);
  if (rho == 0.0) return 1;
  // Surface modes decay like (rho / a)^n.
  const int n = static_cast<int>(std::ceil(std::log(tol * (1.0 - rho)) / std::log(rho))) + 2;
  return std::clamp(n, 2, max_terms);
}

}  // namespace hobipb
