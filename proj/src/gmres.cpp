#include "hobipb/bem_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hobipb {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, std::span<const double> b, const SolverConfig& config) {
  config.validate();
  const std::size_t n = b.size();
  GmresResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;
  const double target = config.tol * bnorm;
  const auto m = static_cast<std::size_t>(config.restart);

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> w(n);
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1);
  double best = norm2(r) / bnorm;
  int it = 0;

  while (true) {
    double beta = norm2(r);
    best = std::min(best, beta / bnorm);
    if (beta <= target) break;
    if (it >= config.max_iterations)
      throw ConvergenceError("GMRES did not converge in " + std::to_string(it) + " iterations (best relative residual " +
                                 std::to_string(best) + ")",
                             best, it);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    std::size_t k = 0;
    for (; k < m && it < config.max_iterations; ++k) {
      ++it;
      apply(v[k], w);
      for (std::size_t j = 0; j <= k; ++j) {
        h[j][k] = dot(w, v[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= h[j][k] * v[j][i];
      }
      h[k + 1][k] = norm2(w);
      const bool breakdown = h[k + 1][k] == 0.0;
      if (!breakdown)
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / h[k + 1][k];
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = t;
      }
      const double den = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = den > 0.0 ? h[k][k] / den : 1.0;
      sn[k] = den > 0.0 ? h[k + 1][k] / den : 0.0;
      h[k][k] = den;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= target || breakdown) {
        ++k;
        break;
      }
    }
    // Back substitution for y, then x += V y.
    std::vector<double> y(k);
    for (std::size_t jj = k; jj-- > 0;) {
      double s = g[jj];
      for (std::size_t l = jj + 1; l < k; ++l) s -= h[jj][l] * y[l];
      y[jj] = h[jj][jj] != 0.0 ? s / h[jj][jj] : 0.0;
    }
    for (std::size_t jj = 0; jj < k; ++jj)
      for (std::size_t i = 0; i < n; ++i) res.x[i] += y[jj] * v[jj][i];
    apply(res.x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    if (k == 0) break;
  }
  res.iterations = it;
  res.residual = norm2(r) / bnorm;
  if (res.residual > config.tol)
    throw ConvergenceError("GMRES stagnated at relative residual " + std::to_string(res.residual), res.residual, it);
  return res;
}

std::vector<double> SurfaceSolution::packed() const {
  std::vector<double> out(phi);
  out.insert(out.end(), dphi_dn.begin(), dphi_dn.end());
  return out;
}

SurfaceSolution gmres_solve(const DiscretizedProblem& problem, std::span<const double> b) {
  if (b.size() != problem.num_unknowns())
    throw DomainError("right-hand side has length " + std::to_string(b.size()) + ", expected " +
                      std::to_string(problem.num_unknowns()));
  const LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
    const auto y = apply_operator(problem, in);
    std::copy(y.begin(), y.end(), out.begin());
  };
  GmresResult g = gmres(op, b, problem.config());
  const std::size_t n = problem.num_targets();
  SurfaceSolution s;
  s.phi.assign(g.x.begin(), g.x.begin() + static_cast<std::ptrdiff_t>(n));
  s.dphi_dn.assign(g.x.begin() + static_cast<std::ptrdiff_t>(n), g.x.end());
  s.scheme = problem.scheme();
  s.iterations = g.iterations;
  s.residual = g.residual;
  return s;
}

SurfaceSolution solve(const DiscretizedProblem& problem) {
  const auto rhs = assemble_rhs(problem);
  return gmres_solve(problem, rhs);
}

}  // namespace hobipb
