#include "hobipb/bem_solver.hpp"
#include "hobipb/simd/row_kernels.hpp"

namespace hobipb {

namespace {

// Interpolated, quadrature-weighted fields at source points:
// a_m = sum_n W_{m,n} dphi[idx_n], b_m = sum_n W_{m,n} phi[idx_n].
void weight_fields(const QuadraturePoints& pts, IndexRange r, std::span<const double> u, std::size_t n,
                   double* a, double* b) {
  for (std::size_t m = r.begin; m < r.end; ++m) {
    const auto& w = pts.field_weight[m];
    const auto& idx = pts.field_index[m];
    a[m - r.begin] = w[0] * u[n + idx[0]] + w[1] * u[n + idx[1]] + w[2] * u[n + idx[2]];
    b[m - r.begin] = w[0] * u[idx[0]] + w[1] * u[idx[1]] + w[2] * u[idx[2]];
  }
}

simd::SourceBatch batch(const QuadraturePoints& pts, std::size_t offset, const double* a, const double* b,
                        std::size_t count) {
  return {pts.x.data() + offset,  pts.y.data() + offset,  pts.z.data() + offset,
          pts.nx.data() + offset, pts.ny.data() + offset, pts.nz.data() + offset,
          a,                      b,                      count};
}

std::vector<double> apply(const DiscretizedProblem& problem, std::span<const double> u, int workers) {
  const std::size_t n = problem.num_targets();
  if (u.size() != 2 * n)
    throw DomainError("operator input has length " + std::to_string(u.size()) + ", expected " + std::to_string(2 * n));
  const int nw = resolve_workers(workers >= 1 ? workers : problem.config().workers);
  const double eps = problem.params().eps();
  const simd::KernelConstants kc{eps, 1.0 / eps, problem.params().kappa};
  const double diag1 = 0.5 * (1.0 + eps);
  const double diag2 = 0.5 * (1.0 + 1.0 / eps);

  const QuadraturePoints& reg = problem.regular_points();
  const std::size_t q = problem.points_per_element();
  std::vector<double> a(reg.size()), b(reg.size());
  parallel_for(reg.size(), nw, [&](IndexRange r, int) { weight_fields(reg, r, u, n, a.data() + r.begin, b.data() + r.begin); });

  const QuadraturePoints& sing = problem.singular_cache();
  std::vector<double> out(2 * n);
  parallel_for(n, nw, [&](IndexRange r, int) {
    std::vector<double> sa, sb;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const Vec3& x = problem.target_positions()[i];
      const Vec3& nx = problem.target_normals()[i];
      const simd::Target t{x.x(), x.y(), x.z(), nx.x(), nx.y(), nx.z()};

      // Regular part: every element except the ones touching target i, in
      // ascending element order.
      double s1 = 0.0, s2 = 0.0;
      std::size_t begin = 0;
      auto run = [&](std::size_t end) {
        if (end > begin) {
          const auto rs = simd::row_sums(t, batch(reg, begin, a.data() + begin, b.data() + begin, end - begin), kc);
          s1 += rs.first;
          s2 += rs.second;
        }
      };
      for (int j : problem.singular_elements(i)) {
        run(static_cast<std::size_t>(j) * q);
        begin = (static_cast<std::size_t>(j) + 1) * q;
      }
      run(reg.size());

      // Singular part on the Duffy-rotated incident elements.
      const IndexRange sr = problem.singular_range(i);
      if (!sr.empty()) {
        sa.resize(sr.size());
        sb.resize(sr.size());
        weight_fields(sing, sr, u, n, sa.data(), sb.data());
        const auto rs = simd::row_sums(t, batch(sing, sr.begin, sa.data(), sb.data(), sr.size()), kc);
        s1 += rs.first;
        s2 += rs.second;
      }

      out[i] = diag1 * u[i] - s1;
      out[n + i] = diag2 * u[n + i] - s2;
    }
  });
  return out;
}

}  // namespace

std::vector<double> matvec_hobi(const DiscretizedProblem& problem, std::span<const double> u, int workers) {
  if (problem.scheme() != Scheme::hobi) throw DomainError("matvec_hobi called on a LOBI discretization");
  return apply(problem, u, workers);
}

std::vector<double> matvec_lobi(const DiscretizedProblem& problem, std::span<const double> u, int workers) {
  if (problem.scheme() != Scheme::lobi) throw DomainError("matvec_lobi called on a HOBI discretization");
  return apply(problem, u, workers);
}

std::vector<double> apply_operator(const DiscretizedProblem& problem, std::span<const double> u, int workers) {
  return apply(problem, u, workers);
}

std::vector<double> assemble_rhs(const DiscretizedProblem& problem) {
  const std::size_t n = problem.num_targets();
  std::vector<double> rhs(2 * n);
  parallel_for(n, resolve_workers(problem.config().workers), [&](IndexRange r, int) {
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const auto sv = source_terms(problem.target_positions()[i], problem.target_normals()[i], problem.charges(),
                                   problem.params());
      rhs[i] = sv.s1;
      rhs[n + i] = sv.s2;
    }
  });
  return rhs;
}

}  // namespace hobipb
