#include "hobipb/analytic_oracle.hpp"
#include "hobipb/bem_solver.hpp"
#include "hobipb/simd/row_kernels.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace hobipb;

namespace {

ChargeSystem charge_at(const Vec3& p, double q = 1.0) {
  ChargeSystem c;
  c.positions = {p};
  c.charges = {q};
  return c;
}

SolverConfig config(Scheme s, int workers = 1) {
  SolverConfig c;
  c.scheme = s;
  c.workers = workers;
  return c;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Independent O(N^2) HOBI operator: integrates every element directly from
// element frames, rotating each singular element so the target vertex sits
// at the collapsed corner.
std::vector<double> naive_hobi(const DiscretizedProblem& p, const std::vector<double>& u) {
  const std::size_t n = p.num_targets();
  const PhysicalParams& pp = p.params();
  const TriangleRule& reg = p.regular_rule();
  const TriangleRule& sing = p.singular_rule();
  std::vector<double> out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = p.target_positions()[i];
    const Vec3& nx = p.target_normals()[i];
    double s1 = 0, s2 = 0;
    for (const CurvedElement& e : p.elements()) {
      int local = -1;
      for (int k = 0; k < 3; ++k)
        if (e.vertex_ids[k] == static_cast<int>(i)) local = k;
      const TriangleRule& rule = local < 0 ? reg : sing;
      for (std::size_t m = 0; m < rule.size(); ++m) {
        double lam[3];
        if (local < 0) {
          lam[0] = 1 - rule.r[m] - rule.s[m];
          lam[1] = rule.r[m];
          lam[2] = rule.s[m];
        } else {
          lam[local] = 1 - rule.r[m] - rule.s[m];
          lam[(local + 1) % 3] = rule.r[m];
          lam[(local + 2) % 3] = rule.s[m];
        }
        const SurfaceFrame fr = element_frame(e, lam[1], lam[2]);
        const KernelValues k = kernel_block(x, nx, fr.position, fr.normal, pp);
        double phi = 0, dphi = 0;
        for (int c = 0; c < 3; ++c) {
          phi += lam[c] * u[e.vertex_ids[c]];
          dphi += lam[c] * u[n + e.vertex_ids[c]];
        }
        const double w = rule.w[m] * fr.jacobian;
        s1 += w * (k.k1 * dphi + k.k2 * phi);
        s2 += w * (k.k3 * dphi + k.k4 * phi);
      }
    }
    out[i] = 0.5 * (1 + pp.eps()) * u[i] - s1;
    out[n + i] = 0.5 * (1 + 1 / pp.eps()) * u[n + i] - s2;
  }
  return out;
}

}  // namespace

TEST(Scheme, Names) {
  EXPECT_EQ(parse_scheme("hobi"), Scheme::hobi);
  EXPECT_EQ(parse_scheme("lobi"), Scheme::lobi);
  EXPECT_EQ(scheme_name(Scheme::lobi), "lobi");
  EXPECT_THROW(parse_scheme("bem"), DomainError);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tol = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = SolverConfig{};
  c.restart = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Discretize, CacheShapes) {
  const FlatMesh m = icosahedral_sphere(1, 1.0);
  const auto p = discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::hobi));
  EXPECT_EQ(p.num_targets(), m.num_vertices());
  EXPECT_EQ(p.regular_points().size(), m.num_faces() * 4);
  std::set<std::size_t> valence;
  for (std::size_t i = 0; i < p.num_targets(); ++i) {
    valence.insert(p.singular_elements(i).size());
    EXPECT_EQ(p.singular_range(i).size(), p.singular_elements(i).size() * 16);
    EXPECT_TRUE(std::is_sorted(p.singular_elements(i).begin(), p.singular_elements(i).end()));
  }
  EXPECT_EQ(valence, (std::set<std::size_t>{5, 6}));
  EXPECT_EQ(p.max_singular_elements(), 6u);
  EXPECT_GT(p.cache_bytes(), 0u);

  const auto l = discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::lobi));
  EXPECT_EQ(l.num_targets(), m.num_faces());
  EXPECT_EQ(l.regular_points().size(), m.num_faces());
  EXPECT_TRUE(l.singular_range(3).empty());
}

TEST(Discretize, RejectsInvalidInputs) {
  FlatMesh m = icosahedral_sphere(1, 1.0);
  EXPECT_THROW(discretize(m, PhysicalParams{1, 80, -1}, ChargeSystem{}, config(Scheme::hobi)), DomainError);
  m.faces.pop_back();
  EXPECT_THROW(discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::hobi)), ValidationError);
}

TEST(Matvec, IdentityCaseExact) {
  const FlatMesh m = icosahedral_sphere(2, 1.0);
  for (Scheme s : {Scheme::hobi, Scheme::lobi}) {
    const auto p = discretize(m, PhysicalParams{3, 3, 0}, ChargeSystem{}, config(s));
    const auto u = random_vector(p.num_unknowns(), 5);
    const auto y = apply_operator(p, u);
    for (std::size_t i = 0; i < u.size(); ++i) ASSERT_EQ(y[i], u[i]) << scheme_name(s) << " row " << i;
  }
}

TEST(Matvec, Linearity) {
  const FlatMesh m = icosahedral_sphere(2, 1.0);
  for (Scheme s : {Scheme::hobi, Scheme::lobi}) {
    const auto p = discretize(m, PhysicalParams{2, 80, 0.5}, ChargeSystem{}, config(s));
    const auto u = random_vector(p.num_unknowns(), 1), v = random_vector(p.num_unknowns(), 2);
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = 0.7 * u[i] - 1.3 * v[i];
    const auto au = apply_operator(p, u), av = apply_operator(p, v), aw = apply_operator(p, w);
    double diff = 0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(aw[i] - (0.7 * au[i] - 1.3 * av[i])));
    EXPECT_LT(diff, 1e-12 * norm(aw));
  }
}

TEST(Matvec, SchemeSpecificEntryPoints) {
  const FlatMesh m = icosahedral_sphere(1, 1.0);
  const auto h = discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::hobi));
  const auto l = discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::lobi));
  EXPECT_NO_THROW(matvec_hobi(h, random_vector(h.num_unknowns(), 1)));
  EXPECT_NO_THROW(matvec_lobi(l, random_vector(l.num_unknowns(), 1)));
  EXPECT_THROW(matvec_lobi(h, random_vector(h.num_unknowns(), 1)), DomainError);
  EXPECT_THROW(matvec_hobi(l, random_vector(l.num_unknowns(), 1)), DomainError);
  EXPECT_THROW(apply_operator(h, std::vector<double>(3)), DomainError);
}

TEST(Matvec, HobiMatchesNaiveElementLoop) {
  const FlatMesh m = icosahedral_sphere(1, 1.5);
  const auto p = discretize(m, PhysicalParams{2, 78, 0.6}, ChargeSystem{}, config(Scheme::hobi));
  const auto u = random_vector(p.num_unknowns(), 8);
  const auto a = apply_operator(p, u);
  const auto b = naive_hobi(p, u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * norm(b)) << i;
}

TEST(Matvec, LobiMatchesNaiveDoubleSum) {
  const FlatMesh m = icosahedral_sphere(0, 1.0);
  const PhysicalParams pp{1, 80, 0.3};
  const auto p = discretize(m, pp, ChargeSystem{}, config(Scheme::lobi));
  const std::size_t n = m.num_faces();
  // Potential-only input isolates the K2 and K4 blocks.
  auto u = random_vector(2 * n, 4);
  std::fill(u.begin() + n, u.end(), 0.0);
  const auto y = matvec_lobi(p, u);
  for (std::size_t i = 0; i < n; ++i) {
    double k2 = 0, k4 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto k = kernel_block(m.face_centroid(i), m.face_normal(i), m.face_centroid(j), m.face_normal(j), pp);
      k2 += m.face_area(j) * k.k2 * u[j];
      k4 += m.face_area(j) * k.k4 * u[j];
    }
    EXPECT_NEAR(y[i], 0.5 * (1 + pp.eps()) * u[i] - k2, 1e-13 * (1 + std::abs(y[i])));
    EXPECT_NEAR(y[n + i], -k4, 1e-13 * (1 + std::abs(y[n + i])));
  }
}

TEST(Matvec, DeterministicAcrossWorkers) {
  const FlatMesh m = icosahedral_sphere(2, 2.0);
  for (Scheme s : {Scheme::hobi, Scheme::lobi}) {
    const auto p = discretize(m, PhysicalParams{1, 80, 0.2}, ChargeSystem{}, config(s, 1));
    const auto u = random_vector(p.num_unknowns(), 3);
    const auto ref = apply_operator(p, u, 1);
    for (int w : {2, 3, 4, 8}) EXPECT_EQ(apply_operator(p, u, w), ref) << "workers " << w;
  }
}

TEST(Matvec, IsaVariantsAgree) {
  if (!simd::isa_supported(simd::Isa::avx2)) GTEST_SKIP() << "AVX2 not available";
  const FlatMesh m = icosahedral_sphere(2, 2.0);
  const auto p = discretize(m, PhysicalParams{1, 80, 0.5}, ChargeSystem{}, config(Scheme::hobi));
  const auto u = random_vector(p.num_unknowns(), 6);
  const simd::Isa before = simd::active_isa();
  simd::set_active_isa(simd::Isa::scalar);
  const auto a = apply_operator(p, u);
  simd::set_active_isa(simd::Isa::avx2);
  const auto b = apply_operator(p, u);
  simd::set_active_isa(before);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * norm(a));
}

TEST(Matvec, KirkwoodTraceResidualSmallAndShrinking) {
  double prev = 1.0;
  for (int level : {2, 3}) {
    const FlatMesh m = icosahedral_sphere(level, 2.0);
    const auto c = charge_at(Vec3::Zero());
    const auto p = discretize(m, PhysicalParams{1, 80, 0}, c, config(Scheme::hobi));
    const KirkwoodSeries ks(SphereProblem{2.0, PhysicalParams{1, 80, 0}, c});
    std::vector<double> u(p.num_unknowns());
    for (std::size_t i = 0; i < p.num_targets(); ++i) {
      u[i] = ks.potential(m.vertices[i]);
      u[p.num_targets() + i] = ks.normal_derivative(m.vertices[i]);
    }
    const auto au = apply_operator(p, u);
    const auto b = assemble_rhs(p);
    std::vector<double> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = au[i] - b[i];
    const double res = norm(r) / norm(b);
    if (level == 2) {
      EXPECT_LE(res, 5e-3);
    }
    EXPECT_LT(res, prev);
    prev = res;
  }
}

TEST(Rhs, ZeroAndCenteredCharge) {
  const FlatMesh m = icosahedral_sphere(2, 2.0);
  const auto z = discretize(m, PhysicalParams{}, ChargeSystem{}, config(Scheme::hobi));
  for (double v : assemble_rhs(z)) EXPECT_EQ(v, 0.0);
  const auto p = discretize(m, PhysicalParams{}, charge_at(Vec3::Zero()), config(Scheme::hobi));
  const auto b = assemble_rhs(p);
  for (std::size_t i = 0; i < p.num_targets(); ++i) EXPECT_NEAR(b[i], 1.0 / (8 * kPi), 1e-12);
}

TEST(Rhs, MirroredChargesAntisymmetric) {
  const FlatMesh m = icosahedral_sphere(2, 2.0);
  ChargeSystem c;
  c.positions = {Vec3(0.7, 0.2, 0.1), Vec3(-0.7, 0.2, 0.1)};
  c.charges = {1.0, -1.0};
  const auto p = discretize(m, PhysicalParams{}, c, config(Scheme::hobi));
  const auto b = assemble_rhs(p);
  const std::size_t n = p.num_targets();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 mirror(-m.vertices[i].x(), m.vertices[i].y(), m.vertices[i].z());
    std::size_t j = 0;
    for (std::size_t k = 1; k < n; ++k)
      if ((m.vertices[k] - mirror).norm() < (m.vertices[j] - mirror).norm()) j = k;
    ASSERT_LT((m.vertices[j] - mirror).norm(), 1e-12);
    EXPECT_NEAR(b[i], -b[j], 1e-12);
    EXPECT_NEAR(b[n + i], -b[n + j], 1e-12);
  }
}

TEST(Gmres, IdentityOneIteration) {
  const std::vector<double> b{1, -2, 3};
  const LinearOperator id = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  const auto r = gmres(id, b, SolverConfig{});
  EXPECT_EQ(r.iterations, 1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(r.x[i], b[i], 1e-15);
}

TEST(Gmres, Diagonal) {
  const LinearOperator d = [](std::span<const double> in, std::span<double> out) {
    out[0] = 2 * in[0];
    out[1] = 3 * in[1];
  };
  const auto r = gmres(d, std::vector<double>{2, 3}, SolverConfig{});
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
  EXPECT_LE(r.residual, 1e-6);
}

TEST(Gmres, ZeroRightHandSide) {
  const LinearOperator d = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  const auto r = gmres(d, std::vector<double>(4, 0.0), SolverConfig{});
  EXPECT_EQ(r.iterations, 0);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Gmres, NonConvergenceCarriesBestResidual) {
  // Cyclic shift: GMRES(1) stagnates completely.
  const LinearOperator shift = [](std::span<const double> in, std::span<double> out) {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) out[(i + 1) % n] = in[i];
  };
  SolverConfig c;
  c.restart = 1;
  c.max_iterations = 5;
  try {
    gmres(shift, std::vector<double>{1, 0, 0, 0}, c);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_NEAR(e.best_residual(), 1.0, 1e-12);
    EXPECT_EQ(e.iterations(), 5);
  }
}

TEST(Solve, BornEnergyAndPacking) {
  const FlatMesh m = icosahedral_sphere(3, 2.0);
  const auto p = discretize(m, PhysicalParams{1, 80, 0}, charge_at(Vec3::Zero()), config(Scheme::hobi, 0));
  const auto s = solve(p);
  EXPECT_LE(s.iterations, 20);
  EXPECT_LE(s.residual, 1e-6);
  EXPECT_NEAR(solvation_energy(p, s), -81.98, 0.05);
  const auto packed = s.packed();
  ASSERT_EQ(packed.size(), p.num_unknowns());
  EXPECT_EQ(packed[p.num_targets()], s.dphi_dn[0]);
}

TEST(Solve, ZeroChargesZeroEnergy) {
  const auto p = discretize(icosahedral_sphere(1, 2.0), PhysicalParams{}, ChargeSystem{}, config(Scheme::hobi));
  const auto s = solve(p);
  EXPECT_EQ(solvation_energy(p, s), 0.0);
}

TEST(Solve, ReactionPotentialMatchesSeriesOffCenter) {
  const SphereProblem sp{1.0, PhysicalParams{1, 80, 1.0}, charge_at(Vec3(0.3, 0.1, -0.2))};
  const auto p = discretize(icosahedral_sphere(3, 1.0), sp.params, sp.charges, config(Scheme::hobi, 0));
  const auto s = solve(p);
  const KirkwoodSeries ks(sp);
  const double exact = ks.reaction_potential(sp.charges.positions[0]);
  EXPECT_NEAR(reaction_potentials(p, s)[0], exact, 2e-3 * std::abs(exact));
}

TEST(Metrics, SurfacePotentialError) {
  const std::vector<double> e{2, 2, 2, 2};
  EXPECT_EQ(surface_potential_error(e, e), 0.0);
  std::vector<double> n(e);
  for (double& x : n) x *= 1.01;
  EXPECT_NEAR(surface_potential_error(n, e), 0.01, 1e-15);
  EXPECT_THROW(surface_potential_error(e, std::vector<double>(4, 0.0)), DomainError);
  EXPECT_THROW(surface_potential_error(e, std::vector<double>(3, 1.0)), DomainError);
}

TEST(Metrics, ConvergenceOrder) {
  EXPECT_NEAR(convergence_order(5, 10, 4.07e-4, 2.55e-4), 0.67, 5e-3);
  EXPECT_EQ(convergence_order(5, 10, 1e-3, 1e-3), 0.0);
  EXPECT_NEAR(convergence_order(4, 8, 1e-2, 5e-3), 1.0, 1e-14);
  // Spacing-based input gives the same sign.
  EXPECT_NEAR(convergence_order(0.5, 0.25, 1e-2, 5e-3), 1.0, 1e-14);
  EXPECT_THROW(convergence_order(5, 5, 1, 1), DomainError);
  EXPECT_THROW(convergence_order(5, 10, 0, 1), DomainError);
}
