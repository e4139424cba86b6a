#include "hobipb/quadrature.hpp"

#include <cmath>

namespace hobipb {

double reference_monomial_integral(int a, int b) {
  // a! b! / (a+b+2)!, accumulated as a product to stay in range.
  double v = 1.0;
  for (int k = 1; k <= b; ++k) v *= static_cast<double>(k) / static_cast<double>(a + k);
  return v / ((a + b + 1.0) * (a + b + 2.0));
}

int measure_exactness_degree(const TriangleRule& rule, int max_degree) {
  int degree = -1;
  for (int d = 0; d <= max_degree; ++d) {
    for (int a = 0; a <= d; ++a) {
      const int b = d - a;
      double sum = 0.0;
      for (std::size_t m = 0; m < rule.size(); ++m) sum += rule.w[m] * std::pow(rule.r[m], a) * std::pow(rule.s[m], b);
      const double exact = reference_monomial_integral(a, b);
      if (std::abs(sum - exact) > 1e-13 * exact) return degree;
    }
    degree = d;
  }
  return degree;
}

namespace {

// P_n(z) and P_n'(z) by the three-term recurrence.
std::pair<double, double> legendre(int n, double z) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 0) return {1.0, 0.0};
  return {p1, n * (z * p1 - p0) / (z * z - 1.0)};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_1d(int n) {
  if (n < 1 || n > 32) throw DomainError("Gauss-Legendre order must be in [1, 32], got " + std::to_string(n));
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre(n, z).second;
    const double wi = 1.0 / ((1.0 - z * z) * dp * dp);
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.5;
  return {x, w};
}

const TriangleRule& gauss_radau_rule() {
  static const TriangleRule rule = [] {
    TriangleRule t;
    t.name = "collapsed-gauss-jacobi-2x2";
    // Two-point Gauss rule for weight x on [0, 1]: roots of x^2 - 6x/5 + 3/10.
    const double root = std::sqrt(0.24) / 2.0;
    const double x[2] = {0.6 - root, 0.6 + root};
    // w0 + w1 = 1/2 and w0 x0 + w1 x1 = 1/3
    const double wx1 = (1.0 / 3.0 - 0.5 * x[0]) / (x[1] - x[0]);
    const double wx[2] = {0.5 - wx1, wx1};
    const auto [y, wy] = gauss_legendre_1d(2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        t.r.push_back(x[i] * (1.0 - y[j]));
        t.s.push_back(x[i] * y[j]);
        t.w.push_back(wx[i] * wy[j]);
      }
    }
    t.exactness_degree = measure_exactness_degree(t);
    if (t.exactness_degree < 2) throw Error("regular triangle rule failed its exactness self-test");
    return t;
  }();
  return rule;
}

TriangleRule duffy_rule(int n) {
  const auto [g, gw] = gauss_legendre_1d(n);
  TriangleRule t;
  t.name = "duffy-gauss-legendre-" + std::to_string(n) + "x" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = g[i], y = g[j];
      t.r.push_back((1.0 - y) * x);
      t.s.push_back(y * x);
      t.w.push_back(gw[i] * gw[j] * x);
    }
  }
  t.exactness_degree = measure_exactness_degree(t, 2 * n - 2);
  return t;
}

}  // namespace hobipb
