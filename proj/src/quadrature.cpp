#include "infoadapt/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "infoadapt/errors.hpp"

namespace infoadapt {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw InputError("Gauss-Legendre rule needs at least one point");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess for the i-th largest root.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

TensorGrid tensor_gauss_legendre(const Vector& lower, const Vector& upper, int points_per_dim) {
  const int d = static_cast<int>(lower.size());
  if (upper.size() != d) throw InputError("tensor grid: bound dimensions differ");
  for (int j = 0; j < d; ++j)
    if (!(upper(j) > lower(j))) throw InputError("tensor grid: lower must be below upper");
  const auto rule = gauss_legendre(points_per_dim);
  TensorGrid grid;
  grid.n_params = d + 1;
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(points_per_dim);
  grid.points.resize(total * grid.n_params);
  grid.weights.resize(total);
  std::vector<int> idx(d, 0);
  for (std::size_t t = 0; t < total; ++t) {
    double* x = &grid.points[t * grid.n_params];
    x[0] = 1.0;
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      const double half = 0.5 * (upper(j) - lower(j));
      const double mid = 0.5 * (upper(j) + lower(j));
      x[j + 1] = mid + half * rule.nodes[idx[j]];
      w *= half * rule.weights[idx[j]];
    }
    grid.weights[t] = w;
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[j] < points_per_dim) break;
      idx[j] = 0;
    }
  }
  return grid;
}

}  // namespace infoadapt
