#pragma once

#include <vector>

#include "infoadapt/linalg.hpp"

namespace infoadapt {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussLegendreRule gauss_legendre(int n);

/// Tensor-product grid of augmented points (1, x_1, ..., x_d) with weights.
/// Weights already include the 1D interval scaling, so a plain weighted
/// sum of f gives the integral of f over the box.
struct TensorGrid {
  int n_params = 0;               // d + 1
  std::vector<double> points;     // row-major, n_points x n_params
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return &points[i * n_params]; }
};

/// Tensor Gauss-Legendre grid over the box [lower, upper].
TensorGrid tensor_gauss_legendre(const Vector& lower, const Vector& upper, int points_per_dim);

}  // namespace infoadapt
