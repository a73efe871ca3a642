#pragma once

#include <Eigen/Dense>

namespace infoadapt {

// Parameter vectors are (intercept, weights...). Small, bounded sizes keep
// every vector and matrix on the stack; the hot loops refit posteriors
// hundreds of thousands of times per simulated trial.
inline constexpr int kMaxParams = 8;
inline constexpr int kMaxCovariates = kMaxParams - 1;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxParams, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                             kMaxParams, kMaxParams>;

inline Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

/// (1, x_1, ..., x_d)
inline Vector augment(const Vector& covariates) {
  Vector x(covariates.size() + 1);
  x(0) = 1.0;
  x.tail(covariates.size()) = covariates;
  return x;
}

}  // namespace infoadapt
