#pragma once

#include <functional>
#include <vector>

#include "infoadapt/linalg.hpp"

namespace infoadapt {

struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Vector clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Vector& x) const;
};

struct NelderMeadOptions {
  int max_evaluations = 30;
  double initial_step = 0.15;  // fraction of the box width per dimension
  double x_tol = 1e-4;         // simplex diameter, fraction of box width
  double f_tol = 1e-10;
};

struct MultiStartOptions {
  int quasi_random_starts = 10;
  bool include_corners = true;
  NelderMeadOptions local;
};

struct OptimumResult {
  double value = 0.0;
  Vector argument;
  int evaluations = 0;
};

using Objective = std::function<double(const Vector&)>;

/// Derivative-free simplex descent restricted to `box` by projection.
OptimumResult nelder_mead_box(const Objective& f, const Vector& start, const Box& box,
                              const NelderMeadOptions& options = {});

/// Starting points: Halton points scaled into the box, then the 2^d corners.
std::vector<Vector> multistart_points(const Box& box, const MultiStartOptions& options);

/// Multi-start minimisation. Ties on value go to the lexicographically
/// smallest argument, so the result does not depend on start order.
/// Throws NumericError if every start produced a non-finite value.
OptimumResult minimize_multistart(const Objective& f, const Box& box,
                                  const MultiStartOptions& options = {});

/// Radical-inverse (van der Corput) of `index` in `base`.
double radical_inverse(unsigned index, unsigned base);

}  // namespace infoadapt
