#include "infoadapt/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "infoadapt/errors.hpp"

namespace infoadapt {

bool Box::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

namespace {

constexpr std::array<unsigned, kMaxCovariates> kHaltonBases{2, 3, 5, 7, 11, 13, 17};

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

bool better(double va, const Vector& xa, double vb, const Vector& xb) {
  if (va < vb) return true;
  if (va > vb) return false;
  return lexicographically_less(xa, xb);
}

double safe_eval(const Objective& f, const Vector& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

OptimumResult nelder_mead_box(const Objective& f, const Vector& start, const Box& box,
                              const NelderMeadOptions& options) {
  const int d = box.dim();
  if (start.size() != d) throw InputError("nelder_mead_box: start dimension mismatch");
  const Vector width = box.upper - box.lower;

  std::vector<Vector> simplex(d + 1);
  std::vector<double> values(d + 1);
  int evals = 0;
  simplex[0] = box.clamp(start);
  values[0] = safe_eval(f, simplex[0]);
  ++evals;
  for (int j = 0; j < d; ++j) {
    Vector v = simplex[0];
    const double step = options.initial_step * width(j);
    v(j) += (v(j) + step <= box.upper(j)) ? step : -step;
    simplex[j + 1] = box.clamp(v);
    values[j + 1] = safe_eval(f, simplex[j + 1]);
    ++evals;
  }

  std::vector<int> order(d + 1);
  auto sort_simplex = [&] {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return better(values[a], simplex[a], values[b], simplex[b]);
    });
    std::vector<Vector> s2(d + 1);
    std::vector<double> v2(d + 1);
    for (int i = 0; i <= d; ++i) {
      s2[i] = simplex[order[i]];
      v2[i] = values[order[i]];
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  while (true) {
    sort_simplex();
    if (evals >= options.max_evaluations) break;
    double diameter = 0.0;
    for (int i = 1; i <= d; ++i)
      diameter = std::max(diameter, ((simplex[i] - simplex[0]).cwiseQuotient(width)).cwiseAbs().maxCoeff());
    const double spread = values[d] - values[0];
    if (diameter <= options.x_tol && (spread <= options.f_tol || !std::isfinite(spread))) break;
    if (diameter <= options.x_tol * 1e-3) break;

    Vector centroid = Vector::Zero(d);
    for (int i = 0; i < d; ++i) centroid += simplex[i];
    centroid /= d;

    const Vector reflected = box.clamp(centroid + (centroid - simplex[d]));
    const double fr = safe_eval(f, reflected);
    ++evals;
    if (fr < values[0]) {
      const Vector expanded = box.clamp(centroid + 2.0 * (centroid - simplex[d]));
      const double fe = safe_eval(f, expanded);
      ++evals;
      if (fe < fr) {
        simplex[d] = expanded;
        values[d] = fe;
      } else {
        simplex[d] = reflected;
        values[d] = fr;
      }
      continue;
    }
    if (fr < values[d - 1]) {
      simplex[d] = reflected;
      values[d] = fr;
      continue;
    }
    const bool outside = fr < values[d];
    const Vector contracted = outside ? Vector(box.clamp(centroid + 0.5 * (reflected - centroid)))
                                      : Vector(box.clamp(centroid + 0.5 * (simplex[d] - centroid)));
    const double fc = safe_eval(f, contracted);
    ++evals;
    if (fc < (outside ? fr : values[d])) {
      simplex[d] = contracted;
      values[d] = fc;
      continue;
    }
    for (int i = 1; i <= d; ++i) {
      simplex[i] = box.clamp(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
      values[i] = safe_eval(f, simplex[i]);
      ++evals;
    }
  }
  return OptimumResult{values[0], simplex[0], evals};
}

std::vector<Vector> multistart_points(const Box& box, const MultiStartOptions& options) {
  const int d = box.dim();
  if (d < 1 || d > kMaxCovariates) throw InputError("multistart: unsupported dimension");
  if (box.upper.size() != d || !((box.upper - box.lower).array() > 0).all())
    throw InputError("multistart: invalid box");
  std::vector<Vector> starts;
  for (int s = 0; s < options.quasi_random_starts; ++s) {
    Vector x(d);
    for (int j = 0; j < d; ++j) {
      const double u = radical_inverse(static_cast<unsigned>(s + 1), kHaltonBases[j]);
      x(j) = box.lower(j) + u * (box.upper(j) - box.lower(j));
    }
    starts.push_back(x);
  }
  if (options.include_corners) {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Vector x(d);
      for (int j = 0; j < d; ++j) x(j) = (mask >> j) & 1u ? box.upper(j) : box.lower(j);
      starts.push_back(x);
    }
  }
  return starts;
}

OptimumResult minimize_multistart(const Objective& f, const Box& box,
                                  const MultiStartOptions& options) {
  const auto starts = multistart_points(box, options);
  OptimumResult best;
  best.value = std::numeric_limits<double>::infinity();
  int total = 0;
  bool found = false;
  for (const auto& s : starts) {
    auto r = nelder_mead_box(f, s, box, options.local);
    total += r.evaluations;
    if (!std::isfinite(r.value)) continue;
    if (!found || better(r.value, r.argument, best.value, best.argument)) {
      best = r;
      found = true;
    }
  }
  if (!found) throw NumericError("multi-start search: no finite objective value found");
  best.evaluations = total;
  return best;
}

}  // namespace infoadapt
