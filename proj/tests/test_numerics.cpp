#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "infoadapt/errors.hpp"
#include "infoadapt/optimize.hpp"
#include "infoadapt/quadrature.hpp"
#include "infoadapt/random.hpp"

using namespace infoadapt;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 8, 32}) {
    const auto rule = gauss_legendre(n);
    double sum_w = 0.0;
    for (double w : rule.weights) sum_w += w;
    CHECK(sum_w == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * n - 1;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) integral += rule.weights[i] * std::pow(rule.nodes[i], deg - 1);
    const double exact = (deg - 1) % 2 == 0 ? 2.0 / deg : 0.0;
    CHECK(integral == doctest::Approx(exact).epsilon(1e-13));
    CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
  }
}

TEST_CASE("tensor grid carries the box volume and the augmented constant") {
  const auto grid = tensor_gauss_legendre(make_vector({-1.0, 0.0}), make_vector({1.0, 3.0}), 8);
  CHECK(grid.size() == 64);
  CHECK(grid.n_params == 3);
  double vol = 0.0, mean_x2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid.point(i)[0] == 1.0);
    vol += grid.weights[i];
    mean_x2 += grid.weights[i] * grid.point(i)[2];
  }
  CHECK(vol == doctest::Approx(6.0));
  CHECK(mean_x2 / vol == doctest::Approx(1.5));
  // Smooth integrand: exp(x1 + x2) over the box.
  double integral = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    integral += grid.weights[i] * std::exp(grid.point(i)[1] + grid.point(i)[2]);
  const double exact = (std::exp(1.0) - std::exp(-1.0)) * (std::exp(3.0) - 1.0);
  CHECK(integral == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("Nelder-Mead finds an interior minimum and respects the box") {
  const Box box{make_vector({-1.0, -1.0}), make_vector({1.0, 1.0})};
  const Objective bowl = [](const Vector& x) { return std::pow(x(0) - 0.3, 2) + 2 * std::pow(x(1) + 0.2, 2); };
  MultiStartOptions opts;
  opts.local.max_evaluations = 200;
  const auto r = minimize_multistart(bowl, box, opts);
  CHECK(r.argument(0) == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(r.argument(1) == doctest::Approx(-0.2).epsilon(1e-3));

  const Objective slope = [](const Vector& x) { return x(0) - 2 * x(1); };
  const auto edge = minimize_multistart(slope, box, opts);
  CHECK(box.contains(edge.argument));
  CHECK(edge.value == doctest::Approx(-3.0));
}

TEST_CASE("monotone objective on an interval has its minimum at the endpoint") {
  const Box box{make_vector({-0.8}), make_vector({0.8})};
  const auto r = minimize_multistart([](const Vector& x) { return std::exp(x(0)); }, box, {});
  CHECK(r.argument(0) == doctest::Approx(-0.8));
}

TEST_CASE("multi-start tie-break prefers the lexicographically smallest argument") {
  const Box box{make_vector({-1.0}), make_vector({1.0})};
  // Two symmetric global minima at +-0.5.
  const auto r = minimize_multistart([](const Vector& x) { return std::pow(x(0) * x(0) - 0.25, 2); }, box, {});
  CHECK(r.argument(0) < 0.0);
}

TEST_CASE("start points: Halton sequence then corners, inside the box") {
  const Box box{make_vector({0.0, -2.0}), make_vector({1.0, 2.0})};
  const auto pts = multistart_points(box, {});
  CHECK(pts.size() == 14);
  for (const auto& p : pts) CHECK(box.contains(p));
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("no finite start is a numeric error") {
  const Box box{make_vector({0.0}), make_vector({1.0})};
  CHECK_THROWS_AS(minimize_multistart([](const Vector&) { return NAN; }, box, {}), NumericError);
}

TEST_CASE("derived seeds are reproducible and decorrelated") {
  CHECK(derive_seed(7, {3, 1}) == derive_seed(7, {3, 1}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(7, {r}));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
}

TEST_CASE("random stream counts engine draws") {
  RandomStream rng(1);
  rng.uniform();
  rng.below(3);
  CHECK(rng.draws() == 2);
  rng.normal();
  CHECK(rng.draws() == 4);
  for (int i = 0; i < 1000; ++i) {
    const auto k = rng.below(3);
    CHECK(k < 3);
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("permutation is a bijection") {
  RandomStream rng(9);
  auto p = random_permutation(569, rng);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == i);
}
