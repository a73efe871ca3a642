#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infoadapt/bayes_logistic.hpp"
#include "infoadapt/errors.hpp"
#include "infoadapt/oracles.hpp"
#include "infoadapt/random.hpp"

using namespace infoadapt;

namespace {

std::vector<LabeledSample> logistic_data(const Vector& theta, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  const auto d = theta.size() - 1;
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) x(j) = -1.0 + 2.0 * rng.uniform();
    Vector a(d + 1);
    a << 1.0, x;
    out.push_back({x, rng.uniform() < sigmoid(theta.dot(a)) ? 1 : -1});
  }
  return out;
}

}  // namespace

TEST_CASE("empty data returns the prior") {
  const auto post = fit_variational({}, 1, PriorSpec{5.0});
  CHECK(post.mean().isZero());
  CHECK(post.covariance().isApprox(Matrix::Identity(2, 2) * 5.0));
  CHECK(post.n_obs() == 0);
}

TEST_CASE("opposite labels at the same point cancel in the mean") {
  const std::vector<LabeledSample> data{{make_vector({1.0}), 1}, {make_vector({1.0}), -1}};
  const auto post = fit_variational(data, 1, PriorSpec{5.0});
  CHECK(post.mean().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("variational fit satisfies its own fixed point") {
  const auto data = logistic_data(make_vector({0.3, 2.0, -1.0}), 30, 11);
  const auto post = fit_variational(data, 2, PriorSpec{5.0});
  REQUIRE(post.n_obs() == data.size());
  Matrix prec = Matrix::Identity(3, 3) / 5.0;
  Vector b = Vector::Zero(3);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector x = data[i].augmented();
    prec += 2.0 * jj_lambda(post.xi()[i]) * x * x.transpose();
    b += 0.5 * data[i].label * x;
  }
  CHECK((prec - post.precision()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((prec.inverse() * b - post.mean()).cwiseAbs().maxCoeff() < 1e-10);
  const Matrix m = post.covariance() + post.mean() * post.mean().transpose();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector x = data[i].augmented();
    CHECK(post.xi()[i] > 0.0);
    CHECK(std::abs(std::sqrt(x.dot(m * x)) - post.xi()[i]) < 1e-5);
  }
}

TEST_CASE("variational mean agrees with the Newton MAP oracle on a w=2, w0=0 set") {
  // Single 20-point set; the acceptance suite runs the multi-set sweep.
  const auto data = logistic_data(make_vector({0.0, 2.0}), 20, 5);
  const auto vb = fit_variational(data, 1, PriorSpec{5.0});
  const auto map = oracle::newton_map(data, 1, PriorSpec{5.0});
  CHECK((vb.mean() - map).cwiseAbs().maxCoeff() <= 0.15);
}

TEST_CASE("fit is invariant to sample order") {
  auto data = logistic_data(make_vector({-0.5, 1.5}), 25, 3);
  const auto a = fit_variational(data, 1, PriorSpec{5.0});
  std::reverse(data.begin(), data.end());
  std::rotate(data.begin(), data.begin() + 7, data.end());
  const auto b = fit_variational(data, 1, PriorSpec{5.0});
  CHECK((a.mean() - b.mean()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((a.covariance() - b.covariance()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("warm-started refit agrees with a fit from scratch") {
  const auto data = logistic_data(make_vector({0.2, -1.0, 2.5}), 18, 8);
  const auto parent = fit_variational(data, 2, PriorSpec{5.0});
  const LabeledSample extra{make_vector({0.4, -0.7}), 1};
  const auto warm = refit_with(parent, data, extra, PriorSpec{5.0});
  auto all = data;
  all.push_back(extra);
  const auto cold = fit_variational(all, 2, PriorSpec{5.0});
  CHECK((warm.mean() - cold.mean()).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((warm.covariance() - cold.covariance()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("non-converged fit carries the last iterate") {
  const auto data = logistic_data(make_vector({0.0, 3.0}), 20, 2);
  FitOptions opts;
  opts.max_iter = 1;
  try {
    fit_variational(data, 1, PriorSpec{5.0}, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_iterate().n_obs() == data.size());
    CHECK(e.last_change() >= opts.tol);
  }
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(fit_variational(std::vector<LabeledSample>{{make_vector({NAN}), 1}}, 1, PriorSpec{}), InputError);
  CHECK_THROWS_AS(fit_variational(std::vector<LabeledSample>{{make_vector({0.1}), 0}}, 1, PriorSpec{}), InputError);
  CHECK_THROWS_AS(fit_variational(std::vector<LabeledSample>{{make_vector({0.1, 0.2}), 1}}, 1, PriorSpec{}),
                  InputError);
  const auto prior = GaussianPosterior::from_prior(1, PriorSpec{});
  CHECK_THROWS_AS(predict_prob(prior, make_vector({0.1, 0.2})), InputError);
}

TEST_CASE("predictive examples") {
  auto post = GaussianPosterior::from_prior(1, PriorSpec{5.0});
  CHECK(predict_prob(post, make_vector({0.7})) == doctest::Approx(0.5));

  // Many points from the w=32, w0=-8 model pin the boundary at x = 0.25.
  std::vector<LabeledSample> data;
  for (int i = 0; i < 400; ++i) {
    const double x = -1.0 + 2.0 * (i + 0.5) / 400;
    data.push_back({make_vector({x}), x > 0.25 ? 1 : -1});
  }
  const auto sharp = fit_variational(data, 1, PriorSpec{400.0});
  const double boundary = -sharp.mean()(0) / sharp.mean()(1);
  CHECK(boundary == doctest::Approx(0.25).epsilon(0.02));
  CHECK(predict_prob(sharp, make_vector({boundary})) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("predictive agrees with Monte Carlo") {
  const auto data = logistic_data(make_vector({0.5, 1.0, -2.0}), 15, 21);
  const auto post = fit_variational(data, 2, PriorSpec{5.0});
  for (const Vector& x : {make_vector({0.0, 0.0}), make_vector({0.9, -0.4})}) {
    const double mc = oracle::mc_predictive(post, x, 1'000'000, 99);
    CHECK(std::abs(predict_prob(post, x) - mc) <= 0.01);
  }
}

TEST_CASE("moderation pulls the predictive toward one half") {
  const auto data = logistic_data(make_vector({0.5, 2.0}), 15, 4);
  const auto post = fit_variational(data, 1, PriorSpec{5.0});
  const Vector x = make_vector({0.8});
  const Vector a = make_vector({1.0, 0.8});
  const double act = post.mean().dot(a);
  REQUIRE(act != 0.0);
  double previous = std::abs(sigmoid(act) - 0.5);
  for (double c : {1.0, 2.0, 4.0, 8.0}) {
    const double kappa = 1.0 / std::sqrt(1.0 + std::numbers::pi * c * a.dot(post.covariance() * a) / 8.0);
    const double gap = std::abs(sigmoid(act * kappa) - 0.5);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(std::abs(predict_prob(post, x) - 0.5) < std::abs(sigmoid(act) - 0.5));
}

TEST_CASE("entropy closed forms") {
  const double base = 1.0 + std::log(2.0 * std::numbers::pi);
  const auto prior = GaussianPosterior::from_prior(1, PriorSpec{5.0});
  CHECK(posterior_entropy(prior) == doctest::Approx(base + 0.5 * std::log(25.0)));
  const auto unit = GaussianPosterior::from_prior(1, PriorSpec{1.0});
  CHECK(posterior_entropy(unit) == doctest::Approx(base));
  CHECK(posterior_entropy(GaussianPosterior::from_prior(1, PriorSpec{6.0})) > posterior_entropy(prior));
}

TEST_CASE("absorbing observations never increases log det Sigma") {
  const auto data = logistic_data(make_vector({0.1, -1.5, 1.0}), 30, 17);
  auto post = GaussianPosterior::from_prior(2, PriorSpec{5.0});
  std::vector<LabeledSample> seen;
  for (const auto& s : data) {
    const auto next = refit_with(post, seen, s, PriorSpec{5.0});
    CHECK(next.log_det_covariance() <= post.log_det_covariance() + 1e-6);
    seen.push_back(s);
    post = next;
  }
}

TEST_CASE("Fisher information is the inverse covariance") {
  const auto prior = GaussianPosterior::from_prior(1, PriorSpec{5.0});
  CHECK(fisher_information(prior).isApprox(Matrix::Identity(2, 2) * 0.2));
  const auto post = fit_variational(logistic_data(make_vector({0.0, 1.0, 1.0}), 12, 6), 2, PriorSpec{5.0});
  const Matrix f = fisher_information(post);
  CHECK((f * post.covariance() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::log(f.determinant()) == doctest::Approx(-post.log_det_covariance()).epsilon(1e-10));
}

TEST_CASE("maximal det F after augmentation matches minimal expected entropy on a grid") {
  const auto data = logistic_data(make_vector({0.0, 1.0}), 5, 12);
  const PriorSpec prior{5.0};
  const auto post = fit_variational(data, 1, prior);
  int best_det = -1, best_entropy = -1;
  double max_det = -INFINITY, min_entropy = INFINITY;
  const double grid[] = {-0.8, -0.4, 0.0, 0.4, 0.8};
  for (int i = 0; i < 5; ++i) {
    const Vector x = make_vector({grid[i]});
    const double p = predict_prob(post, x);
    const auto up = refit_with(post, data, {x, 1}, prior);
    const auto down = refit_with(post, data, {x, -1}, prior);
    const double det = p * -up.log_det_covariance() + (1 - p) * -down.log_det_covariance();
    const double s = p * posterior_entropy(up) + (1 - p) * posterior_entropy(down);
    if (det > max_det) max_det = det, best_det = i;
    if (s < min_entropy) min_entropy = s, best_entropy = i;
  }
  CHECK(best_det == best_entropy);
}

TEST_CASE("jj_lambda limit and sigmoid stability") {
  CHECK(jj_lambda(0.0) == doctest::Approx(0.125));
  CHECK(jj_lambda(1e-3) == doctest::Approx(0.125).epsilon(1e-6));
  CHECK(jj_lambda(-2.0) == doctest::Approx(jj_lambda(2.0)));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}
