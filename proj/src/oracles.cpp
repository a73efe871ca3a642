#include "infoadapt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infoadapt/errors.hpp"
#include "infoadapt/protocol.hpp"
#include "infoadapt/random.hpp"
#include "infoadapt/stats.hpp"

namespace infoadapt::oracle {

namespace {

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

Vector augmented(const Vector& x) {
  Vector out(x.size() + 1);
  out(0) = 1.0;
  out.tail(x.size()) = x;
  return out;
}

}  // namespace

Vector newton_map(std::span<const LabeledSample> data, int n_covariates, const PriorSpec& prior) {
  const int p = n_covariates + 1;
  Vector theta = Vector::Zero(p);
  for (int iter = 0; iter < 100; ++iter) {
    Vector grad = -theta / prior.variance;
    Matrix hess = -Matrix::Identity(p, p) / prior.variance;
    for (const auto& s : data) {
      const Vector x = augmented(s.covariates);
      const double a = theta.dot(x);
      grad += s.label * logistic(-s.label * a) * x;
      const double q = logistic(a);
      hess -= q * (1.0 - q) * x * x.transpose();
    }
    const Vector step = hess.ldlt().solve(grad);
    theta -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-12) break;
  }
  return theta;
}

double mc_predictive(const GaussianPosterior& post, const Vector& covariates, std::size_t samples,
                     std::uint64_t seed) {
  const Matrix L = post.covariance().llt().matrixL();
  const Vector x = augmented(covariates);
  RandomStream rng(seed);
  const int p = static_cast<int>(x.size());
  Vector z(p);
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    total += logistic((post.mean() + L * z).dot(x));
  }
  return total / static_cast<double>(samples);
}

Matrix mc_variance_integral_A(const Vector& mean_params, double sigma_p, std::size_t samples, std::uint64_t seed) {
  const int p = static_cast<int>(mean_params.size());
  const double lambda_sq = std::numbers::pi / 8.0;
  RandomStream rng(seed);
  Matrix total = Matrix::Zero(p, p);
  Vector x(p);
  x(0) = 1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    for (int j = 1; j < p; ++j) x(j) = sigma_p * rng.normal();
    const double a = mean_params.dot(x);
    total.noalias() += std::exp(-lambda_sq * a * a) * x * x.transpose();
  }
  return total / static_cast<double>(samples);
}

UtilityExtrema dense_grid_extrema(const UtilityEvaluator& evaluator, const GaussianPosterior& post,
                                  std::span<const LabeledSample> data, double lower, double upper, int points) {
  if (post.n_covariates() != 1) throw InputError("dense_grid_extrema: one covariate only");
  UtilityExtrema out;
  out.e_min = std::numeric_limits<double>::infinity();
  out.e_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double x = lower + (upper - lower) * i / (points - 1);
    const double e = evaluator.value(post, data, make_vector({x}));
    if (e < out.e_min) {
      out.e_min = e;
      out.argmin = make_vector({x});
    }
    if (e > out.e_max) {
      out.e_max = e;
      out.argmax = make_vector({x});
    }
  }
  out.evaluations = points;
  return out;
}

std::pair<double, double> sorted_deciles(std::vector<double> values) {
  if (values.empty()) throw InputError("sorted_deciles: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  // Smallest rank r with r / n >= q, in integer arithmetic.
  const auto rank = [n](std::size_t tenths) { return std::max<std::size_t>(1, (tenths * n + 9) / 10); };
  return {values[rank(1) - 1], values[rank(9) - 1]};
}

double legacy_rho(double e, double e_max) { return e / e_max; }

double pearson_statistic(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

namespace {

std::vector<LabeledSample> logistic_sample(const Vector& theta, std::size_t n, RandomStream& rng) {
  const int d = static_cast<int>(theta.size()) - 1;
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(d);
    for (int j = 0; j < d; ++j) x(j) = -1.0 + 2.0 * rng.uniform();
    const int y = rng.uniform() < logistic(theta.dot(augmented(x))) ? 1 : -1;
    out.push_back(LabeledSample{x, y});
  }
  return out;
}

bool separable_1d(std::span<const LabeledSample> data) {
  double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
  for (const auto& s : data) {
    const int c = s.label > 0;
    lo[c] = std::min(lo[c], s.covariates(0));
    hi[c] = std::max(hi[c], s.covariates(0));
  }
  return hi[0] < lo[1] || hi[1] < lo[0];
}

OracleCheck check(std::string name, double error, double tolerance) {
  return OracleCheck{std::move(name), error, tolerance, std::isfinite(error) && error <= tolerance};
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(std::uint64_t seed, bool full) {
  std::vector<OracleCheck> checks;
  const PriorSpec prior{5.0};
  const auto sub = [seed](std::uint64_t purpose, std::uint64_t i) { return derive_seed(seed, {purpose, i}); };

  // Variational mean vs Newton MAP on 20-point sets from w = 2, w0 = 0.
  // Separable sets have no finite MLE and are redrawn.
  {
    double worst = 0.0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      RandomStream rng(sub(1, rep));
      auto data = logistic_sample(make_vector({0.0, 2.0}), 20, rng);
      while (separable_1d(data)) data = logistic_sample(make_vector({0.0, 2.0}), 20, rng);
      const auto vb = fit_variational(data, 1, prior);
      worst = std::max(worst, (vb.mean() - newton_map(data, 1, prior)).cwiseAbs().maxCoeff());
    }
    checks.push_back(check("variational mean vs Newton MAP (max abs)", worst, 0.15));
  }

  // Probit-approximated predictive vs Monte Carlo.
  {
    double worst = 0.0;
    RandomStream rng(sub(2, 0));
    const auto data = logistic_sample(make_vector({0.5, 2.0, -1.0}), 20, rng);
    const auto post = fit_variational(data, 2, prior);
    const Vector points[] = {make_vector({0.0, 0.0}), make_vector({0.8, -0.8}), make_vector({-1.0, 0.5})};
    for (std::size_t i = 0; i < std::size(points); ++i) {
      const double mc = mc_predictive(post, points[i], full ? 1'000'000 : 100'000, sub(2, i + 1));
      worst = std::max(worst, std::abs(predict_prob(post, points[i]) - mc));
    }
    checks.push_back(check("predictive vs Monte Carlo (max abs)", worst, 0.01));
  }

  // Closed-form A matrix vs Monte Carlo, relative to its largest entry.
  {
    const double sigma_p = 0.5;
    const Vector means[] = {make_vector({0.3, 1.2}), make_vector({-0.5, 2.0, -1.0})};
    for (std::size_t i = 0; i < std::size(means); ++i) {
      const auto ws = variance_integral_A(means[i], IsotropicGaussian{sigma_p});
      const Matrix mc = mc_variance_integral_A(means[i], sigma_p, full ? 10'000'000 : 1'000'000, sub(3, i));
      const double rel = (ws.A_matrix - mc).cwiseAbs().maxCoeff() / mc.cwiseAbs().maxCoeff();
      checks.push_back(check("A matrix vs Monte Carlo, d=" + std::to_string(means[i].size() - 1) + " (relative)",
                             rel, 0.01));
    }
  }

  // Utility extrema from the multi-start search vs a dense grid.
  {
    RandomStream rng(sub(4, 0));
    const auto data = logistic_sample(make_vector({0.2, 3.0}), 5, rng);
    const auto post = fit_variational(data, 1, prior);
    const SearchSpace space{make_vector({-0.8}), make_vector({0.8})};
    for (auto kind : {UtilityKind::PosteriorEntropy, UtilityKind::GeneralisationError, UtilityKind::VarianceReduction}) {
      const UtilityEvaluator evaluator(default_utility_spec(kind, space), prior, 1);
      const auto search = evaluator.extrema(post, data);
      const auto grid = dense_grid_extrema(evaluator, post, data, -0.8, 0.8);
      const double err = std::max(std::abs(search.e_max - grid.e_max), std::abs(search.e_min - grid.e_min));
      checks.push_back(check("extrema vs 1001-point grid, " + to_string(kind), err, 1e-3));
    }
  }

  // Hand values.
  {
    const std::size_t counts[] = {32, 50, 68};
    const double stat = chi_squared_balance(counts, 1).statistic;
    checks.push_back(check("Pearson statistic (32, 50, 68) = 12.96", std::abs(stat - 12.96), 1e-12));
    checks.push_back(check("Pearson oracle agrees", std::abs(stat - pearson_statistic(counts)), 1e-12));
    checks.push_back(check("rho(4.5; 4, 5) = 0.5", std::abs(normalized_rho(4.5, 4.0, 5.0) - 0.5), 1e-15));
    checks.push_back(check("legacy rho 4.5 / 5 = 0.9", std::abs(legacy_rho(4.5, 5.0) - 0.9), 1e-15));
  }
  return checks;
}

}  // namespace infoadapt::oracle
