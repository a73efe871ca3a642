#pragma once

// Independent reference computations. None of these share code paths with
// the quantities they check beyond the public types.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"
#include "infoadapt/utility.hpp"

namespace infoadapt::oracle {

/// MAP of the logistic posterior with prior N(0, variance I) by Newton's
/// method on the exact log posterior.
Vector newton_map(std::span<const LabeledSample> data, int n_covariates, const PriorSpec& prior);

/// E[sigmoid(theta . x)] for theta ~ N(mean, cov), by Monte Carlo.
double mc_predictive(const GaussianPosterior& post, const Vector& covariates, std::size_t samples,
                     std::uint64_t seed);

/// E[x_mu x_nu exp(-lambda^2 (theta . x)^2)] with x = (1, x'),
/// x' ~ N(0, sigma_p^2 I), by Monte Carlo.
Matrix mc_variance_integral_A(const Vector& mean_params, double sigma_p, std::size_t samples, std::uint64_t seed);

/// Minimum and maximum of a one-covariate utility on an evenly spaced grid.
UtilityExtrema dense_grid_extrema(const UtilityEvaluator& evaluator, const GaussianPosterior& post,
                                  std::span<const LabeledSample> data, double lower, double upper,
                                  int points = 1001);

/// Nearest-rank deciles computed by full sort and explicit rank arithmetic.
std::pair<double, double> sorted_deciles(std::vector<double> values);

/// Earlier form of the recruitment score, rho = E / E_max.
double legacy_rho(double e, double e_max);

/// Pearson statistic written out term by term.
double pearson_statistic(std::span<const std::size_t> counts);

struct OracleCheck {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Every oracle comparison with its pinned tolerance. `full` uses the
/// large Monte Carlo sample sizes (1e6 predictive, 1e7 A-matrix).
std::vector<OracleCheck> run_oracle_suite(std::uint64_t seed, bool full = true);

}  // namespace infoadapt::oracle
