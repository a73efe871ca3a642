#pragma once

// The four informativeness scores E(x* | D_n) for a candidate on one arm:
//
//   UncertaintySampling   1 - max_y p(y | x*, D_n)
//   PosteriorEntropy      S(D_n) - <S(D_n + (x*, y*))>
//   GeneralisationError   eps(D_n) - <eps(D_n + (x*, y*))>
//   VarianceReduction     var(D_n) - <var(D_n + (x*, y*))>
//
// <.> averages the two hypothetical outcomes y* = +1 / -1 with weights
// p(y* | x*, D_n); each branch is a full variational refit.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"
#include "infoadapt/optimize.hpp"
#include "infoadapt/quadrature.hpp"

namespace infoadapt {

enum class UtilityKind { UncertaintySampling, PosteriorEntropy, GeneralisationError, VarianceReduction };

std::string to_string(UtilityKind kind);
UtilityKind parse_utility_kind(const std::string& name);

struct UniformHypercube {
  double half_width = 1.0;
};
struct IsotropicGaussian {
  double sigma_p = 0.5;
};
struct EmpiricalPopulation {
  std::vector<Vector> samples;
};
using PopulationModel = std::variant<UniformHypercube, IsotropicGaussian, EmpiricalPopulation>;

void validate_population(const PopulationModel& population);

/// Per-dimension bounds of the region searched for utility extrema.
struct SearchSpace {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  Box box() const { return Box{lower, upper}; }
};

struct UtilitySpec {
  UtilityKind kind = UtilityKind::PosteriorEntropy;
  int quadrature_points_per_dim = 32;
  std::optional<PopulationModel> population;
  SearchSpace search_space;
  MultiStartOptions search;
  FitOptions fit;
};

/// Spec with the population each kind uses by default: uniform on [-1, 1]^d
/// for the generalisation error, N(0, 0.25 I) for variance reduction.
UtilitySpec default_utility_spec(UtilityKind kind, SearchSpace search_space);

/// Throws ConfigError when the spec cannot be used with `n_covariates`.
void validate_utility_spec(const UtilitySpec& spec, int n_covariates);

inline constexpr double kProbitLambdaSq = 0.39269908169872414;  // pi / 8

/// Closed-form population integral
///   A_{mu nu} = E_x[ x_mu x_nu exp(-lambda^2 (w.x)^2) ],  x = (1, x'),
///   x' ~ N(0, sigma_p^2 I),
/// written as a Gaussian integral in x' with precision B' = B + Sigma^-1.
struct VarianceReductionWorkspace {
  double lambda_sq = kProbitLambdaSq;
  Matrix A_matrix;  // (d+1) x (d+1)
  Vector b;         // offset of the rank-1 quadratic form, w.b = -w0
  Matrix B;         // 2 lambda^2 w w^T
  Vector b_prime;
  Matrix B_prime;
  double C = 0.0;
};

/// `mean_params` is (w0, w). If `offset` is given it is used as b (any b
/// with w.b = -w0 yields the same A); otherwise the minimum-norm b.
VarianceReductionWorkspace variance_integral_A(const Vector& mean_params,
                                               const PopulationModel& population,
                                               const std::optional<Vector>& offset = std::nullopt);

struct UtilityExtrema {
  double e_min = 0.0;
  double e_max = 0.0;
  Vector argmin;  // empty when no search was performed
  Vector argmax;
  int evaluations = 0;
};

/// Evaluates one utility kind for posteriors of a fixed dimension. Holds
/// the quadrature grid so repeated evaluations do not rebuild it.
class UtilityEvaluator {
 public:
  UtilityEvaluator(UtilitySpec spec, PriorSpec prior, int n_covariates);

  const UtilitySpec& spec() const { return spec_; }
  const PriorSpec& prior() const { return prior_; }

  /// E(x* | D_n). `data` must be the observations `post` was fitted on.
  double value(const GaussianPosterior& post, std::span<const LabeledSample> data,
               const Vector& x_star) const;

  UtilityExtrema extrema(const GaussianPosterior& post, std::span<const LabeledSample> data) const;

  /// Population-averaged 1 - max_y p(y | x, D_n).
  double generalisation_error(const GaussianPosterior& post) const;

  /// (lambda^2 / 2 pi) tr(A F^-1), A evaluated at the posterior mean.
  double predictive_variance(const GaussianPosterior& post) const;

 private:
  double branch_term(const GaussianPosterior& post) const;

  UtilitySpec spec_;
  PriorSpec prior_;
  int n_covariates_;
  // Generalisation error only: one array per augmented coordinate.
  std::vector<Eigen::ArrayXd> grid_coords_;
  Eigen::ArrayXd grid_weights_;
};

// Convenience wrappers around UtilityEvaluator.

double utility_uncertainty(const GaussianPosterior& post, const Vector& x_star);

double utility_entropy(const GaussianPosterior& post, std::span<const LabeledSample> data,
                       const Vector& x_star, const PriorSpec& prior, const FitOptions& fit = {});

double utility_generalisation_error(const GaussianPosterior& post,
                                    std::span<const LabeledSample> data, const Vector& x_star,
                                    const UtilitySpec& spec, const PriorSpec& prior);

double utility_variance_reduction(const GaussianPosterior& post,
                                  std::span<const LabeledSample> data, const Vector& x_star,
                                  const UtilitySpec& spec, const PriorSpec& prior);

UtilityExtrema utility_extrema(const GaussianPosterior& post, std::span<const LabeledSample> data,
                               const UtilitySpec& spec, const PriorSpec& prior);

}  // namespace infoadapt
