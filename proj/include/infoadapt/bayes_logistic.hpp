#pragma once

// Variational Bayesian logistic regression for a single treatment arm.
//
// The posterior over the parameter vector (w0, w) is approximated by a
// Gaussian N(mean, covariance) using the local quadratic bound on the
// logistic sigmoid, with one variational parameter xi_i per observation:
//
//   covariance^-1 = prior^-1 + 2 sum_i lambda(xi_i) x_i x_i^T
//   mean          = covariance * sum_i (y_i / 2) x_i
//   lambda(xi)    = (sigmoid(xi) - 1/2) / (2 xi)
//   xi_i^2        = x_i^T (covariance + mean mean^T) x_i
//
// where x_i is the augmented covariate vector (1, covariates).

#include <span>
#include <stdexcept>
#include <vector>

#include "infoadapt/linalg.hpp"

namespace infoadapt {

struct LabeledSample {
  Vector covariates;  // length d, without the constant term
  int label = 1;      // -1 or +1

  Vector augmented() const { return augment(covariates); }
};

/// Validates label and finiteness; throws InputError.
void validate_sample(const LabeledSample& sample);

struct PriorSpec {
  double variance = 5.0;  // applied independently to intercept and weights
};

struct FitOptions {
  double tol = 1e-6;  // on max |delta xi|
  int max_iter = 500;
};

class GaussianPosterior {
 public:
  /// Posterior with no observations: mean 0, covariance = prior.
  static GaussianPosterior from_prior(int n_covariates, const PriorSpec& prior);

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  /// Inverse covariance; under the variational approximation this is the
  /// Fisher information of the posterior.
  const Matrix& precision() const { return precision_; }
  const std::vector<double>& xi() const { return xi_; }
  std::size_t n_obs() const { return xi_.size(); }
  int n_params() const { return static_cast<int>(mean_.size()); }
  int n_covariates() const { return n_params() - 1; }
  double log_det_covariance() const { return log_det_covariance_; }
  int iterations() const { return iterations_; }

 private:
  friend class VariationalFitter;
  Vector mean_;
  Matrix covariance_;
  Matrix precision_;
  std::vector<double> xi_;
  double log_det_covariance_ = 0.0;
  int iterations_ = 0;
};

/// Thrown when the xi fixed point has not converged within max_iter.
/// Carries the last iterate so callers can decide to accept it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(GaussianPosterior last, double last_change);
  const GaussianPosterior& last_iterate() const { return last_; }
  double last_change() const { return last_change_; }

 private:
  GaussianPosterior last_;
  double last_change_;
};

/// Full fit from scratch, every xi initialised at 1. Empty data returns the
/// prior.
GaussianPosterior fit_variational(std::span<const LabeledSample> data, int n_covariates,
                                  const PriorSpec& prior, const FitOptions& options = {});

/// Fit of `data` plus one extra observation, warm-starting xi from `parent`
/// (which must have been fitted on `data`) and the new point's xi at 1.
GaussianPosterior refit_with(const GaussianPosterior& parent, std::span<const LabeledSample> data,
                             const LabeledSample& extra, const PriorSpec& prior,
                             const FitOptions& options = {});

/// Same as refit_with but the new observation is given as an augmented
/// vector, avoiding the sample validation used on the public path.
GaussianPosterior refit_with_augmented(const GaussianPosterior& parent,
                                       std::span<const LabeledSample> data,
                                       const Vector& extra_augmented, int extra_label,
                                       const PriorSpec& prior, const FitOptions& options);

/// p(y = +1 | covariates, data) with the probit-style moderation
/// sigmoid(mu.x / sqrt(1 + pi x^T Sigma x / 8)).
double predict_prob(const GaussianPosterior& post, const Vector& covariates);

/// Same, for an already-augmented vector.
double predict_prob_augmented(const GaussianPosterior& post, const Vector& x);

/// Differential entropy of the Gaussian posterior in nats:
/// (p/2)(1 + log 2 pi) + (1/2) log det Sigma with p = d + 1 parameters.
double posterior_entropy(const GaussianPosterior& post);

/// Sigma^-1.
Matrix fisher_information(const GaussianPosterior& post);

double sigmoid(double z);

/// lambda(xi) = (sigmoid(xi) - 1/2) / (2 xi), with the xi -> 0 limit 1/8.
double jj_lambda(double xi);

}  // namespace infoadapt
