#include "infoadapt/bayes_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "infoadapt/errors.hpp"

namespace infoadapt {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double jj_lambda(double xi) {
  const double a = std::abs(xi);
  if (a < 1e-4) return 0.125 - a * a / 96.0;
  return (sigmoid(a) - 0.5) / (2.0 * a);
}

void validate_sample(const LabeledSample& sample) {
  if (sample.label != 1 && sample.label != -1)
    throw InputError("label must be -1 or +1, got " + std::to_string(sample.label));
  if (!sample.covariates.allFinite()) throw InputError("non-finite covariate");
  if (sample.covariates.size() > kMaxCovariates)
    throw InputError("at most " + std::to_string(kMaxCovariates) + " covariates supported");
}

GaussianPosterior GaussianPosterior::from_prior(int n_covariates, const PriorSpec& prior) {
  if (!(prior.variance > 0) || !std::isfinite(prior.variance))
    throw InputError("prior variance must be positive and finite");
  if (n_covariates < 0 || n_covariates > kMaxCovariates)
    throw InputError("unsupported covariate dimension " + std::to_string(n_covariates));
  const int p = n_covariates + 1;
  GaussianPosterior post;
  post.mean_ = Vector::Zero(p);
  post.covariance_ = Matrix::Identity(p, p) * prior.variance;
  post.precision_ = Matrix::Identity(p, p) / prior.variance;
  post.log_det_covariance_ = p * std::log(prior.variance);
  return post;
}

ConvergenceError::ConvergenceError(GaussianPosterior last, double last_change)
    : std::runtime_error("variational fit did not converge (last max |dxi| = " +
                         std::to_string(last_change) + ")"),
      last_(std::move(last)),
      last_change_(last_change) {}

// Runs the xi fixed point on a contiguous block of augmented rows.
class VariationalFitter {
 public:
  VariationalFitter(int p, const PriorSpec& prior) : p_(p), prior_(prior) {}

  void reserve(std::size_t n) {
    rows_.clear();
    labels_.clear();
    rows_.reserve(n * p_);
    labels_.reserve(n);
  }

  void add(const double* x, int label) {
    rows_.insert(rows_.end(), x, x + p_);
    labels_.push_back(label);
  }

  void add_sample(const LabeledSample& s) {
    double x[kMaxParams];
    x[0] = 1.0;
    for (int j = 1; j < p_; ++j) x[j] = s.covariates(j - 1);
    add(x, s.label);
  }

  GaussianPosterior run(std::vector<double> xi, const FitOptions& options) {
    const std::size_t n = labels_.size();
    if (!(options.tol > 0)) throw InputError("fit tolerance must be positive");
    if (options.max_iter < 1) throw InputError("max_iter must be at least 1");

    Vector b = Vector::Zero(p_);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = &rows_[i * p_];
      const double h = 0.5 * labels_[i];
      for (int a = 0; a < p_; ++a) b(a) += h * x[a];
    }

    GaussianPosterior post;
    std::vector<double> x1(n), x2(n);
    double change = 0.0;
    int iter = 0;
    // One fixed-point map xi -> out; `post` is left solved at `in`.
    auto step = [&](const std::vector<double>& in, std::vector<double>& out) {
      solve(in, b, post);
      post.iterations_ = ++iter;
      change = update_xi(post, in, out);
      return change < options.tol;
    };
    // Plain steps stop the iteration; SQUAREM extrapolation over each pair
    // of steps only shortens the path to the same fixed point.
    while (iter < options.max_iter) {
      if (step(xi, x1)) break;
      if (iter >= options.max_iter) {
        xi.swap(x1);
        break;
      }
      if (step(x1, x2)) {
        xi.swap(x1);
        break;
      }
      double rr = 0.0, vv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = x1[i] - xi[i];
        const double v = x2[i] - 2.0 * x1[i] + xi[i];
        rr += r * r;
        vv += v * v;
      }
      const double alpha = vv > 0.0 ? std::min(-1.0, -std::sqrt(rr / vv)) : -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = x1[i] - xi[i];
        const double v = x2[i] - 2.0 * x1[i] + xi[i];
        xi[i] = std::abs(xi[i] - 2.0 * alpha * r + alpha * alpha * v);
      }
    }
    if (change < options.tol) {
      post.xi_ = std::move(xi);
      return post;
    }
    // Report the posterior consistent with the last xi actually used.
    solve(xi, b, post);
    post.xi_ = std::move(xi);
    throw ConvergenceError(std::move(post), change);
  }

 private:
  // out_i = sqrt(x_i^T (Sigma + mu mu^T) x_i); returns max |out_i - in_i|.
  double update_xi(const GaussianPosterior& post, const std::vector<double>& in, std::vector<double>& out) const {
    double m[kMaxParams * kMaxParams];
    for (int a = 0; a < p_; ++a)
      for (int c = 0; c < p_; ++c) m[a * kMaxParams + c] = post.covariance_(a, c) + post.mean_(a) * post.mean_(c);
    double change = 0.0;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const double* x = &rows_[i * p_];
      double q = 0.0;
      for (int a = 0; a < p_; ++a) {
        double s = 0.0;
        for (int c = 0; c < p_; ++c) s += m[a * kMaxParams + c] * x[c];
        q += x[a] * s;
      }
      out[i] = std::sqrt(std::max(q, 0.0));
      change = std::max(change, std::abs(out[i] - in[i]));
    }
    return change;
  }

  void solve(const std::vector<double>& xi, const Vector& b, GaussianPosterior& post) const {
    const std::size_t n = labels_.size();
    const int p = p_;
    // Lower triangle of the precision, row-major in a fixed-size buffer.
    double prec[kMaxParams * kMaxParams] = {};
    for (int a = 0; a < p; ++a) prec[a * kMaxParams + a] = 1.0 / prior_.variance;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = &rows_[i * p];
      const double l = 2.0 * jj_lambda(xi[i]);
      for (int a = 0; a < p; ++a) {
        const double la = l * x[a];
        double* row = prec + a * kMaxParams;
        for (int c = 0; c <= a; ++c) row[c] += la * x[c];
      }
    }
    double chol[kMaxParams * kMaxParams];
    if (!cholesky(prec, p, chol)) {
      for (int a = 0; a < p; ++a) prec[a * kMaxParams + a] += 1e-9;
      if (!cholesky(prec, p, chol)) throw NumericError("posterior precision is not positive definite");
    }

    post.precision_.resize(p, p);
    for (int a = 0; a < p; ++a)
      for (int c = 0; c <= a; ++c) post.precision_(a, c) = post.precision_(c, a) = prec[a * kMaxParams + c];

    // Sigma = L^-T L^-1 from the inverse of the lower factor.
    double inv[kMaxParams * kMaxParams] = {};
    for (int c = 0; c < p; ++c) {
      inv[c * kMaxParams + c] = 1.0 / chol[c * kMaxParams + c];
      for (int a = c + 1; a < p; ++a) {
        double s = 0.0;
        for (int k = c; k < a; ++k) s += chol[a * kMaxParams + k] * inv[k * kMaxParams + c];
        inv[a * kMaxParams + c] = -s / chol[a * kMaxParams + a];
      }
    }
    post.covariance_.resize(p, p);
    for (int a = 0; a < p; ++a)
      for (int c = 0; c <= a; ++c) {
        double s = 0.0;
        for (int k = a; k < p; ++k) s += inv[k * kMaxParams + a] * inv[k * kMaxParams + c];
        post.covariance_(a, c) = post.covariance_(c, a) = s;
      }
    post.mean_.resize(p);
    for (int a = 0; a < p; ++a) {
      double s = 0.0;
      for (int c = 0; c < p; ++c) s += post.covariance_(a, c) * b(c);
      post.mean_(a) = s;
    }
    double log_det_prec = 0.0;
    for (int a = 0; a < p; ++a) log_det_prec += 2.0 * std::log(chol[a * kMaxParams + a]);
    post.log_det_covariance_ = -log_det_prec;
  }

  // Lower Cholesky factor of the row-major lower triangle `a`; false if not
  // positive definite.
  static bool cholesky(const double* a, int p, double* l) {
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = a[i * kMaxParams + j];
        for (int k = 0; k < j; ++k) s -= l[i * kMaxParams + k] * l[j * kMaxParams + k];
        if (i == j) {
          if (!(s > 0.0)) return false;
          l[i * kMaxParams + i] = std::sqrt(s);
        } else {
          l[i * kMaxParams + j] = s / l[j * kMaxParams + j];
        }
      }
    }
    return true;
  }

  int p_;
  PriorSpec prior_;
  std::vector<double> rows_;
  std::vector<int> labels_;
};

GaussianPosterior fit_variational(std::span<const LabeledSample> data, int n_covariates,
                                  const PriorSpec& prior, const FitOptions& options) {
  auto post = GaussianPosterior::from_prior(n_covariates, prior);
  if (data.empty()) return post;
  for (const auto& s : data) {
    if (s.covariates.size() != n_covariates) throw InputError("fit_variational: inconsistent covariate dimensions");
    validate_sample(s);
  }
  VariationalFitter fitter(n_covariates + 1, prior);
  fitter.reserve(data.size());
  for (const auto& s : data) fitter.add_sample(s);
  return fitter.run(std::vector<double>(data.size(), 1.0), options);
}

GaussianPosterior refit_with(const GaussianPosterior& parent, std::span<const LabeledSample> data,
                             const LabeledSample& extra, const PriorSpec& prior,
                             const FitOptions& options) {
  validate_sample(extra);
  if (extra.covariates.size() != parent.n_covariates())
    throw InputError("refit_with: covariate dimension does not match posterior");
  for (const auto& s : data)
    if (s.covariates.size() != parent.n_covariates())
      throw InputError("refit_with: inconsistent covariate dimensions");
  return refit_with_augmented(parent, data, extra.augmented(), extra.label, prior, options);
}

GaussianPosterior refit_with_augmented(const GaussianPosterior& parent,
                                       std::span<const LabeledSample> data,
                                       const Vector& extra_augmented, int extra_label,
                                       const PriorSpec& prior, const FitOptions& options) {
  const int p = parent.n_params();
  VariationalFitter fitter(p, prior);
  fitter.reserve(data.size() + 1);
  for (const auto& s : data) fitter.add_sample(s);
  fitter.add(extra_augmented.data(), extra_label);

  std::vector<double> xi;
  xi.reserve(data.size() + 1);
  if (parent.n_obs() == data.size()) {
    xi.assign(parent.xi().begin(), parent.xi().end());
  } else {
    xi.assign(data.size(), 1.0);
  }
  xi.push_back(1.0);
  return fitter.run(std::move(xi), options);
}

double predict_prob_augmented(const GaussianPosterior& post, const Vector& x) {
  if (x.size() != post.n_params()) throw InputError("predict_prob: dimension mismatch");
  const double activation = post.mean().dot(x);
  const double variance = x.dot(post.covariance() * x);
  return sigmoid(activation / std::sqrt(1.0 + std::numbers::pi * variance / 8.0));
}

double predict_prob(const GaussianPosterior& post, const Vector& covariates) {
  if (covariates.size() != post.n_covariates()) throw InputError("predict_prob: dimension mismatch");
  return predict_prob_augmented(post, augment(covariates));
}

double posterior_entropy(const GaussianPosterior& post) {
  const double p = post.n_params();
  const double h = 0.5 * p * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * post.log_det_covariance();
  if (!std::isfinite(h)) throw NumericError("posterior entropy is not finite");
  return h;
}

Matrix fisher_information(const GaussianPosterior& post) { return post.precision(); }

}  // namespace infoadapt
