#include "infoadapt/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infoadapt/errors.hpp"

namespace infoadapt {

std::string to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::UncertaintySampling: return "uncertainty";
    case UtilityKind::PosteriorEntropy: return "entropy";
    case UtilityKind::GeneralisationError: return "generalisation";
    case UtilityKind::VarianceReduction: return "variance-reduction";
  }
  return "unknown";
}

UtilityKind parse_utility_kind(const std::string& name) {
  if (name == "uncertainty" || name == "uncertainty-sampling") return UtilityKind::UncertaintySampling;
  if (name == "entropy" || name == "posterior-entropy") return UtilityKind::PosteriorEntropy;
  if (name == "generalisation" || name == "generalisation-error" || name == "generalization")
    return UtilityKind::GeneralisationError;
  if (name == "variance-reduction" || name == "variance") return UtilityKind::VarianceReduction;
  throw ConfigError("unknown utility '" + name + "'");
}

void validate_population(const PopulationModel& population) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UniformHypercube>) {
          if (!(p.half_width > 0)) throw ConfigError("hypercube half width must be positive");
        } else if constexpr (std::is_same_v<T, IsotropicGaussian>) {
          if (!(p.sigma_p > 0)) throw ConfigError("population sigma must be positive");
        } else {
          if (p.samples.empty()) throw ConfigError("empirical population has no samples");
        }
      },
      population);
}

UtilitySpec default_utility_spec(UtilityKind kind, SearchSpace search_space) {
  UtilitySpec spec;
  spec.kind = kind;
  spec.search_space = std::move(search_space);
  if (kind == UtilityKind::GeneralisationError) spec.population = UniformHypercube{1.0};
  if (kind == UtilityKind::VarianceReduction) spec.population = IsotropicGaussian{0.5};
  return spec;
}

void validate_utility_spec(const UtilitySpec& spec, int n_covariates) {
  if (spec.search_space.lower.size() != n_covariates || spec.search_space.upper.size() != n_covariates)
    throw ConfigError("search space dimension does not match the covariates");
  if (!((spec.search_space.upper - spec.search_space.lower).array() > 0).all())
    throw ConfigError("search space lower bounds must be below upper bounds");
  if (spec.kind == UtilityKind::GeneralisationError) {
    if (spec.quadrature_points_per_dim < 8) throw ConfigError("quadrature needs at least 8 points per dimension");
    if (!spec.population) throw ConfigError("generalisation error needs a population model");
    validate_population(*spec.population);
  }
  if (spec.kind == UtilityKind::VarianceReduction) {
    if (!spec.population || !std::holds_alternative<IsotropicGaussian>(*spec.population))
      throw ConfigError("variance reduction needs an isotropic Gaussian population (the uniform-population integral diverges)");
    validate_population(*spec.population);
  }
}

VarianceReductionWorkspace variance_integral_A(const Vector& mean_params,
                                               const PopulationModel& population,
                                               const std::optional<Vector>& offset) {
  const auto* gauss = std::get_if<IsotropicGaussian>(&population);
  if (!gauss) throw ConfigError("variance_integral_A: population must be an isotropic Gaussian");
  if (!(gauss->sigma_p > 0)) throw ConfigError("variance_integral_A: sigma_p must be positive");
  const int d = static_cast<int>(mean_params.size()) - 1;
  if (d < 1) throw InputError("variance_integral_A: need at least one covariate");
  if (!mean_params.allFinite()) throw InputError("variance_integral_A: non-finite parameters");

  VarianceReductionWorkspace ws;
  const double lsq = ws.lambda_sq;
  const double w0 = mean_params(0);
  const Vector w = mean_params.tail(d);
  const double ww = w.squaredNorm();

  ws.B = 2.0 * lsq * w * w.transpose();
  if (offset) {
    if (offset->size() != d) throw InputError("variance_integral_A: offset dimension mismatch");
    if (std::abs(w.dot(*offset) + w0) > 1e-9 * std::max(1.0, std::abs(w0)))
      throw InputError("variance_integral_A: offset must satisfy w.b = -w0");
    ws.b = *offset;
  } else {
    ws.b = ww > 0 ? Vector(-w0 * w / ww) : Vector(Vector::Zero(d));
  }

  const double inv_var = 1.0 / (gauss->sigma_p * gauss->sigma_p);
  ws.B_prime = ws.B + Matrix::Identity(d, d) * inv_var;
  Eigen::LLT<Matrix> llt(ws.B_prime);
  if (llt.info() != Eigen::Success) throw NumericError("variance_integral_A: B' is singular");
  // B b = -2 lambda^2 w0 w whenever w.b = -w0; using it directly also covers w = 0.
  const Vector rhs = -2.0 * lsq * w0 * w;
  ws.b_prime = llt.solve(rhs);
  const Matrix B_prime_inv = llt.solve(Matrix::Identity(d, d));

  double log_det_B_prime = 0.0;
  for (int i = 0; i < d; ++i) log_det_B_prime += 2.0 * std::log(llt.matrixLLT()(i, i));
  const double log_det_pop = d * std::log(gauss->sigma_p * gauss->sigma_p);
  const double half_d_log_2pi = 0.5 * d * std::log(2.0 * std::numbers::pi);

  // -1/2 b.B.b = -lambda^2 w0^2 for every admissible b.
  const double exponent = -lsq * w0 * w0 + 0.5 * ws.b_prime.dot(ws.B_prime * ws.b_prime);
  ws.C = std::exp(exponent - half_d_log_2pi - 0.5 * log_det_pop);
  const double a00 = std::exp(exponent - 0.5 * log_det_pop - 0.5 * log_det_B_prime);

  ws.A_matrix.resize(d + 1, d + 1);
  ws.A_matrix(0, 0) = a00;
  for (int m = 0; m < d; ++m) {
    ws.A_matrix(0, m + 1) = ws.A_matrix(m + 1, 0) = a00 * ws.b_prime(m);
    for (int n = 0; n < d; ++n)
      ws.A_matrix(m + 1, n + 1) = a00 * (B_prime_inv(m, n) + ws.b_prime(m) * ws.b_prime(n));
  }
  return ws;
}

namespace {

TensorGrid make_population_grid(const UtilitySpec& spec, int d) {
  if (spec.kind != UtilityKind::GeneralisationError) return {};
  const auto& pop = *spec.population;
  if (const auto* cube = std::get_if<UniformHypercube>(&pop)) {
    const Vector lo = Vector::Constant(d, -cube->half_width);
    const Vector hi = Vector::Constant(d, cube->half_width);
    auto grid = tensor_gauss_legendre(lo, hi, spec.quadrature_points_per_dim);
    const double density = std::pow(2.0 * cube->half_width, -d);
    for (auto& w : grid.weights) w *= density;
    return grid;
  }
  if (const auto* gauss = std::get_if<IsotropicGaussian>(&pop)) {
    const double s = gauss->sigma_p;
    const Vector lo = Vector::Constant(d, -6.0 * s);
    const Vector hi = Vector::Constant(d, 6.0 * s);
    auto grid = tensor_gauss_legendre(lo, hi, spec.quadrature_points_per_dim);
    const double norm = std::pow(2.0 * std::numbers::pi * s * s, -0.5 * d);
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const double* x = grid.point(t);
      double r2 = 0.0;
      for (int j = 1; j <= d; ++j) r2 += x[j] * x[j];
      grid.weights[t] *= norm * std::exp(-0.5 * r2 / (s * s));
    }
    return grid;
  }
  const auto& emp = std::get<EmpiricalPopulation>(pop);
  TensorGrid grid;
  grid.n_params = d + 1;
  for (const auto& x : emp.samples) {
    if (x.size() != d) throw ConfigError("empirical population dimension mismatch");
    grid.points.push_back(1.0);
    for (int j = 0; j < d; ++j) grid.points.push_back(x(j));
    grid.weights.push_back(1.0 / static_cast<double>(emp.samples.size()));
  }
  return grid;
}

}  // namespace

UtilityEvaluator::UtilityEvaluator(UtilitySpec spec, PriorSpec prior, int n_covariates)
    : spec_(std::move(spec)), prior_(prior), n_covariates_(n_covariates) {
  validate_utility_spec(spec_, n_covariates_);
  const auto grid = make_population_grid(spec_, n_covariates_);
  for (int a = 0; a < grid.n_params; ++a) {
    grid_coords_.emplace_back(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) grid_coords_[a](t) = grid.point(t)[a];
  }
  grid_weights_ = Eigen::Map<const Eigen::ArrayXd>(grid.weights.data(), grid.size());
  // A probability measure: the constant integrand 0.5 must give exactly 0.5.
  if (grid_weights_.size() > 0) grid_weights_ /= grid_weights_.sum();
}

double UtilityEvaluator::generalisation_error(const GaussianPosterior& post) const {
  if (grid_weights_.size() == 0) throw ConfigError("generalisation error requested without a population grid");
  const int p = post.n_params();
  if (p != static_cast<int>(grid_coords_.size())) throw InputError("generalisation_error: dimension mismatch");
  const Vector& mu = post.mean();
  const Matrix& cov = post.covariance();
  // Coordinate 0 is the constant 1.
  Eigen::ArrayXd activation = Eigen::ArrayXd::Constant(grid_weights_.size(), mu(0));
  Eigen::ArrayXd variance = Eigen::ArrayXd::Constant(grid_weights_.size(), cov(0, 0));
  for (int a = 1; a < p; ++a) {
    activation += mu(a) * grid_coords_[a];
    variance += grid_coords_[a] * (2.0 * cov(0, a) + cov(a, a) * grid_coords_[a]);
    for (int c = a + 1; c < p; ++c) variance += (2.0 * cov(a, c)) * grid_coords_[a] * grid_coords_[c];
  }
  const Eigen::ArrayXd kappa = activation.abs() / (1.0 + (std::numbers::pi / 8.0) * variance).sqrt();
  return (grid_weights_ / (1.0 + kappa.exp())).sum();
}

double UtilityEvaluator::predictive_variance(const GaussianPosterior& post) const {
  const auto ws = variance_integral_A(post.mean(), *spec_.population);
  const double trace = (ws.A_matrix.cwiseProduct(post.covariance())).sum();  // tr(A Sigma), both symmetric
  return ws.lambda_sq / (2.0 * std::numbers::pi) * trace;
}

double UtilityEvaluator::branch_term(const GaussianPosterior& post) const {
  switch (spec_.kind) {
    case UtilityKind::PosteriorEntropy: return posterior_entropy(post);
    case UtilityKind::GeneralisationError: return generalisation_error(post);
    case UtilityKind::VarianceReduction: return predictive_variance(post);
    case UtilityKind::UncertaintySampling: break;
  }
  throw ConfigError("uncertainty sampling has no hypothetical-refit term");
}

double UtilityEvaluator::value(const GaussianPosterior& post, std::span<const LabeledSample> data,
                               const Vector& x_star) const {
  if (x_star.size() != post.n_covariates()) throw InputError("utility: candidate dimension mismatch");
  if (!x_star.allFinite()) throw InputError("utility: non-finite candidate");
  const Vector x = augment(x_star);
  const double p = predict_prob_augmented(post, x);
  if (spec_.kind == UtilityKind::UncertaintySampling) return std::min(p, 1.0 - p);

  double expected = 0.0;
  if (p > 0.0) {
    const auto up = refit_with_augmented(post, data, x, +1, prior_, spec_.fit);
    expected += p * branch_term(up);
  }
  if (p < 1.0) {
    const auto down = refit_with_augmented(post, data, x, -1, prior_, spec_.fit);
    expected += (1.0 - p) * branch_term(down);
  }
  return branch_term(post) - expected;
}

UtilityExtrema UtilityEvaluator::extrema(const GaussianPosterior& post,
                                         std::span<const LabeledSample> data) const {
  if (spec_.kind == UtilityKind::UncertaintySampling) return UtilityExtrema{0.0, 0.5, {}, {}, 0};
  const Box box = spec_.search_space.box();
  const double parent = branch_term(post);
  // value() minus the constant parent term; the constant is added back so
  // the reported extrema are exact utility values.
  auto expected_after = [&](const Vector& x_star) {
    const Vector x = augment(x_star);
    const double p = predict_prob_augmented(post, x);
    double expected = 0.0;
    if (p > 0.0) expected += p * branch_term(refit_with_augmented(post, data, x, +1, prior_, spec_.fit));
    if (p < 1.0) expected += (1.0 - p) * branch_term(refit_with_augmented(post, data, x, -1, prior_, spec_.fit));
    return expected;
  };
  // Minimising the expected post-refit term maximises the utility.
  const auto best = minimize_multistart(expected_after, box, spec_.search);
  const auto worst = minimize_multistart([&](const Vector& x) { return -expected_after(x); }, box, spec_.search);
  UtilityExtrema out;
  out.e_max = parent - best.value;
  out.e_min = parent + worst.value;
  out.argmax = best.argument;
  out.argmin = worst.argument;
  out.evaluations = best.evaluations + worst.evaluations;
  if (out.e_min > out.e_max) std::swap(out.e_min, out.e_max);
  return out;
}

double utility_uncertainty(const GaussianPosterior& post, const Vector& x_star) {
  const double p = predict_prob(post, x_star);
  return std::min(p, 1.0 - p);
}

double utility_entropy(const GaussianPosterior& post, std::span<const LabeledSample> data,
                       const Vector& x_star, const PriorSpec& prior, const FitOptions& fit) {
  UtilitySpec spec;
  spec.kind = UtilityKind::PosteriorEntropy;
  spec.fit = fit;
  const int d = post.n_covariates();
  spec.search_space = SearchSpace{Vector::Constant(d, -1.0), Vector::Constant(d, 1.0)};
  return UtilityEvaluator(spec, prior, d).value(post, data, x_star);
}

double utility_generalisation_error(const GaussianPosterior& post,
                                    std::span<const LabeledSample> data, const Vector& x_star,
                                    const UtilitySpec& spec, const PriorSpec& prior) {
  UtilitySpec s = spec;
  s.kind = UtilityKind::GeneralisationError;
  return UtilityEvaluator(s, prior, post.n_covariates()).value(post, data, x_star);
}

double utility_variance_reduction(const GaussianPosterior& post,
                                  std::span<const LabeledSample> data, const Vector& x_star,
                                  const UtilitySpec& spec, const PriorSpec& prior) {
  UtilitySpec s = spec;
  s.kind = UtilityKind::VarianceReduction;
  return UtilityEvaluator(s, prior, post.n_covariates()).value(post, data, x_star);
}

UtilityExtrema utility_extrema(const GaussianPosterior& post, std::span<const LabeledSample> data,
                               const UtilitySpec& spec, const PriorSpec& prior) {
  return UtilityEvaluator(spec, prior, post.n_covariates()).extrema(post, data);
}

}  // namespace infoadapt
