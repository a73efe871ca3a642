#include "infoadapt/candidate_stream.hpp"

#include <cmath>

#include "infoadapt/errors.hpp"
#include "infoadapt/stats.hpp"

namespace infoadapt {

namespace {

enum StreamPurpose : std::uint64_t { kCandidates = 1, kValidation = 2, kPermutation = 3 };

int label_from(double u, double p_plus) { return u < p_plus ? 1 : -1; }

double mixture_cdf(const GaussianMixtureStream& g, double x) {
  return g.class_prob * normal_cdf((x - g.mean_plus) / g.sd) +
         (1.0 - g.class_prob) * normal_cdf((x - g.mean_minus) / g.sd);
}

double mixture_quantile(const GaussianMixtureStream& g, double q) {
  double lo = std::min(g.mean_plus, g.mean_minus) - 10.0 * g.sd;
  double hi = std::max(g.mean_plus, g.mean_minus) + 10.0 * g.sd;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mixture_cdf(g, mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::string stream_name(const StreamSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformLogisticStream>) return "uniform-logistic";
        else if constexpr (std::is_same_v<T, GaussianMixtureStream>) return "gaussian-mixture";
        else if constexpr (std::is_same_v<T, UnitSquareMultiArmStream>) return "unit-square-multi-arm";
        else return "dataset-replay";
      },
      spec);
}

int stream_covariates(const StreamSpec& spec) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformLogisticStream>) return static_cast<int>(s.weights.size());
        else if constexpr (std::is_same_v<T, GaussianMixtureStream>) return 1;
        else if constexpr (std::is_same_v<T, UnitSquareMultiArmStream>)
          return s.weights.empty() ? 0 : static_cast<int>(s.weights.front().size());
        else return s.samples.empty() ? 0 : static_cast<int>(s.samples.front().covariates.size());
      },
      spec);
}

void validate_stream(const StreamSpec& spec, int arms) {
  std::visit(
      [arms](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformLogisticStream>) {
          const auto d = s.weights.size();
          if (d < 1 || d > kMaxCovariates) throw ConfigError("uniform-logistic: bad dimension");
          if (s.lower.size() != d || s.upper.size() != d) throw ConfigError("uniform-logistic: bound dimension");
          if (!((s.upper - s.lower).array() > 0).all()) throw ConfigError("uniform-logistic: empty box");
          if (!s.weights.allFinite() || !std::isfinite(s.intercept)) throw ConfigError("uniform-logistic: non-finite parameters");
        } else if constexpr (std::is_same_v<T, GaussianMixtureStream>) {
          if (!(s.sd > 0) || !std::isfinite(s.mean_plus) || !std::isfinite(s.mean_minus))
            throw ConfigError("gaussian-mixture: invalid parameters");
          if (!(s.class_prob > 0 && s.class_prob < 1)) throw ConfigError("gaussian-mixture: class probability in (0, 1)");
        } else if constexpr (std::is_same_v<T, UnitSquareMultiArmStream>) {
          if (static_cast<int>(s.weights.size()) != arms || static_cast<int>(s.intercepts.size()) != arms)
            throw ConfigError("multi-arm stream: need one model per arm");
          const auto d = s.weights.front().size();
          if (d < 1 || d > kMaxCovariates) throw ConfigError("multi-arm stream: bad dimension");
          for (const auto& w : s.weights)
            if (w.size() != d || !w.allFinite()) throw ConfigError("multi-arm stream: inconsistent weights");
        } else {
          if (s.samples.empty()) throw ConfigError("dataset replay: no samples");
          if (s.holdout >= s.samples.size()) throw ConfigError("dataset replay: holdout leaves no candidates");
          const auto d = s.samples.front().covariates.size();
          for (const auto& x : s.samples) {
            if (x.covariates.size() != d) throw ConfigError("dataset replay: inconsistent dimensions");
            validate_sample(x);
          }
        }
      },
      spec);
}

std::optional<std::vector<Vector>> true_parameters(const StreamSpec& spec, int arms) {
  if (const auto* s = std::get_if<UniformLogisticStream>(&spec)) {
    Vector theta(s->weights.size() + 1);
    theta(0) = s->intercept;
    theta.tail(s->weights.size()) = s->weights;
    return std::vector<Vector>(arms, theta);
  }
  if (const auto* g = std::get_if<GaussianMixtureStream>(&spec)) {
    // Equal-variance Gaussian classes give exactly logistic log-odds.
    const double v = g->sd * g->sd;
    const double w = (g->mean_plus - g->mean_minus) / v;
    const double w0 = (g->mean_minus * g->mean_minus - g->mean_plus * g->mean_plus) / (2.0 * v) +
                      std::log(g->class_prob / (1.0 - g->class_prob));
    return std::vector<Vector>(arms, make_vector({w0, w}));
  }
  if (const auto* m = std::get_if<UnitSquareMultiArmStream>(&spec)) {
    std::vector<Vector> out;
    for (std::size_t k = 0; k < m->weights.size(); ++k) {
      Vector theta(m->weights[k].size() + 1);
      theta(0) = m->intercepts[k];
      theta.tail(m->weights[k].size()) = m->weights[k];
      out.push_back(theta);
    }
    return out;
  }
  return std::nullopt;
}

std::optional<SearchSpace> population_deciles(const StreamSpec& spec) {
  if (const auto* s = std::get_if<UniformLogisticStream>(&spec)) {
    const Vector width = s->upper - s->lower;
    return SearchSpace{s->lower + 0.1 * width, s->lower + 0.9 * width};
  }
  if (const auto* g = std::get_if<GaussianMixtureStream>(&spec)) {
    return SearchSpace{make_vector({mixture_quantile(*g, 0.1)}), make_vector({mixture_quantile(*g, 0.9)})};
  }
  if (const auto* m = std::get_if<UnitSquareMultiArmStream>(&spec)) {
    const auto d = m->weights.front().size();
    return SearchSpace{Vector::Constant(d, -0.8), Vector::Constant(d, 0.8)};
  }
  return std::nullopt;
}

Candidate generate_candidate(const StreamSpec& spec, int arms, RandomStream& rng) {
  Candidate c;
  if (const auto* s = std::get_if<UniformLogisticStream>(&spec)) {
    const auto d = s->weights.size();
    c.covariates.resize(d);
    for (Eigen::Index j = 0; j < d; ++j)
      c.covariates(j) = s->lower(j) + rng.uniform() * (s->upper(j) - s->lower(j));
    const double p = sigmoid(s->weights.dot(c.covariates) + s->intercept);
    c.arm_labels.assign(arms, label_from(rng.uniform(), p));
    return c;
  }
  if (const auto* g = std::get_if<GaussianMixtureStream>(&spec)) {
    const int y = rng.uniform() < g->class_prob ? 1 : -1;
    const double mean = y > 0 ? g->mean_plus : g->mean_minus;
    c.covariates = make_vector({mean + g->sd * rng.normal()});
    c.arm_labels.assign(arms, y);
    return c;
  }
  if (const auto* m = std::get_if<UnitSquareMultiArmStream>(&spec)) {
    const auto d = m->weights.front().size();
    c.covariates.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) c.covariates(j) = -1.0 + 2.0 * rng.uniform();
    const double u = rng.uniform();
    for (int k = 0; k < arms; ++k)
      c.arm_labels.push_back(label_from(u, sigmoid(m->weights[k].dot(c.covariates) + m->intercepts[k])));
    return c;
  }
  throw ConfigError("generate_candidate: dataset replay needs a CandidateSource");
}

CandidateSource::CandidateSource(const StreamSpec& spec, int arms, std::uint64_t replicate_seed)
    : spec_(spec),
      arms_(arms),
      candidate_rng_(derive_seed(replicate_seed, {kCandidates})),
      validation_rng_(derive_seed(replicate_seed, {kValidation})) {
  validate_stream(spec_, arms_);
  validation_.resize(arms_);
  if (const auto* ds = std::get_if<DatasetReplayStream>(&spec_)) {
    RandomStream perm_rng(derive_seed(replicate_seed, {kPermutation}));
    order_ = random_permutation(ds->samples.size(), perm_rng);
    cursor_ = ds->holdout;
  }
}

std::optional<Candidate> CandidateSource::next() {
  if (const auto* ds = std::get_if<DatasetReplayStream>(&spec_)) {
    if (cursor_ >= order_.size()) return std::nullopt;
    const auto& s = ds->samples[order_[cursor_++]];
    ++drawn_;
    return Candidate{s.covariates, std::vector<int>(arms_, s.label)};
  }
  ++drawn_;
  return generate_candidate(spec_, arms_, candidate_rng_);
}

std::vector<LabeledSample> CandidateSource::validation_cohort(int arm, std::size_t n) {
  if (arm < 0 || arm >= arms_) throw InputError("validation_cohort: arm out of range");
  if (const auto* ds = std::get_if<DatasetReplayStream>(&spec_)) {
    std::vector<LabeledSample> out;
    for (std::size_t i = 0; i < ds->holdout; ++i) out.push_back(ds->samples[order_[i]]);
    return out;
  }
  auto& cohort = validation_[arm];
  if (cohort.size() != n) {
    // Cohorts for every arm share the same covariates and label uniforms.
    RandomStream rng = validation_rng_;
    cohort.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto c = generate_candidate(spec_, arms_, rng);
      cohort.push_back(LabeledSample{c.covariates, c.arm_labels[arm]});
    }
  }
  return cohort;
}

}  // namespace infoadapt
