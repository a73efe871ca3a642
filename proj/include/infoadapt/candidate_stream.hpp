#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"
#include "infoadapt/random.hpp"
#include "infoadapt/utility.hpp"

namespace infoadapt {

/// Covariates uniform on a box; labels from one logistic model shared by
/// every arm.
struct UniformLogisticStream {
  Vector weights;
  double intercept = 0.0;
  Vector lower;
  Vector upper;
};

/// One covariate. A fair coin picks the class, then x ~ N(mean_y, sd^2).
struct GaussianMixtureStream {
  double mean_plus = -0.25;
  double mean_minus = 0.25;
  double sd = 0.5;
  double class_prob = 0.5;  // P(y = +1)
};

/// Covariates uniform on [-1, 1]^d; arm k has its own logistic model.
struct UnitSquareMultiArmStream {
  std::vector<Vector> weights;
  std::vector<double> intercepts;
};

/// Replays a fixed dataset in a per-replicate random order. The first
/// `holdout` entries of the permutation form the validation cohort and never
/// enter the candidate stream.
struct DatasetReplayStream {
  std::vector<LabeledSample> samples;
  std::size_t holdout = 25;
};

using StreamSpec =
    std::variant<UniformLogisticStream, GaussianMixtureStream, UnitSquareMultiArmStream, DatasetReplayStream>;

std::string stream_name(const StreamSpec& spec);
int stream_covariates(const StreamSpec& spec);
void validate_stream(const StreamSpec& spec, int arms);

/// True (w0, w) for each arm, when the generating model is logistic.
std::optional<std::vector<Vector>> true_parameters(const StreamSpec& spec, int arms);

/// First and ninth deciles of each covariate's marginal under the known
/// generating distribution. Not available for dataset replay.
std::optional<SearchSpace> population_deciles(const StreamSpec& spec);

/// A candidate and the outcome it would have on each arm. All per-arm
/// labels derive from one uniform draw, so the label is fixed before the
/// allocation is known without depending on it.
struct Candidate {
  Vector covariates;
  std::vector<int> arm_labels;
};

/// Draws one candidate from a synthetic stream (throws for dataset replay,
/// which needs a CandidateSource).
Candidate generate_candidate(const StreamSpec& spec, int arms, RandomStream& rng);

/// Per-replicate candidate supply. Synthetic streams are unbounded; dataset
/// replay ends when the permutation is exhausted.
class CandidateSource {
 public:
  CandidateSource(const StreamSpec& spec, int arms, std::uint64_t replicate_seed);

  std::optional<Candidate> next();
  /// Validation cohort for `arm`: the holdout for dataset replay, otherwise
  /// `n` fresh draws labelled by that arm's model.
  std::vector<LabeledSample> validation_cohort(int arm, std::size_t n);

  std::size_t drawn() const { return drawn_; }
  int n_covariates() const { return stream_covariates(spec_); }

 private:
  StreamSpec spec_;
  int arms_;
  RandomStream candidate_rng_;
  RandomStream validation_rng_;
  std::vector<std::size_t> order_;  // dataset replay only
  std::size_t cursor_ = 0;
  std::size_t drawn_ = 0;
  std::vector<std::vector<LabeledSample>> validation_;
};

}  // namespace infoadapt
