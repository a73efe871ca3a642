#pragma once

#include <optional>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"
#include "infoadapt/utility.hpp"

namespace infoadapt {

struct DecisionRecord {
  Vector candidate;
  std::vector<double> rho;
  int arm = 0;
  bool recruited = false;
  bool burn_in = false;
};

/// Observed data and posteriors of every arm at the current step.
class TrialState {
 public:
  TrialState(int arms, int n_covariates, PriorSpec prior, FitOptions fit = {});

  int arms() const { return static_cast<int>(data_.size()); }
  int n_covariates() const { return n_covariates_; }
  const PriorSpec& prior() const { return prior_; }
  const FitOptions& fit_options() const { return fit_; }

  const std::vector<LabeledSample>& data(int arm) const { return data_.at(arm); }
  const GaussianPosterior& posterior(int arm) const { return posteriors_.at(arm); }
  std::size_t recruited() const { return recruited_; }
  std::size_t rejected() const { return rejected_; }
  std::vector<std::size_t> arm_counts() const;
  const std::vector<DecisionRecord>& decision_log() const { return log_; }
  /// Number of absorbed observations whose refit hit max_iter (the last
  /// iterate was kept).
  std::size_t convergence_warnings() const { return convergence_warnings_; }

  /// Adds an observation to `arm`, refits its posterior warm-started from
  /// the previous one and drops that arm's cached extrema.
  void absorb(int arm, LabeledSample sample);
  void record(DecisionRecord record);

  /// Extrema depend only on an arm's data, so they are reused until that
  /// arm absorbs a new observation.
  const std::optional<UtilityExtrema>& cached_extrema(int arm) const { return extrema_.at(arm); }
  void cache_extrema(int arm, UtilityExtrema extrema) { extrema_.at(arm) = std::move(extrema); }

 private:
  int n_covariates_;
  PriorSpec prior_;
  FitOptions fit_;
  std::vector<std::vector<LabeledSample>> data_;
  std::vector<GaussianPosterior> posteriors_;
  std::vector<std::optional<UtilityExtrema>> extrema_;
  std::vector<DecisionRecord> log_;
  std::size_t recruited_ = 0;
  std::size_t rejected_ = 0;
  std::size_t convergence_warnings_ = 0;
};

}  // namespace infoadapt
