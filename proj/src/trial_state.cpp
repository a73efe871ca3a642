#include "infoadapt/trial_state.hpp"

#include "infoadapt/errors.hpp"

namespace infoadapt {

TrialState::TrialState(int arms, int n_covariates, PriorSpec prior, FitOptions fit)
    : n_covariates_(n_covariates), prior_(prior), fit_(fit) {
  if (arms < 1) throw ConfigError("trial needs at least one arm");
  data_.resize(arms);
  posteriors_.assign(arms, GaussianPosterior::from_prior(n_covariates, prior));
  extrema_.resize(arms);
}

std::vector<std::size_t> TrialState::arm_counts() const {
  std::vector<std::size_t> counts;
  for (const auto& d : data_) counts.push_back(d.size());
  return counts;
}

void TrialState::absorb(int arm, LabeledSample sample) {
  auto& data = data_.at(arm);
  GaussianPosterior next;
  try {
    next = refit_with(posteriors_[arm], data, sample, prior_, fit_);
  } catch (const ConvergenceError& e) {
    next = e.last_iterate();
    ++convergence_warnings_;
  }
  data.push_back(std::move(sample));
  posteriors_[arm] = std::move(next);
  extrema_[arm].reset();
  ++recruited_;
}

void TrialState::record(DecisionRecord record) {
  if (!record.recruited) ++rejected_;
  log_.push_back(std::move(record));
}

}  // namespace infoadapt
