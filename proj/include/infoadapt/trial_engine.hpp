#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infoadapt/candidate_stream.hpp"
#include "infoadapt/protocol.hpp"
#include "infoadapt/stats.hpp"
#include "infoadapt/trial_state.hpp"
#include "infoadapt/utility.hpp"

namespace infoadapt {

struct TrialConfig {
  std::size_t n_total = 25;
  std::optional<UtilitySpec> utility;  // absent for the RCT baseline
  ProtocolConfig protocol;
  PriorSpec prior;
  FitOptions fit;
  std::size_t validation_per_arm = 25;  // fresh draws; dataset replay uses its holdout
  std::uint64_t seed = 0;
  SuccessRule success_rule = SuccessRule::AllArmsJoint;
  double alpha = 0.05;
  /// Upper bound on candidates screened per trial; reaching it ends the
  /// trial as incomplete.
  std::size_t max_candidates = 1'000'000;
};

void validate_trial_config(const TrialConfig& config, int n_covariates);

/// Metrics after the n-th recruitment.
struct Snapshot {
  std::size_t n = 0;
  std::size_t rejected = 0;
  std::vector<ArmTests> arms;
  bool success = false;        // under the configured success rule
  double mse = std::nan("");  // NaN when the true parameters are unknown
};

struct TrialResult {
  TrialState final_state;
  std::vector<Snapshot> snapshots;  // one per recruitment, n = 1, 2, ...
  double validation_accuracy = std::nan("");
  bool completed = false;  // false if the stream ran out before n_total
  std::size_t candidates_drawn = 0;
};

/// One sequential trial: screen candidates until n_total are recruited.
/// Randomness is derived from `replicate_seed` only.
TrialResult run_trial(const TrialConfig& config, const StreamSpec& stream, std::uint64_t replicate_seed);

/// Fraction of `validation` whose thresholded prediction (p >= 0.5 -> +1)
/// matches the label.
double evaluate_validation(const GaussianPosterior& post, std::span<const LabeledSample> validation);

/// Compact per-replicate record kept by run_replicates.
struct ReplicateSummary {
  std::size_t index = 0;
  bool failed = false;
  std::string error;
  bool completed = false;
  std::size_t candidates_drawn = 0;
  std::size_t rejected = 0;
  double validation_accuracy = std::nan("");
  std::vector<std::size_t> arm_counts;
  std::size_t convergence_warnings = 0;
  std::vector<Snapshot> snapshots;
};

struct PerNMetrics {
  std::size_t replicates = 0;  // replicates that reached this N
  double power = 0.0;
  double mean_rejections = 0.0;
  double mse = std::nan("");
  double type1_rate = 0.0;  // fraction of per-arm joint weight tests rejecting
};

struct ImbalanceRow {
  std::size_t replicate = 0;
  BalanceTest test;
};

struct ImbalanceSummary {
  std::size_t n_tested = 0;
  std::size_t n_significant = 0;
  double median_smallest_arm = std::nan("");
  double median_largest_arm = std::nan("");
  std::vector<ImbalanceRow> rows;
};

struct SimulationReport {
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::uint64_t seed = 0;
  SuccessRule success_rule = SuccessRule::AllArmsJoint;
  std::size_t n_replicates = 0;
  std::size_t n_failed = 0;
  std::size_t n_incomplete = 0;
  std::map<std::size_t, PerNMetrics> per_n;
  double validation_accuracy = std::nan("");
  double mean_rejections = 0.0;  // at the end of each trial
  ImbalanceSummary imbalance;    // K >= 2 only
  std::vector<ReplicateSummary> replicates;

  const PerNMetrics& at(std::size_t n) const;
  /// Largest N recorded.
  std::size_t final_n() const;
};

/// Deterministic, order-independent aggregation of replicate summaries.
SimulationReport aggregate_replicates(std::vector<ReplicateSummary> replicates, SuccessRule rule,
                                      std::uint64_t seed, int arms);

struct ReplicateOptions {
  unsigned threads = 1;
  /// Optional progress callback, invoked from worker threads with the
  /// number of finished replicates.
  std::function<void(std::size_t)> progress;
};

/// Independent replicates with seeds derive_seed(seed, {r}).
SimulationReport run_replicates(const TrialConfig& config, const StreamSpec& stream,
                                std::size_t n_replicates, std::uint64_t seed,
                                const ReplicateOptions& options = {});

/// Seed of replicate r under master seed `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate);

}  // namespace infoadapt
