#include "infoadapt/trial_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "infoadapt/errors.hpp"
#include "infoadapt/random.hpp"

namespace infoadapt {

namespace {

// Substream purposes under a replicate seed; candidate_stream owns 1-3.
enum TrialPurpose : std::uint64_t { kDecisions = 4 };

}  // namespace

void validate_trial_config(const TrialConfig& config, int n_covariates) {
  validate_protocol(config.protocol);
  if (config.n_total < 1) throw ConfigError("n_total must be at least 1");
  if (config.n_total < static_cast<std::size_t>(config.protocol.burn_in))
    throw ConfigError("n_total must be at least the burn-in");
  if (!(config.prior.variance > 0.0) || !std::isfinite(config.prior.variance))
    throw ConfigError("prior variance must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (config.max_candidates < config.n_total) throw ConfigError("max_candidates below n_total");
  if (n_covariates < 1 || n_covariates > kMaxCovariates) throw ConfigError("unsupported covariate dimension");
  if (needs_utility(config.protocol)) {
    if (!config.utility) throw ConfigError("this protocol needs a utility");
    validate_utility_spec(*config.utility, n_covariates);
  }
}

double evaluate_validation(const GaussianPosterior& post, std::span<const LabeledSample> validation) {
  if (validation.empty()) throw InputError("evaluate_validation: empty validation set");
  std::size_t correct = 0;
  for (const auto& s : validation) {
    const int predicted = predict_prob(post, s.covariates) >= 0.5 ? 1 : -1;
    correct += predicted == s.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(validation.size());
}

TrialResult run_trial(const TrialConfig& config, const StreamSpec& stream, std::uint64_t replicate_seed) {
  const int arms = config.protocol.arms;
  const int d = stream_covariates(stream);
  validate_trial_config(config, d);

  std::optional<UtilityEvaluator> evaluator;
  if (needs_utility(config.protocol)) evaluator.emplace(*config.utility, config.prior, d);
  const auto truths = true_parameters(stream, arms);

  CandidateSource source(stream, arms, replicate_seed);
  RandomStream rng(derive_seed(replicate_seed, {kDecisions}));
  TrialResult result{TrialState(arms, d, config.prior, config.fit), {}, std::nan(""), false, 0};
  auto& state = result.final_state;

  while (state.recruited() < config.n_total && source.drawn() < config.max_candidates) {
    auto candidate = source.next();
    if (!candidate) break;
    const Decision decision =
        decide(candidate->covariates, state, evaluator ? &*evaluator : nullptr, config.protocol, rng);
    state.record(DecisionRecord{candidate->covariates, decision.rho, decision.arm, decision.recruited,
                                decision.burn_in});
    if (!decision.recruited) continue;
    state.absorb(decision.arm, LabeledSample{candidate->covariates, candidate->arm_labels[decision.arm]});

    Snapshot snap;
    snap.n = state.recruited();
    snap.rejected = state.rejected();
    for (int k = 0; k < arms; ++k) snap.arms.push_back(weight_tests(state.posterior(k), config.alpha));
    snap.success = trial_success(snap.arms, config.success_rule);
    if (truths) {
      std::vector<GaussianPosterior> posts;
      for (int k = 0; k < arms; ++k) posts.push_back(state.posterior(k));
      snap.mse = parameter_mse(posts, *truths);
    }
    result.snapshots.push_back(std::move(snap));
  }
  result.completed = state.recruited() >= config.n_total;
  result.candidates_drawn = source.drawn();

  double accuracy = 0.0;
  for (int k = 0; k < arms; ++k) {
    const auto cohort = source.validation_cohort(k, config.validation_per_arm);
    accuracy += evaluate_validation(state.posterior(k), cohort);
  }
  result.validation_accuracy = accuracy / arms;
  return result;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) {
  return derive_seed(seed, {static_cast<std::uint64_t>(replicate)});
}

const PerNMetrics& SimulationReport::at(std::size_t n) const {
  const auto it = per_n.find(n);
  if (it == per_n.end()) throw InputError("no metrics recorded at N = " + std::to_string(n));
  return it->second;
}

std::size_t SimulationReport::final_n() const { return per_n.empty() ? 0 : per_n.rbegin()->first; }

SimulationReport aggregate_replicates(std::vector<ReplicateSummary> replicates, SuccessRule rule,
                                      std::uint64_t seed, int arms) {
  std::sort(replicates.begin(), replicates.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  SimulationReport report;
  report.seed = seed;
  report.success_rule = rule;
  report.n_replicates = replicates.size();

  struct Accumulator {
    std::size_t count = 0, successes = 0, tests = 0, test_rejections = 0, mse_count = 0;
    double rejections = 0.0, mse = 0.0;
  };
  std::map<std::size_t, Accumulator> acc;
  double validation = 0.0, rejections = 0.0;
  std::size_t ok = 0;
  std::vector<double> smallest, largest;

  for (const auto& r : replicates) {
    if (r.failed) {
      ++report.n_failed;
      continue;
    }
    ++ok;
    if (!r.completed) ++report.n_incomplete;
    validation += r.validation_accuracy;
    rejections += static_cast<double>(r.rejected);
    for (const auto& s : r.snapshots) {
      auto& a = acc[s.n];
      ++a.count;
      a.successes += trial_success(s.arms, rule) ? 1 : 0;
      a.rejections += static_cast<double>(s.rejected);
      for (const auto& t : s.arms) {
        ++a.tests;
        a.test_rejections += t.joint.reject ? 1 : 0;
      }
      if (std::isfinite(s.mse)) {
        ++a.mse_count;
        a.mse += s.mse;
      }
    }
    if (arms >= 2) {
      const auto test = chi_squared_balance(r.arm_counts, replicates.size());
      report.imbalance.rows.push_back(ImbalanceRow{r.index, test});
      ++report.imbalance.n_tested;
      report.imbalance.n_significant += test.significant ? 1 : 0;
      const auto [lo, hi] = std::minmax_element(r.arm_counts.begin(), r.arm_counts.end());
      smallest.push_back(static_cast<double>(*lo));
      largest.push_back(static_cast<double>(*hi));
    }
  }

  for (const auto& [n, a] : acc) {
    PerNMetrics m;
    m.replicates = a.count;
    m.power = static_cast<double>(a.successes) / static_cast<double>(a.count);
    m.mean_rejections = a.rejections / static_cast<double>(a.count);
    m.type1_rate = a.tests ? static_cast<double>(a.test_rejections) / static_cast<double>(a.tests) : 0.0;
    if (a.mse_count) m.mse = a.mse / static_cast<double>(a.mse_count);
    report.per_n[n] = m;
  }
  if (ok) {
    report.validation_accuracy = validation / static_cast<double>(ok);
    report.mean_rejections = rejections / static_cast<double>(ok);
  }
  if (!smallest.empty()) {
    report.imbalance.median_smallest_arm = median(smallest);
    report.imbalance.median_largest_arm = median(largest);
  }
  report.replicates = std::move(replicates);
  return report;
}

SimulationReport run_replicates(const TrialConfig& config, const StreamSpec& stream,
                                std::size_t n_replicates, std::uint64_t seed,
                                const ReplicateOptions& options) {
  if (n_replicates < 1) throw ConfigError("n_replicates must be at least 1");
  validate_trial_config(config, stream_covariates(stream));
  validate_stream(stream, config.protocol.arms);

  std::vector<ReplicateSummary> summaries(n_replicates);
  std::atomic<std::size_t> next{0}, finished{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t r = next++; r < n_replicates; r = next++) {
      auto& s = summaries[r];
      s.index = r;
      try {
        auto result = run_trial(config, stream, replicate_seed(seed, r));
        s.completed = result.completed;
        s.candidates_drawn = result.candidates_drawn;
        s.rejected = result.final_state.rejected();
        s.validation_accuracy = result.validation_accuracy;
        s.arm_counts = result.final_state.arm_counts();
        s.convergence_warnings = result.final_state.convergence_warnings();
        s.snapshots = std::move(result.snapshots);
      } catch (const std::exception& e) {
        s.failed = true;
        s.error = e.what();
      }
      const auto done = ++finished;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(done);
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, n_replicates));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return aggregate_replicates(std::move(summaries), config.success_rule, seed, config.protocol.arms);
}

}  // namespace infoadapt
