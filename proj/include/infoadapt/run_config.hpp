#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infoadapt/candidate_stream.hpp"
#include "infoadapt/dataset.hpp"
#include "infoadapt/trial_engine.hpp"

namespace infoadapt {

enum class Study {
  CaseStudy,
  Sim1Separable,
  Sim1NonSeparable,
  Sim2SelectiveAdaptive,
  Sim3AdaptiveOnly,
  Sim2Null,
  Custom,
};

std::string to_string(Study study);
Study parse_study(const std::string& name);

/// Everything needed to reproduce a run. Unset optionals take the study's
/// preset. `threads` and `output_path` do not affect results and are not
/// echoed.
struct RunConfig {
  Study study = Study::CaseStudy;
  std::string method = "rct";  // "rct" or a utility name
  std::optional<std::size_t> n_total;
  std::size_t n_replicates = 500;
  std::optional<std::uint64_t> seed;  // mandatory, never defaulted
  std::optional<double> prior_variance;
  std::optional<int> burn_in;
  std::optional<std::string> recruitment;  // identity | always | step:p0 | tanh:beta0:p0
  std::optional<std::string> allocation;   // adaptive | randomised | deterministic
  SuccessRule success_rule = SuccessRule::AllArmsJoint;
  double alpha = 0.05;
  std::size_t validation_per_arm = 25;
  std::filesystem::path dataset_path;  // case study and custom
  CovariateSelector covariate = 24;
  LabelMapping labels;
  int quadrature_points = 32;
  int search_starts = 10;
  int search_evaluations = 30;

  std::filesystem::path output_path;
  unsigned threads = 1;
};

/// Applies one key=value setting. Keys may carry a "config." prefix so an
/// echoed summary can be fed back. Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, std::string key, const std::string& value);

/// Reads key=value lines; blank lines and lines starting with '#' are
/// skipped, as are summary keys outside the "config." namespace.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// Canonical ordered settings that reproduce the run.
std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& config);

struct Experiment {
  TrialConfig trial;
  StreamSpec stream;
  std::size_t n_replicates = 0;
  std::uint64_t seed = 0;
};

/// Resolves presets and overrides into a validated experiment.
Experiment build_experiment(const RunConfig& config);

/// Loads, scales and wraps the dataset for replay. Also returns the
/// empirical decile search space of the scaled covariates.
std::pair<DatasetReplayStream, SearchSpace> load_replay_stream(const RunConfig& config);

}  // namespace infoadapt
