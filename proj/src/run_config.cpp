#include "infoadapt/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "infoadapt/errors.hpp"

#ifndef INFOADAPT_DEFAULT_DATASET
#define INFOADAPT_DEFAULT_DATASET "data/wdbc.data"
#endif

namespace infoadapt {

namespace {

struct StudyName {
  Study study;
  const char* name;
};
constexpr StudyName kStudies[] = {
    {Study::CaseStudy, "case-study"},     {Study::Sim1Separable, "sim1-separable"},
    {Study::Sim1NonSeparable, "sim1-nonseparable"}, {Study::Sim2SelectiveAdaptive, "sim2"},
    {Study::Sim3AdaptiveOnly, "sim3"},    {Study::Sim2Null, "sim2-null"},
    {Study::Custom, "custom"},
};

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_int(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out))
    throw ConfigError("invalid number for " + key + ": '" + value + "'");
  return out;
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

RecruitmentRule parse_recruitment(const std::string& text) {
  const auto parts = split_colon(text);
  if (parts[0] == "identity" && parts.size() == 1) return IdentityRecruitment{};
  if (parts[0] == "always" && parts.size() == 1) return AlwaysRecruit{};
  if (parts[0] == "step" && parts.size() == 2) return StepThreshold{parse_real("recruitment", parts[1])};
  if (parts[0] == "tanh" && parts.size() == 3)
    return TanhStringency{parse_real("recruitment", parts[1]), parse_real("recruitment", parts[2])};
  throw ConfigError("invalid recruitment rule '" + text + "'");
}

AllocationMode parse_allocation(const std::string& text) {
  if (text == "adaptive") return AllocationMode::InformationAdaptive;
  if (text == "randomised") return AllocationMode::Randomised;
  if (text == "deterministic") return AllocationMode::Deterministic;
  throw ConfigError("invalid allocation '" + text + "'");
}

std::string covariate_text(const CovariateSelector& c) {
  if (const auto* i = std::get_if<int>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

bool is_rct(const RunConfig& c) { return c.method == "rct"; }

bool uses_dataset(Study s) { return s == Study::CaseStudy || s == Study::Custom; }

}  // namespace

std::string to_string(Study study) {
  for (const auto& s : kStudies)
    if (s.study == study) return s.name;
  return "unknown";
}

Study parse_study(const std::string& name) {
  for (const auto& s : kStudies)
    if (name == s.name) return s.study;
  throw ConfigError("unknown study '" + name + "'");
}

void apply_setting(RunConfig& c, std::string key, const std::string& value) {
  if (key.rfind("config.", 0) == 0) key.erase(0, 7);
  if (key == "study") c.study = parse_study(value);
  else if (key == "method") {
    if (value != "rct") parse_utility_kind(value);  // validates
    c.method = value;
  } else if (key == "n") c.n_total = parse_int<std::size_t>(key, value);
  else if (key == "replicates") c.n_replicates = parse_int<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "prior_variance") c.prior_variance = parse_real(key, value);
  else if (key == "burn_in") c.burn_in = parse_int<int>(key, value);
  else if (key == "recruitment") {
    parse_recruitment(value);
    c.recruitment = value;
  } else if (key == "allocation") {
    parse_allocation(value);
    c.allocation = value;
  } else if (key == "success_rule") c.success_rule = parse_success_rule(value);
  else if (key == "alpha") c.alpha = parse_real(key, value);
  else if (key == "validation_per_arm") c.validation_per_arm = parse_int<std::size_t>(key, value);
  else if (key == "dataset") c.dataset_path = value;
  else if (key == "covariate") {
    int index = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), index);
    if (ec == std::errc() && ptr == value.data() + value.size()) c.covariate = index;
    else c.covariate = value;
    resolve_feature(c.covariate);
  } else if (key == "label_positive" || key == "label_negative") {
    if (value.size() != 1) throw ConfigError(key + " must be a single letter");
    (key == "label_positive" ? c.labels.positive : c.labels.negative) = value[0];
  } else if (key == "quadrature_points") c.quadrature_points = parse_int<int>(key, value);
  else if (key == "search_starts") c.search_starts = parse_int<int>(key, value);
  else if (key == "search_evaluations") c.search_evaluations = parse_int<int>(key, value);
  else if (key == "threads") c.threads = parse_int<unsigned>(key, value);
  else if (key == "out") c.output_path = value;
  else throw ConfigError("unknown setting '" + key + "'");
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string line;
  std::size_t row = 0;
  const bool summary = path.filename() == "summary.txt";
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(row) + ": expected key=value");
    const auto key = line.substr(0, eq);
    // A fed-back summary also holds results; only its config.* keys apply.
    if (key.rfind("config.", 0) != 0 && (summary || key.find('.') != std::string::npos)) continue;
    apply_setting(config, key, line.substr(eq + 1));
  }
}

std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& c) {
  if (!c.seed) throw ConfigError("seed is required");
  const auto e = build_experiment(c);
  std::vector<std::pair<std::string, std::string>> out{
      {"study", to_string(c.study)},
      {"method", c.method},
      {"n", std::to_string(e.trial.n_total)},
      {"replicates", std::to_string(c.n_replicates)},
      {"seed", std::to_string(*c.seed)},
      {"prior_variance", real(e.trial.prior.variance)},
      {"burn_in", std::to_string(e.trial.protocol.burn_in)},
      {"recruitment", c.recruitment.value_or("")},
      {"allocation", c.allocation.value_or("")},
      {"success_rule", to_string(c.success_rule)},
      {"alpha", real(c.alpha)},
      {"validation_per_arm", std::to_string(c.validation_per_arm)},
      {"quadrature_points", std::to_string(c.quadrature_points)},
      {"search_starts", std::to_string(c.search_starts)},
      {"search_evaluations", std::to_string(c.search_evaluations)},
  };
  if (uses_dataset(c.study)) {
    out.emplace_back("dataset", c.dataset_path.empty() ? INFOADAPT_DEFAULT_DATASET : c.dataset_path.string());
    out.emplace_back("covariate", covariate_text(c.covariate));
    out.emplace_back("label_positive", std::string(1, c.labels.positive));
    out.emplace_back("label_negative", std::string(1, c.labels.negative));
  }
  // Unset overrides are omitted so the echo parses back to the same config.
  std::erase_if(out, [](const auto& kv) { return kv.second.empty(); });
  return out;
}

std::pair<DatasetReplayStream, SearchSpace> load_replay_stream(const RunConfig& c) {
  const auto path = c.dataset_path.empty() ? std::filesystem::path(INFOADAPT_DEFAULT_DATASET) : c.dataset_path;
  auto samples = ingest_dataset(path, c.covariate, c.labels);
  const auto scaling = fit_scaling(samples, ScalingMode::MinMaxToUnit);
  DatasetReplayStream stream{apply_scaling(scaling, std::move(samples)), 25};
  return {std::move(stream), SearchSpace{scaling.decile_lower, scaling.decile_upper}};
}

Experiment build_experiment(const RunConfig& c) {
  if (!c.seed) throw ConfigError("seed is required");
  if (c.n_replicates < 1) throw ConfigError("replicates must be at least 1");
  Experiment e;
  e.seed = *c.seed;
  e.n_replicates = c.n_replicates;
  auto& t = e.trial;
  t.seed = *c.seed;
  t.success_rule = c.success_rule;
  t.alpha = c.alpha;
  t.validation_per_arm = c.validation_per_arm;

  // Presets.
  const auto multi_arm = [](std::vector<Vector> w, std::vector<double> w0) {
    return UnitSquareMultiArmStream{std::move(w), std::move(w0)};
  };
  std::optional<SearchSpace> search;
  switch (c.study) {
    case Study::CaseStudy:
    case Study::Custom: {
      auto [stream, space] = load_replay_stream(c);
      e.stream = std::move(stream);
      search = space;
      t.n_total = 25;
      t.protocol.burn_in = 5;
      break;
    }
    case Study::Sim1Separable:
      e.stream = UniformLogisticStream{make_vector({32.0}), -8.0, make_vector({-1.0}), make_vector({1.0})};
      t.n_total = 50;
      t.protocol.burn_in = 5;
      t.prior.variance = 400.0;
      break;
    case Study::Sim1NonSeparable:
      e.stream = GaussianMixtureStream{};
      t.n_total = 50;
      t.protocol.burn_in = 5;
      break;
    case Study::Sim2SelectiveAdaptive:
    case Study::Sim3AdaptiveOnly:
      e.stream = multi_arm({make_vector({-3.0, 6.0}), make_vector({4.0, -8.0}), make_vector({5.0, 2.0})},
                           {1.5, -1.5, 0.0});
      t.protocol.arms = 3;
      t.n_total = 150;
      t.protocol.burn_in = 15;
      break;
    case Study::Sim2Null:
      e.stream = multi_arm(std::vector<Vector>(3, Vector::Zero(2)), {0.0, 0.0, 0.0});
      t.protocol.arms = 3;
      t.n_total = 150;
      t.protocol.burn_in = 15;
      break;
  }
  if (!search) search = population_deciles(e.stream);

  if (is_rct(c)) {
    t.protocol.allocation = AllocationMode::Randomised;
    t.protocol.recruitment = AlwaysRecruit{};
  } else {
    t.protocol.allocation = AllocationMode::InformationAdaptive;
    t.protocol.recruitment = c.study == Study::Sim3AdaptiveOnly ? RecruitmentRule{AlwaysRecruit{}}
                                                               : RecruitmentRule{IdentityRecruitment{}};
    auto spec = default_utility_spec(parse_utility_kind(c.method), *search);
    spec.quadrature_points_per_dim = c.quadrature_points;
    spec.search.quasi_random_starts = c.search_starts;
    spec.search.local.max_evaluations = c.search_evaluations;
    t.utility = std::move(spec);
  }

  // Overrides.
  if (c.n_total) t.n_total = *c.n_total;
  if (c.prior_variance) t.prior.variance = *c.prior_variance;
  if (c.burn_in) t.protocol.burn_in = *c.burn_in;
  if (c.recruitment) t.protocol.recruitment = parse_recruitment(*c.recruitment);
  if (c.allocation) t.protocol.allocation = parse_allocation(*c.allocation);
  if (needs_utility(t.protocol) && !t.utility)
    throw ConfigError("the chosen allocation/recruitment needs a utility method, not rct");

  validate_stream(e.stream, t.protocol.arms);
  validate_trial_config(t, stream_covariates(e.stream));
  return e;
}

}  // namespace infoadapt
