#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "infoadapt/errors.hpp"
#include "infoadapt/oracles.hpp"
#include "infoadapt/report.hpp"
#include "infoadapt/run_config.hpp"

namespace fs = std::filesystem;
using namespace infoadapt;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

struct SimulateArgs {
  std::string study, method, config_file, dataset, out = "report";
  std::optional<std::size_t> n, replicates;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;
};

int simulate(const SimulateArgs& a) {
  RunConfig config;
  if (!a.study.empty()) apply_setting(config, "study", a.study);
  if (!a.method.empty()) apply_setting(config, "method", a.method);
  if (a.n) config.n_total = *a.n;
  if (a.replicates) config.n_replicates = *a.replicates;
  if (a.seed) config.seed = *a.seed;
  if (!a.dataset.empty()) config.dataset_path = a.dataset;
  config.output_path = a.out;
  config.threads = a.threads.value_or(std::max(1u, std::thread::hardware_concurrency()));
  // The config file overrides flags.
  if (!a.config_file.empty()) load_config_file(config, a.config_file);
  if (!config.seed) throw ConfigError("--seed is required (no default seed)");

  const auto experiment = build_experiment(config);
  ReplicateOptions options;
  options.threads = config.threads;
  if (!a.quiet)
    options.progress = [total = experiment.n_replicates](std::size_t done) {
      if (done % 10 == 0 || done == total) std::cerr << "\rreplicates " << done << "/" << total << std::flush;
    };
  auto report = run_replicates(experiment.trial, experiment.stream, experiment.n_replicates, experiment.seed, options);
  if (!a.quiet) std::cerr << "\n";
  report.config_echo = echo_config(config);

  std::vector<fs::path> inputs;
  if (std::holds_alternative<DatasetReplayStream>(experiment.stream))
    for (const auto& [k, v] : report.config_echo)
      if (k == "dataset") inputs.emplace_back(v);
  emit_report(report, config.output_path, inputs);

  const auto& final = report.at(report.final_n());
  std::cout << "study=" << to_string(config.study) << " method=" << config.method << " N=" << report.final_n()
            << " power=" << final.power << " rejections=" << final.mean_rejections
            << " validation=" << report.validation_accuracy << " failed=" << report.n_failed
            << " out=" << config.output_path.string() << "\n";
  return 0;
}

struct InspectArgs {
  std::optional<std::uint64_t> seed;
  std::string dataset, out;
  int points = 201;
};

int inspect_utility(const InspectArgs& a) {
  if (!a.seed) throw ConfigError("--seed is required (no default seed)");
  if (a.points < 2) throw ConfigError("--points must be at least 2");
  RunConfig config;
  config.seed = *a.seed;
  if (!a.dataset.empty()) config.dataset_path = a.dataset;
  auto [stream, space] = load_replay_stream(config);

  // Five burn-in patients from the first replicate's arrival order.
  CandidateSource source(StreamSpec{stream}, 1, replicate_seed(*a.seed, 0));
  std::vector<LabeledSample> data;
  for (int i = 0; i < 5; ++i) {
    const auto c = source.next();
    data.push_back(LabeledSample{c->covariates, c->arm_labels[0]});
  }
  const PriorSpec prior{5.0};
  const auto post = fit_variational(data, 1, prior);
  const double boundary = -post.mean()(0) / post.mean()(1);

  if (!a.out.empty()) fs::create_directories(a.out);
  std::cout << "burn_in=5 decision_boundary=" << format_real(boundary) << " search_lower=" << format_real(space.lower(0))
            << " search_upper=" << format_real(space.upper(0)) << "\n";
  for (auto kind : {UtilityKind::UncertaintySampling, UtilityKind::PosteriorEntropy,
                    UtilityKind::GeneralisationError, UtilityKind::VarianceReduction}) {
    const UtilityEvaluator evaluator(default_utility_spec(kind, space), prior, 1);
    std::ostringstream table;
    table << "x," << to_string(kind) << "\n";
    for (int i = 0; i < a.points; ++i) {
      const double x = -1.0 + 2.0 * i / (a.points - 1);
      table << format_real(x) << "," << format_real(evaluator.value(post, data, make_vector({x}))) << "\n";
    }
    if (a.out.empty()) {
      std::cout << table.str() << "\n";
    } else {
      const auto path = fs::path(a.out) / ("utility_" + to_string(kind) + ".csv");
      std::ofstream file(path);
      if (!(file << table.str())) throw InputError("cannot write " + path.string());
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  return 0;
}

int validate_oracles(std::uint64_t seed, bool quick) {
  bool all = true;
  for (const auto& c : oracle::run_oracle_suite(seed, !quick)) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " error=" << format_real(c.error)
              << " tolerance=" << format_real(c.tolerance) << "\n";
    all = all && c.pass;
  }
  return all ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-adaptive clinical trial simulator"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run replicates of a study and write a report");
  simulate_cmd->add_option("--study", sim.study,
                           "case-study | sim1-separable | sim1-nonseparable | sim2 | sim3 | sim2-null | custom");
  simulate_cmd->add_option("--method", sim.method, "rct | uncertainty | entropy | generalisation | variance-reduction");
  simulate_cmd->add_option("--n", sim.n, "Recruitment target");
  simulate_cmd->add_option("--replicates", sim.replicates, "Number of simulated trials");
  simulate_cmd->add_option("--seed", sim.seed, "Master seed (required)");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate_cmd->add_option("--config", sim.config_file, "key=value file; overrides flags")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--dataset", sim.dataset, "WDBC-layout data file")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--threads", sim.threads, "Concurrent replicates (results do not depend on it)");
  simulate_cmd->add_flag("--quiet", sim.quiet, "No progress output");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect-utility", "Utility curves after a five-patient burn-in");
  inspect_cmd->add_option("--seed", inspect.seed, "Seed choosing the burn-in patients (required)");
  inspect_cmd->add_option("--dataset", inspect.dataset, "WDBC-layout data file")->check(CLI::ExistingFile);
  inspect_cmd->add_option("--out", inspect.out, "Directory for the four tables (stdout if omitted)");
  inspect_cmd->add_option("--points", inspect.points, "Grid points on [-1, 1]")->capture_default_str();

  std::uint64_t oracle_seed = 1;
  bool quick = false;
  auto* oracle_cmd = app.add_subcommand("validate-oracles", "Compare against independent reference computations");
  oracle_cmd->add_option("--seed", oracle_seed, "Seed for the Monte Carlo oracles")->capture_default_str();
  oracle_cmd->add_flag("--quick", quick, "Smaller Monte Carlo samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate_cmd) return simulate(sim);
    if (*inspect_cmd) return inspect_utility(inspect);
    if (*oracle_cmd) return validate_oracles(oracle_seed, quick);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
