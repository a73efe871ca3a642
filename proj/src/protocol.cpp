#include "infoadapt/protocol.hpp"

#include <cmath>
#include <numeric>

#include "infoadapt/errors.hpp"

namespace infoadapt {

std::string to_string(AllocationMode mode) {
  switch (mode) {
    case AllocationMode::InformationAdaptive: return "information-adaptive";
    case AllocationMode::Randomised: return "randomised";
    case AllocationMode::Deterministic: return "deterministic";
  }
  return "unknown";
}

std::string to_string(const RecruitmentRule& rule) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IdentityRecruitment>) return "identity";
        else if constexpr (std::is_same_v<T, StepThreshold>) return "step(" + std::to_string(r.p0) + ")";
        else if constexpr (std::is_same_v<T, TanhStringency>)
          return "tanh(" + std::to_string(r.beta0) + "," + std::to_string(r.p0) + ")";
        else return "always";
      },
      rule);
}

void validate_protocol(const ProtocolConfig& config) {
  if (config.arms < 1) throw ConfigError("need at least one arm");
  if (config.burn_in < 0) throw ConfigError("burn-in must be non-negative");
  if (const auto* step = std::get_if<StepThreshold>(&config.recruitment))
    if (!(step->p0 >= 0.0 && step->p0 <= 1.0)) throw ConfigError("step threshold must lie in [0, 1]");
  if (const auto* t = std::get_if<TanhStringency>(&config.recruitment))
    if (!(t->beta0 > 0.0) || !std::isfinite(t->p0)) throw ConfigError("tanh stringency needs beta0 > 0");
}

bool needs_utility(const ProtocolConfig& config) {
  return !(config.allocation == AllocationMode::Randomised &&
           std::holds_alternative<AlwaysRecruit>(config.recruitment));
}

double normalized_rho(double e, double e_min, double e_max) {
  if (!std::isfinite(e) || !std::isfinite(e_min) || !std::isfinite(e_max))
    throw InputError("normalized_rho: non-finite input");
  if (e_max < e_min) throw InputError("normalized_rho: E_max below E_min");
  if (e_max == e_min) return 1.0;
  const double rho = (e - e_min) / (e_max - e_min);
  return std::clamp(rho, 0.0, 1.0);
}

std::vector<double> arm_probabilities(std::span<const double> rhos) {
  if (rhos.empty()) throw InputError("arm_probabilities: no arms");
  double total = 0.0;
  for (double r : rhos) {
    if (!std::isfinite(r) || r < 0.0) throw InputError("arm_probabilities: rho must be finite and non-negative");
    total += r;
  }
  std::vector<double> probs(rhos.size());
  if (total == 0.0) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(rhos.size()));
    return probs;
  }
  for (std::size_t k = 0; k < rhos.size(); ++k) probs[k] = rhos[k] / total;
  return probs;
}

double recruitment_probability(double rho_selected, const RecruitmentRule& rule) {
  return std::visit(
      [rho_selected](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, IdentityRecruitment>) return rho_selected;
        else if constexpr (std::is_same_v<T, StepThreshold>) return rho_selected > r.p0 ? 1.0 : 0.0;
        else if constexpr (std::is_same_v<T, TanhStringency>)
          return 0.5 * (1.0 + std::tanh(rho_selected / r.beta0 + r.p0));
        else return 1.0;
      },
      rule);
}

namespace {

int draw_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    cumulative += probs[k];
    if (u < cumulative) return static_cast<int>(k);
  }
  // Rounding can leave the cumulative sum a hair below 1.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return static_cast<int>(k);
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

Decision decide(const Vector& candidate, TrialState& state, const UtilityEvaluator* evaluator,
                const ProtocolConfig& config, RandomStream& rng) {
  const int arms = state.arms();
  if (arms != config.arms) throw ConfigError("decide: protocol arm count does not match the trial state");
  if (candidate.size() != state.n_covariates()) throw InputError("decide: candidate dimension mismatch");

  Decision decision;
  if (state.recruited() < static_cast<std::size_t>(config.burn_in)) {
    decision.burn_in = true;
    decision.recruited = true;
    decision.arm = static_cast<int>(rng.below(static_cast<std::uint64_t>(arms)));
    decision.arm_probs.assign(arms, 1.0 / arms);
    return decision;
  }

  if (needs_utility(config)) {
    if (!evaluator) throw ConfigError("decide: this protocol needs a utility evaluator");
    decision.rho.resize(arms);
    decision.utilities.resize(arms);
    for (int k = 0; k < arms; ++k) {
      const auto& post = state.posterior(k);
      const auto& data = state.data(k);
      if (!state.cached_extrema(k)) state.cache_extrema(k, evaluator->extrema(post, data));
      const auto& ex = *state.cached_extrema(k);
      decision.utilities[k] = evaluator->value(post, data, candidate);
      decision.rho[k] = normalized_rho(decision.utilities[k], ex.e_min, ex.e_max);
    }
  }

  const double u_arm = rng.uniform();
  const double u_recruit = rng.uniform();

  switch (config.allocation) {
    case AllocationMode::Randomised:
      decision.arm_probs.assign(arms, 1.0 / arms);
      break;
    case AllocationMode::InformationAdaptive:
      decision.arm_probs = arm_probabilities(decision.rho);
      break;
    case AllocationMode::Deterministic: {
      const auto best = std::max_element(decision.rho.begin(), decision.rho.end());
      decision.arm_probs.assign(arms, 0.0);
      decision.arm_probs[static_cast<std::size_t>(best - decision.rho.begin())] = 1.0;
      break;
    }
  }
  decision.arm = draw_index(decision.arm_probs, u_arm);
  const double rho_selected = decision.rho.empty() ? 1.0 : decision.rho[decision.arm];
  decision.recruit_prob = recruitment_probability(rho_selected, config.recruitment);
  decision.recruited = u_recruit < decision.recruit_prob;
  return decision;
}

}  // namespace infoadapt
