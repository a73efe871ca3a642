#pragma once

// Turning utilities into decisions. For a candidate x*, every arm k gets
//   rho_k = clamp((E_k(x*) - E_min^k) / (E_max^k - E_min^k), 0, 1),
// an arm is drawn with probability rho_k / sum_j rho_j, and the candidate is
// recruited onto the drawn arm with probability f(rho_k).

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "infoadapt/random.hpp"
#include "infoadapt/trial_state.hpp"
#include "infoadapt/utility.hpp"

namespace infoadapt {

enum class AllocationMode { InformationAdaptive, Randomised, Deterministic };

std::string to_string(AllocationMode mode);

struct IdentityRecruitment {};
struct StepThreshold {
  double p0 = 0.5;
};
struct TanhStringency {
  double beta0 = 1.0;
  double p0 = 0.0;
};
struct AlwaysRecruit {};
using RecruitmentRule = std::variant<IdentityRecruitment, StepThreshold, TanhStringency, AlwaysRecruit>;

std::string to_string(const RecruitmentRule& rule);

struct ProtocolConfig {
  AllocationMode allocation = AllocationMode::InformationAdaptive;
  RecruitmentRule recruitment = IdentityRecruitment{};
  int burn_in = 5;
  int arms = 1;
};

void validate_protocol(const ProtocolConfig& config);

/// True when decisions never look at utilities (randomised allocation with
/// certain recruitment, the RCT baseline).
bool needs_utility(const ProtocolConfig& config);

/// Clamped position of E between E_min and E_max; 1 when E_max == E_min.
double normalized_rho(double e, double e_min, double e_max);

/// rho_k / sum_j rho_j, or uniform when every rho is zero.
std::vector<double> arm_probabilities(std::span<const double> rhos);

double recruitment_probability(double rho_selected, const RecruitmentRule& rule);

struct Decision {
  int arm = 0;
  bool recruited = false;
  bool burn_in = false;
  std::vector<double> rho;        // empty when utilities were not needed
  std::vector<double> utilities;  // E_k(x*) per arm
  std::vector<double> arm_probs;
  double recruit_prob = 1.0;
};

/// Random draws consumed by one call to decide().
inline constexpr int kBurnInDraws = 1;
inline constexpr int kDecisionDraws = 2;

/// One allocation/recruitment decision. During burn-in the candidate is
/// recruited onto a uniformly drawn arm (one draw). Afterwards exactly two
/// uniforms are drawn: the arm, then recruitment. Fills the state's extrema
/// cache for arms whose extrema were missing. `evaluator` may be null only
/// when !needs_utility(config).
Decision decide(const Vector& candidate, TrialState& state, const UtilityEvaluator* evaluator,
                const ProtocolConfig& config, RandomStream& rng);

}  // namespace infoadapt
