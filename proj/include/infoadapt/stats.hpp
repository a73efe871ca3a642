#pragma once

#include <span>
#include <string>
#include <vector>

#include "infoadapt/bayes_logistic.hpp"

namespace infoadapt {

struct WaldOutcome {
  double statistic = 0.0;  // z (univariate) or chi-squared (joint)
  int dof = 1;
  double p_value = 1.0;
  bool reject = false;
};

double normal_cdf(double z);
/// P(|Z| >= |z|).
double normal_two_sided_p(double z);
/// Survival function of the chi-squared distribution with `dof` degrees.
double chi_squared_sf(double x, int dof);

/// Wald test of H0: mean_S = 0 using the posterior covariance. A single
/// index gives the two-sided z test, otherwise the joint chi-squared test.
WaldOutcome wald_test(const GaussianPosterior& post, std::span<const int> components, double alpha = 0.05);

/// Chi-squared form mu_S^T (Sigma_SS)^-1 mu_S with dof |S|, for any |S|.
WaldOutcome wald_joint_test(const GaussianPosterior& post, std::span<const int> components,
                            double alpha = 0.05);

/// Tests on one arm: joint chi-squared test of every weight (intercept
/// excluded) and one z test per weight.
struct ArmTests {
  WaldOutcome joint;
  std::vector<WaldOutcome> per_parameter;
};

ArmTests weight_tests(const GaussianPosterior& post, double alpha = 0.05);

/// When a multi-arm replicate counts as a successful trial.
enum class SuccessRule { AllArmsJoint, AnyArmJoint, AllParameters };

std::string to_string(SuccessRule rule);
SuccessRule parse_success_rule(const std::string& name);

bool trial_success(std::span<const ArmTests> arms, SuccessRule rule);

/// Fraction of replicates whose outcome set satisfies `rule`.
double power_estimate(std::span<const std::vector<ArmTests>> replicates, SuccessRule rule);

/// Mean over arms and components of (mean - truth)^2.
double parameter_mse(std::span<const GaussianPosterior> posteriors, std::span<const Vector> truths);

struct BalanceTest {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool significant = false;  // after Bonferroni over n_tests
};

/// Pearson chi-squared against equal allocation; significant when
/// p < alpha / n_tests.
BalanceTest chi_squared_balance(std::span<const std::size_t> arm_counts, std::size_t n_tests,
                                double alpha = 0.05);

/// sup |F_n(x) - x| for samples on [0, 1].
double ks_uniform_distance(std::vector<double> samples);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Median with the mean-of-middle-pair convention for even sizes.
double median(std::vector<double> values);

}  // namespace infoadapt
