#include "infoadapt/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "infoadapt/errors.hpp"

namespace infoadapt {

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

double normal_two_sided_p(double z) { return boost::math::erfc(std::abs(z) / std::sqrt(2.0)); }

double chi_squared_sf(double x, int dof) {
  if (dof < 1) throw InputError("chi-squared needs at least one degree of freedom");
  if (!(x > 0)) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

namespace {

void check_components(const GaussianPosterior& post, std::span<const int> components) {
  if (components.empty()) throw InputError("wald_test: no components");
  for (int c : components)
    if (c < 0 || c >= post.n_params()) throw InputError("wald_test: component index out of range");
}

}  // namespace

WaldOutcome wald_joint_test(const GaussianPosterior& post, std::span<const int> components, double alpha) {
  check_components(post, components);
  const int s = static_cast<int>(components.size());
  Vector m(s);
  Matrix sub(s, s);
  for (int a = 0; a < s; ++a) {
    m(a) = post.mean()(components[a]);
    for (int b = 0; b < s; ++b) sub(a, b) = post.covariance()(components[a], components[b]);
  }
  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) throw NumericError("wald_test: singular covariance block");
  WaldOutcome out;
  out.dof = s;
  out.statistic = m.dot(llt.solve(m));
  out.p_value = chi_squared_sf(out.statistic, s);
  out.reject = out.p_value < alpha;
  return out;
}

WaldOutcome wald_test(const GaussianPosterior& post, std::span<const int> components, double alpha) {
  check_components(post, components);
  if (components.size() > 1) return wald_joint_test(post, components, alpha);
  const int j = components[0];
  const double var = post.covariance()(j, j);
  if (!(var > 0)) throw NumericError("wald_test: non-positive variance");
  WaldOutcome out;
  out.statistic = post.mean()(j) / std::sqrt(var);
  out.p_value = normal_two_sided_p(out.statistic);
  out.reject = out.p_value < alpha;
  return out;
}

ArmTests weight_tests(const GaussianPosterior& post, double alpha) {
  ArmTests t;
  std::vector<int> weights;
  for (int j = 1; j < post.n_params(); ++j) weights.push_back(j);
  if (weights.empty()) throw InputError("weight_tests: model has no weights");
  t.joint = wald_joint_test(post, weights, alpha);
  for (int j : weights) {
    const int idx[1] = {j};
    t.per_parameter.push_back(wald_test(post, idx, alpha));
  }
  return t;
}

std::string to_string(SuccessRule rule) {
  switch (rule) {
    case SuccessRule::AllArmsJoint: return "all-arms-joint";
    case SuccessRule::AnyArmJoint: return "any-arm-joint";
    case SuccessRule::AllParameters: return "all-parameters";
  }
  return "unknown";
}

SuccessRule parse_success_rule(const std::string& name) {
  if (name == "all-arms-joint") return SuccessRule::AllArmsJoint;
  if (name == "any-arm-joint") return SuccessRule::AnyArmJoint;
  if (name == "all-parameters") return SuccessRule::AllParameters;
  throw ConfigError("unknown success rule '" + name + "'");
}

bool trial_success(std::span<const ArmTests> arms, SuccessRule rule) {
  if (arms.empty()) throw InputError("trial_success: no arms");
  switch (rule) {
    case SuccessRule::AllArmsJoint:
      return std::all_of(arms.begin(), arms.end(), [](const ArmTests& a) { return a.joint.reject; });
    case SuccessRule::AnyArmJoint:
      return std::any_of(arms.begin(), arms.end(), [](const ArmTests& a) { return a.joint.reject; });
    case SuccessRule::AllParameters:
      return std::all_of(arms.begin(), arms.end(), [](const ArmTests& a) {
        return std::all_of(a.per_parameter.begin(), a.per_parameter.end(),
                           [](const WaldOutcome& w) { return w.reject; });
      });
  }
  return false;
}

double power_estimate(std::span<const std::vector<ArmTests>> replicates, SuccessRule rule) {
  if (replicates.empty()) throw InputError("power_estimate: no replicates");
  std::size_t hits = 0;
  for (const auto& r : replicates) hits += trial_success(r, rule) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(replicates.size());
}

double parameter_mse(std::span<const GaussianPosterior> posteriors, std::span<const Vector> truths) {
  if (posteriors.size() != truths.size() || posteriors.empty())
    throw InputError("parameter_mse: arm count mismatch");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    if (posteriors[k].mean().size() != truths[k].size()) throw InputError("parameter_mse: dimension mismatch");
    total += (posteriors[k].mean() - truths[k]).squaredNorm();
    count += static_cast<std::size_t>(truths[k].size());
  }
  return total / static_cast<double>(count);
}

BalanceTest chi_squared_balance(std::span<const std::size_t> arm_counts, std::size_t n_tests, double alpha) {
  if (arm_counts.size() < 2) throw InputError("chi_squared_balance: need at least two arms");
  if (n_tests < 1) throw InputError("chi_squared_balance: n_tests must be positive");
  double total = 0.0;
  for (auto c : arm_counts) total += static_cast<double>(c);
  if (total == 0.0) throw InputError("chi_squared_balance: no patients");
  const double expected = total / static_cast<double>(arm_counts.size());
  BalanceTest out;
  for (auto c : arm_counts) {
    const double diff = static_cast<double>(c) - expected;
    out.statistic += diff * diff / expected;
  }
  out.dof = static_cast<int>(arm_counts.size()) - 1;
  out.p_value = chi_squared_sf(out.statistic, out.dof);
  out.significant = out.p_value < alpha / static_cast<double>(n_tests);
  return out;
}

double ks_uniform_distance(std::vector<double> samples) {
  if (samples.empty()) throw InputError("ks_uniform_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (i + 1) / n - x, x - i / n});
  }
  return d;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InputError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  KsResult out;
  out.statistic = d;
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
  if (lambda < 1e-3) {
    out.p_value = 1.0;
  } else {
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
      const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
      sum += term;
      if (std::abs(term) < 1e-14) break;
      sign = -sign;
    }
    out.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace infoadapt
