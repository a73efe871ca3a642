#include <doctest.h>

#include <cmath>
#include <vector>

#include "infoadapt/errors.hpp"
#include "infoadapt/oracles.hpp"
#include "infoadapt/protocol.hpp"
#include "infoadapt/stats.hpp"

using namespace infoadapt;

namespace {

const SearchSpace kSpace{make_vector({-0.8}), make_vector({0.8})};

UtilityEvaluator evaluator(UtilityKind kind) {
  return UtilityEvaluator(default_utility_spec(kind, kSpace), PriorSpec{5.0}, 1);
}

TrialState state_with(int arms, const std::vector<std::pair<double, int>>& points) {
  TrialState state(arms, 1, PriorSpec{5.0});
  for (std::size_t i = 0; i < points.size(); ++i)
    state.absorb(static_cast<int>(i) % arms, {make_vector({points[i].first}), points[i].second});
  return state;
}

}  // namespace

TEST_CASE("rho arithmetic") {
  CHECK(normalized_rho(4.5, 4.0, 5.0) == doctest::Approx(0.5));
  CHECK(oracle::legacy_rho(4.5, 5.0) == doctest::Approx(0.9));
  CHECK(normalized_rho(5.0, 4.0, 5.0) == 1.0);
  CHECK(normalized_rho(4.0, 4.0, 5.0) == 0.0);
  // Values outside the searched range clamp.
  CHECK(normalized_rho(5.3, 4.0, 5.0) == 1.0);
  CHECK(normalized_rho(3.2, 4.0, 5.0) == 0.0);
  // Flat utility: every candidate is as good as the best.
  CHECK(normalized_rho(2.0, 2.0, 2.0) == 1.0);
  CHECK_THROWS_AS(normalized_rho(1.0, 5.0, 4.0), InputError);
  CHECK_THROWS_AS(normalized_rho(NAN, 4.0, 5.0), InputError);
}

TEST_CASE("rho is invariant to affine rescaling of the utility") {
  for (double e : {-1.0, 0.1, 0.37, 0.9, 2.0})
    for (double a : {0.01, 3.0, 250.0})
      for (double b : {-7.0, 0.0, 11.0})
        CHECK(normalized_rho(a * e + b, a * 0.0 + b, a * 1.0 + b) ==
              doctest::Approx(normalized_rho(e, 0.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("arm probabilities") {
  const std::vector<double> rho{0.2, 0.6, 0.2};
  const auto p = arm_probabilities(rho);
  CHECK(p[0] == doctest::Approx(0.2));
  CHECK(p[1] == doctest::Approx(0.6));
  CHECK(p[2] == doctest::Approx(0.2));
  const auto flat = arm_probabilities(std::vector<double>{0.0, 0.0, 0.0, 0.0});
  for (double v : flat) CHECK(v == 0.25);
  const auto one = arm_probabilities(std::vector<double>{0.0, 0.3});
  CHECK(one[0] == 0.0);
  CHECK(one[1] == 1.0);
  CHECK_THROWS_AS(arm_probabilities(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(arm_probabilities(std::vector<double>{-0.1, 0.5}), InputError);
}

TEST_CASE("recruitment rules") {
  CHECK(recruitment_probability(0.68, IdentityRecruitment{}) == 0.68);
  CHECK(recruitment_probability(0.68, StepThreshold{0.5}) == 1.0);
  CHECK(recruitment_probability(0.3, StepThreshold{0.5}) == 0.0);
  CHECK(recruitment_probability(0.0, AlwaysRecruit{}) == 1.0);
  const TanhStringency t{0.5, -1.0};
  CHECK(recruitment_probability(0.5, t) == doctest::Approx(0.5));
  double last = -1.0;
  for (double r = 0.0; r <= 1.0; r += 0.05) {
    const double f = recruitment_probability(r, t);
    CHECK(f > last);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    last = f;
  }
}

TEST_CASE("protocol validation") {
  ProtocolConfig c;
  c.arms = 0;
  CHECK_THROWS_AS(validate_protocol(c), ConfigError);
  c = {};
  c.burn_in = -1;
  CHECK_THROWS_AS(validate_protocol(c), ConfigError);
  c = {};
  c.recruitment = StepThreshold{1.5};
  CHECK_THROWS_AS(validate_protocol(c), ConfigError);
  c = {};
  c.recruitment = TanhStringency{0.0, 0.0};
  CHECK_THROWS_AS(validate_protocol(c), ConfigError);
  c = {};
  c.allocation = AllocationMode::Randomised;
  c.recruitment = AlwaysRecruit{};
  CHECK_FALSE(needs_utility(c));
  c.recruitment = IdentityRecruitment{};
  CHECK(needs_utility(c));
}

TEST_CASE("burn-in recruits every candidate on a uniform arm with one draw") {
  ProtocolConfig config;
  config.arms = 3;
  config.burn_in = 4;
  TrialState state(3, 1, PriorSpec{5.0});
  RandomStream rng(1);
  const auto ev = evaluator(UtilityKind::PosteriorEntropy);
  for (int i = 0; i < 4; ++i) {
    const auto before = rng.draws();
    const auto d = decide(make_vector({0.1 * i}), state, &ev, config, rng);
    CHECK(rng.draws() - before == kBurnInDraws);
    CHECK(d.burn_in);
    CHECK(d.recruited);
    CHECK(d.rho.empty());
    state.absorb(d.arm, {make_vector({0.1 * i}), 1});
  }
  const auto before = rng.draws();
  const auto d = decide(make_vector({0.3}), state, &ev, config, rng);
  CHECK_FALSE(d.burn_in);
  CHECK(rng.draws() - before == kDecisionDraws);
  CHECK(d.rho.size() == 3);
}

TEST_CASE("randomised allocation with certain recruitment is the uniform RCT") {
  ProtocolConfig config;
  config.arms = 3;
  config.burn_in = 0;
  config.allocation = AllocationMode::Randomised;
  config.recruitment = AlwaysRecruit{};
  TrialState state(3, 1, PriorSpec{5.0});
  RandomStream rng(77);
  std::vector<std::size_t> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto before = rng.draws();
    const auto d = decide(make_vector({0.0}), state, nullptr, config, rng);
    REQUIRE(d.recruited);
    CHECK(rng.draws() - before == kDecisionDraws);
    ++counts[d.arm];
  }
  const auto balance = chi_squared_balance(counts, 1);
  CHECK(balance.p_value > 0.001);
  for (auto c : counts) CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("information-adaptive decisions use rho for the arm and the recruitment") {
  ProtocolConfig config;
  config.arms = 2;
  config.burn_in = 0;
  auto state = state_with(2, {{-0.6, -1}, {0.5, 1}, {0.2, 1}, {-0.3, -1}, {0.7, 1}});
  RandomStream rng(3);
  const auto ev = evaluator(UtilityKind::PosteriorEntropy);
  const auto d = decide(make_vector({0.4}), state, &ev, config, rng);
  REQUIRE(d.rho.size() == 2);
  const auto expected = arm_probabilities(d.rho);
  CHECK(d.arm_probs == expected);
  CHECK(d.recruit_prob == d.rho[d.arm]);
  for (int k = 0; k < 2; ++k) {
    const auto& ex = *state.cached_extrema(k);
    CHECK(d.rho[k] == normalized_rho(d.utilities[k], ex.e_min, ex.e_max));
  }
  // Absorbing on arm 0 drops only that arm's cached extrema.
  state.absorb(0, {make_vector({0.4}), 1});
  CHECK_FALSE(state.cached_extrema(0).has_value());
  CHECK(state.cached_extrema(1).has_value());
}

TEST_CASE("deterministic allocation takes the arg max, lowest index on ties") {
  ProtocolConfig config;
  config.arms = 3;
  config.burn_in = 0;
  config.allocation = AllocationMode::Deterministic;
  config.recruitment = AlwaysRecruit{};
  const auto ev = evaluator(UtilityKind::UncertaintySampling);
  RandomStream rng(9);

  TrialState tied(3, 1, PriorSpec{5.0});
  for (int i = 0; i < 20; ++i) CHECK(decide(make_vector({0.5}), tied, &ev, config, rng).arm == 0);

  // Arm 2 is the least certain at x = 0.6.
  TrialState state(3, 1, PriorSpec{5.0});
  state.absorb(0, {make_vector({0.6}), 1});
  state.absorb(0, {make_vector({0.5}), 1});
  state.absorb(1, {make_vector({0.6}), -1});
  state.absorb(1, {make_vector({0.7}), -1});
  state.absorb(2, {make_vector({0.55}), 1});
  state.absorb(2, {make_vector({0.65}), -1});
  const auto d = decide(make_vector({0.6}), state, &ev, config, rng);
  CHECK(d.arm == 2);
  CHECK(d.arm_probs[2] == 1.0);
}

TEST_CASE("decide rejects mismatched inputs") {
  ProtocolConfig config;
  config.arms = 2;
  config.burn_in = 0;
  TrialState state(3, 1, PriorSpec{5.0});
  RandomStream rng(1);
  const auto ev = evaluator(UtilityKind::PosteriorEntropy);
  CHECK_THROWS_AS(decide(make_vector({0.0}), state, &ev, config, rng), ConfigError);
  config.arms = 3;
  CHECK_THROWS_AS(decide(make_vector({0.0, 1.0}), state, &ev, config, rng), InputError);
  CHECK_THROWS_AS(decide(make_vector({0.0}), state, nullptr, config, rng), ConfigError);
}
