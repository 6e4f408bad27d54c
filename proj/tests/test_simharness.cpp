#include <cmath>

#include <gtest/gtest.h>

#include "fcsd/json.hpp"
#include "fcsd/simharness.hpp"

using namespace fcsd;

namespace {

SimConfig arl_config(double alpha, std::uint64_t trials, std::uint64_t censor) {
  SimConfig s;
  s.model.pre = Bernoulli{0.5};
  s.model.post = Bernoulli{0.5};
  s.model.seed = 2025;
  s.detector.cs.alpha = alpha;
  s.trials = trials;
  s.censor = censor;
  return s;
}

SimConfig delay_config(double post, std::uint64_t trials) {
  SimConfig s;
  s.model.pre = Bernoulli{0.2};
  s.model.post = Bernoulli{post};
  s.model.change_at = 100;
  s.model.seed = 31;
  s.detector.cs.alpha = 0.05;
  s.detector.mode = Partitioned{{0.0, 0.3}};
  s.trials = trials;
  return s;
}

}  // namespace

TEST(DelayBound, BettingEnvelopeScan) {
  CsConfig cs;
  const auto b = theoretical_delay_bound(cs, 0.5, std::nullopt);
  EXPECT_EQ(b.u, 602u);
  EXPECT_NEAR(b.bound, 1901.0526315789475, 1e-9);
  EXPECT_GE(width_envelope(cs, 601), 0.5);
  EXPECT_LT(width_envelope(cs, 602), 0.5);
}

TEST(DelayBound, GapAboveOneGivesUnitDelay) {
  EXPECT_EQ(theoretical_delay_bound(CsConfig{}, 1.5, std::nullopt).u, 1u);
}

TEST(DelayBound, ChangepointTooEarly) {
  EXPECT_THROW(theoretical_delay_bound(CsConfig{}, 0.5, 10), ConfigError);
  EXPECT_THROW(theoretical_delay_bound(CsConfig{}, 0.0, std::nullopt), DomainError);
  const auto late = theoretical_delay_bound(CsConfig{}, 0.6, 100000);
  EXPECT_LT(width_envelope(CsConfig{}, 100000) + width_envelope(CsConfig{}, late.u), 0.6);
  EXPECT_GE(width_envelope(CsConfig{}, 100000) + width_envelope(CsConfig{}, late.u - 1), 0.6);
}

TEST(DelayBound, HoeffdingFloor) {
  CsConfig h;
  h.family = CsFamily::Hoeffding;
  EXPECT_THROW(theoretical_delay_bound(h, 0.1, std::nullopt), ConfigError);
  const auto b = theoretical_delay_bound(h, 0.5, std::nullopt);
  EXPECT_LT(width_envelope(h, b.u), 0.5);
}

TEST(KConstants, SingletonSetReducesToBernoulliKl) {
  DataGenModel m;
  m.pre = Bernoulli{0.2};
  m.post = Bernoulli{0.8};
  const auto k = k_constants(m, ParamInterval{0.2, 0.2}, 0.6);
  ASSERT_TRUE(k.k2);
  EXPECT_NEAR(*k.k2, 0.8317766166719343, 1e-6);
  EXPECT_FALSE(k.approximate);
}

TEST(KConstants, PinskerLowerBounds) {
  for (double post : {0.5, 0.65, 0.8}) {
    DataGenModel m;
    m.pre = Bernoulli{0.2};
    m.post = Bernoulli{post};
    const double delta = post - 0.2;
    const auto k = k_constants(m, ParamInterval{0.0, 0.3}, delta);
    EXPECT_GE(k.k1, 2.0 * (delta / 2.0) * (delta / 2.0));
    EXPECT_GE(*k.k2, 2.0 * (post - 0.3) * (post - 0.3));
  }
}

// Closed-form values from tests/oracles/closed_forms.py: KL(Bern(post) || Bern(0.3)).
TEST(KConstants, K2AgainstUpperEndpoint) {
  const double expected[] = {0.08717669357238891, 0.2599719141557824, 0.5341108087103075};
  const double posts[] = {0.5, 0.65, 0.8};
  for (int i = 0; i < 3; ++i) {
    DataGenModel m;
    m.pre = Bernoulli{0.2};
    m.post = Bernoulli{posts[i]};
    EXPECT_NEAR(*k_constants(m, ParamInterval{0.0, 0.3}, posts[i] - 0.2).k2, expected[i], 1e-6);
  }
}

TEST(KConstants, PostMeanInsideSetGivesZero) {
  DataGenModel m;
  m.pre = Bernoulli{0.2};
  m.post = Bernoulli{0.25};
  // 0.25 is not a grid point; the residual is grid error.
  EXPECT_NEAR(*k_constants(m, ParamInterval{0.0, 0.3}, 0.05).k2, 0.0, 1e-5);
}

TEST(KConstants, BetaFlaggedApproximate) {
  DataGenModel m;
  m.pre = Beta{2, 8};
  m.post = Beta{8, 2};
  const auto k = k_constants(m, ParamInterval{0.0, 0.3}, 0.6);
  EXPECT_TRUE(k.approximate);
  EXPECT_GT(*k.k2, 2.0 * 0.5 * 0.5);
}

TEST(EstimateArl, LowerBoundAtAlphaPointTwo) {
  const auto r = estimate_arl(arl_config(0.2, 500, 100));
  EXPECT_GE(r.arl_censored_mean, 5.0);
  EXPECT_EQ(r.domination_violations, 0u);
  EXPECT_EQ(r.monotonicity_violations, 0u);
  EXPECT_TRUE(r.domination_checked);
  EXPECT_TRUE(std::isnan(r.delay_mean_conditional));
}

TEST(EstimateArl, HoeffdingAtAlphaHalf) {
  auto cfg = arl_config(0.5, 200, 40);
  cfg.detector.cs.family = CsFamily::Hoeffding;
  EXPECT_GE(estimate_arl(cfg).arl_censored_mean, 2.0);
}

TEST(EstimateArl, SingleTrialCensorOne) {
  auto cfg = arl_config(0.2, 1, 1);
  cfg.keep_trials = true;
  const auto r = estimate_arl(cfg);
  EXPECT_EQ(r.trials, 1u);
  EXPECT_EQ(r.arl_censored_mean, 1.0);
  EXPECT_EQ(r.arl_censored_fraction, 1.0);
  ASSERT_EQ(r.per_trial.size(), 1u);
  EXPECT_FALSE(r.per_trial[0].tau);
}

TEST(EstimateArl, RejectsChangepoint) {
  auto cfg = arl_config(0.2, 1, 1);
  cfg.model.change_at = 5;
  EXPECT_THROW(estimate_arl(cfg), ConfigError);
  cfg.model.change_at.reset();
  cfg.trials = 0;
  EXPECT_THROW(estimate_arl(cfg), ConfigError);
}

TEST(EstimateArl, DefaultCensor) {
  auto cfg = arl_config(0.3, 1, 1);
  cfg.censor.reset();
  EXPECT_EQ(resolved_censor(cfg), 80u);
  cfg.model.change_at = 100;
  EXPECT_EQ(resolved_censor(cfg), 1000u);
  cfg.model.change_at = 2;
  EXPECT_EQ(resolved_censor(cfg), 200u);
}

TEST(EstimateDelay, PartitionedBelowBound) {
  const auto r = estimate_delay(delay_config(0.8, 60));
  ASSERT_TRUE(r.theory);
  EXPECT_EQ(r.theory->u, std::optional<std::uint64_t>(602));
  EXPECT_LE(r.delay_mean_unconditional, *r.theory->delay_bound);
  EXPECT_GE(r.good_event_rate, 0.95 - 3.0 * std::sqrt(0.05 / 60));
  EXPECT_EQ(r.domination_violations, 0u);
  EXPECT_FALSE(r.degenerate_delta);
}

TEST(EstimateDelay, DegenerateDelta) {
  SimConfig s;
  s.model.pre = Constant{0.5};
  s.model.post = Constant{0.5};
  s.model.change_at = 10;
  s.trials = 3;
  s.censor = 200;
  const auto r = estimate_delay(s);
  EXPECT_TRUE(r.degenerate_delta);
  EXPECT_FALSE(r.theory);
  EXPECT_EQ(r.detection_rate, 0.0);
  EXPECT_DOUBLE_EQ(r.delay_mean_unconditional, 190.0);
  EXPECT_EQ(to_json(r)["theory"], nullptr);
}

TEST(EstimateDelay, NonPartitionedTooEarlyIsNoted) {
  SimConfig s = delay_config(0.8, 5);
  s.detector.mode = NonPartitioned{};
  const auto r = estimate_delay(s);
  ASSERT_TRUE(r.theory);
  EXPECT_FALSE(r.theory->u);
  EXPECT_NE(r.theory->note.find("too early"), std::string::npos);
}

TEST(Simulate, ReproducibleAcrossParallelism) {
  auto cfg = delay_config(0.65, 24);
  cfg.keep_trials = true;
  cfg.parallelism = 1;
  const auto a = simulate(cfg);
  cfg.parallelism = 4;
  const auto b = simulate(cfg);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  ASSERT_EQ(a.per_trial.size(), b.per_trial.size());
  for (std::size_t i = 0; i < a.per_trial.size(); ++i) {
    EXPECT_EQ(a.per_trial[i].tau, b.per_trial[i].tau);
    EXPECT_EQ(a.per_trial[i].good_event, b.per_trial[i].good_event);
  }
}

TEST(Simulate, Dispatch) {
  EXPECT_EQ(simulate(arl_config(0.5, 2, 10)).kind, "arl");
  EXPECT_EQ(simulate(delay_config(0.8, 2)).kind, "delay");
}
