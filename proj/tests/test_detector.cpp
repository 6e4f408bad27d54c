#include <cstdint>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fcsd/detector.hpp"
#include "fcsd/simharness.hpp"

using namespace fcsd;

namespace {

DetectorConfig make_config(double alpha, DetectorMode mode = NonPartitioned{}) {
  DetectorConfig c;
  c.cs.alpha = alpha;
  c.mode = mode;
  return c;
}

std::vector<double> seeded_stream(std::uint64_t seed, std::uint64_t len, double pre, double post,
                                  std::uint64_t change) {
  DataGenModel m;
  m.pre = Bernoulli{pre};
  m.post = Bernoulli{post};
  m.change_at = change;
  m.seed = seed;
  return gen_stream(m, 0, len);
}

}  // namespace

TEST(InitDetector, GlobalStartsAtBaseConstraint) {
  EXPECT_EQ(init_detector(make_config(0.05)).global(), ParamInterval::full());
  const auto d = init_detector(make_config(0.05, Partitioned{{0.4, 0.6}}));
  EXPECT_EQ(d.global(), (ParamInterval{0.4, 0.6}));
  EXPECT_EQ(d.steps(), 0u);
  EXPECT_TRUE(d.active().empty());
}

TEST(InitDetector, RejectsBadConfig) {
  EXPECT_THROW(init_detector(make_config(0.05, Partitioned{ParamInterval::empty()})), ConfigError);
  DetectorConfig g = make_config(0.05);
  g.schedule = Geometric{1.0};
  EXPECT_THROW(init_detector(g), ConfigError);
}

TEST(GlobalIntersection, OverlappingIntervals) {
  const std::vector<ParamInterval> ivs{{0.1, 0.4}, {0.35, 0.7}};
  EXPECT_EQ(global_intersection(ParamInterval::full(), ivs), (ParamInterval{0.35, 0.4}));
}

TEST(GlobalIntersection, DisjointIntervalsAreEmpty) {
  const std::vector<ParamInterval> ivs{{0.1, 0.3}, {0.5, 0.9}};
  EXPECT_TRUE(global_intersection(ParamInterval::full(), ivs).is_empty());
}

TEST(GlobalIntersection, PartitionedBaseMissesInterval) {
  const std::vector<ParamInterval> ivs{{0.35, 0.6}};
  EXPECT_TRUE(global_intersection({0.0, 0.3}, ivs).is_empty());
}

TEST(DominatedMask, PrunesSupersetOfOthers) {
  const std::vector<ParamInterval> ivs{{0.1, 0.9}, {0.0, 1.0}, {0.2, 0.4}};
  EXPECT_EQ(dominated_mask(ParamInterval::full(), ivs), (std::vector<bool>{false, true, false}));
}

TEST(DominatedMask, KeepsIntervalsThatEachTightenASide) {
  const std::vector<ParamInterval> ivs{{0.1, 0.5}, {0.3, 0.8}};
  EXPECT_EQ(dominated_mask(ParamInterval::full(), ivs), (std::vector<bool>{false, false}));
}

TEST(DominatedMask, NeverPrunesOldest) {
  const std::vector<ParamInterval> ivs{{0.0, 1.0}, {0.2, 0.4}};
  EXPECT_EQ(dominated_mask(ParamInterval::full(), ivs), (std::vector<bool>{false, false}));
}

TEST(DominatedMask, TiesKeepOneRepresentative) {
  const std::vector<ParamInterval> ivs{{0.1, 0.9}, {0.2, 0.4}, {0.2, 0.4}};
  const auto drop = dominated_mask(ParamInterval::full(), ivs);
  EXPECT_EQ(drop, (std::vector<bool>{false, true, false}));
  std::vector<ParamInterval> kept;
  for (std::size_t i = 0; i < ivs.size(); ++i)
    if (!drop[i]) kept.push_back(ivs[i]);
  EXPECT_EQ(global_intersection(ParamInterval::full(), kept), global_intersection(ParamInterval::full(), ivs));
}

TEST(Step, RejectsBadInputAndStoppedState) {
  auto d = init_detector(make_config(0.05, Partitioned{{0.9, 1.0}}));
  EXPECT_THROW(d.step(1.5), DomainError);
  while (!d.step(0.5).detected) {
  }
  EXPECT_THROW(d.step(0.5), StateError);
}

TEST(Step, SpawnBeforeConsume) {
  auto d = init_detector(make_config(0.05));
  for (int t = 1; t <= 30; ++t) {
    d.step(0.5);
    ASSERT_EQ(d.active().size(), static_cast<std::size_t>(t));
    ASSERT_EQ(d.active().back().start_index(), static_cast<std::uint64_t>(t));
    ASSERT_EQ(d.active().back().count(), 1u);
    ASSERT_TRUE(d.verify_invariants());
  }
  EXPECT_EQ(d.spawned(), 30u);
}

TEST(Step, GeometricScheduleSpawnsAtCeilPowers) {
  DetectorConfig c = make_config(0.05);
  c.schedule = Geometric{2.0};
  auto d = init_detector(c);
  std::vector<std::uint64_t> starts;
  for (int t = 1; t <= 40; ++t) d.step(0.5);
  for (const auto& cs : d.active()) starts.push_back(cs.start_index());
  EXPECT_EQ(starts, (std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32}));

  c.schedule = Geometric{1.5};
  auto e = init_detector(c);
  starts.clear();
  for (int t = 1; t <= 12; ++t) e.step(0.5);
  for (const auto& cs : e.active()) starts.push_back(cs.start_index());
  // ceil(1.5^k): 1, 2, 3, 4, 6, 8, 12
  EXPECT_EQ(starts, (std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 12}));
}

// Frozen from tests/oracles/betting_cs.py.
TEST(RunStream, ConstantHalfAgainstHighTheta0Set) {
  const std::vector<double> xs(100, 0.5);
  const auto r = run_stream(make_config(0.05, Partitioned{{0.9, 1.0}}), xs, 100);
  ASSERT_TRUE(r.tau);
  EXPECT_EQ(*r.tau, 3u);
  EXPECT_FALSE(r.censored_at);
}

TEST(RunStream, EmptyStreamIsCensoredAtZero) {
  const auto r = run_stream(make_config(0.05), std::vector<double>{}, 5);
  EXPECT_FALSE(r.tau);
  ASSERT_TRUE(r.censored_at);
  EXPECT_EQ(*r.censored_at, 0u);
  EXPECT_EQ(r.n_cs_spawned, 0u);
}

TEST(RunStream, ShortNoChangeStreamIsTotal) {
  const auto xs = seeded_stream(3, 10, 0.5, 0.5, 10);
  const auto a = run_stream(make_config(0.5), xs, 10);
  const auto b = run_stream(make_config(0.5), xs, 10);
  EXPECT_TRUE(a.tau.has_value() != a.censored_at.has_value());
  if (a.tau) EXPECT_LE(*a.tau, 10u);
  else EXPECT_EQ(*a.censored_at, 10u);
  EXPECT_EQ(a.tau, b.tau);
  EXPECT_EQ(a.censored_at, b.censored_at);
}

TEST(RunStream, ReportsOffendingIndex) {
  const std::vector<double> xs{0.1, 0.2, 1.3, 0.4};
  try {
    run_stream(make_config(0.05), xs, 10);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_stream(make_config(0.05), xs, 0), ConfigError);
}

TEST(RunStream, CensorShorterThanStream) {
  const std::vector<double> xs(50, 0.5);
  const auto r = run_stream(make_config(0.05), xs, 7, true);
  ASSERT_TRUE(r.censored_at);
  EXPECT_EQ(*r.censored_at, 7u);
  EXPECT_EQ(r.trace.size(), 7u);
}

TEST(DetectorProperty, StoppingRuleMatchesBruteForceIntersection) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto xs = seeded_stream(seed, 200, 0.3, 0.8, 60);
    const auto cfg = make_config(seed % 2 ? 0.1 : 0.25, seed % 3 ? DetectorMode{NonPartitioned{}}
                                                                : DetectorMode{Partitioned{{0.2, 0.4}}});
    auto d = init_detector(cfg);
    // Brute force: independent CSs for each start index, intersected from scratch at every step.
    std::vector<ConfidenceSequence> css;
    for (std::uint64_t n = 1; n <= xs.size(); ++n) {
      css.push_back(new_cs(cfg.cs, n));
      ParamInterval g = cfg.base_constraint();
      for (auto& cs : css) {
        cs.update(xs[n - 1]);
        g = intersect(g, cs.interval());
      }
      const auto out = d.step(xs[n - 1]);
      ASSERT_EQ(out.detected, g.is_empty()) << "seed=" << seed << " n=" << n;
      if (!g.is_empty()) {
        ASSERT_EQ(d.global(), g);
      }
      ASSERT_TRUE(d.verify_invariants());
      if (out.detected) break;
    }
  }
}

TEST(DetectorProperty, GlobalIntersectionIsMonotone) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto xs = seeded_stream(100 + seed, 300, 0.5, 0.9, 150);
    auto d = init_detector(make_config(0.1));
    ParamInterval prev = d.global();
    for (double x : xs) {
      const auto out = d.step(x);
      if (out.detected) break;
      ASSERT_TRUE(prev.contains(d.global()));
      prev = d.global();
    }
  }
}

TEST(DetectorProperty, OptimizationsNeverStopEarlier) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto xs = seeded_stream(500 + seed, 150, 0.4, 0.9, 40);
    DetectorConfig exact = make_config(0.2);
    DetectorConfig geo = exact;
    geo.schedule = Geometric{1.5};
    DetectorConfig pruned = exact;
    pruned.pruning = Pruning::DominatedInterval;
    const auto te = run_stream(exact, xs, 150).tau.value_or(151);
    const auto tg = run_stream(geo, xs, 150).tau.value_or(151);
    const auto tp = run_stream(pruned, xs, 150).tau.value_or(151);
    ASSERT_GE(tg, te) << "seed=" << seed;
    ASSERT_GE(tp, te) << "seed=" << seed;
  }
}

TEST(DetectorProperty, PruningBoundsActiveSet) {
  const auto xs = seeded_stream(9, 400, 0.5, 0.5, 400);
  DetectorConfig pruned = make_config(0.05);
  pruned.pruning = Pruning::DominatedInterval;
  const auto r = run_stream(pruned, xs, 400);
  const auto e = run_stream(make_config(0.05), xs, 400);
  EXPECT_LT(r.n_cs_active_max, e.n_cs_active_max);
}

TEST(DetectorProperty, DeterministicReports) {
  const auto xs = seeded_stream(77, 300, 0.2, 0.7, 100);
  const auto a = run_stream(make_config(0.05), xs, 300, true);
  const auto b = run_stream(make_config(0.05), xs, 300, true);
  EXPECT_EQ(a.tau, b.tau);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].lower, b.trace[i].lower);
    EXPECT_EQ(a.trace[i].upper, b.trace[i].upper);
  }
}
