#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fairnet/contagion.hpp"
#include "test_support.hpp"

namespace fairnet {
namespace {

using testing::J;
using testing::N;
using testing::make_graph;

ContagionConfig certain() {
  ContagionConfig c;
  c.r_within = 1.0;
  c.r_between = 1.0;
  c.seed_count = 1;
  return c;
}

// Ring of n nodes with chords to distance 2, labels alternating. Both
// groups have identical degree distributions and positions.
LabeledGraph alternating_circulant(std::size_t n) {
  std::vector<Group> groups(n);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    groups[i] = i % 2 ? N : J;
    edges.emplace_back(i, (i + 1) % n);
    edges.emplace_back(i, (i + 2) % n);
  }
  return make_graph(groups, edges);
}

TEST(Seeding, BucketRanges) {
  EXPECT_EQ(bucket_range(SeedingBucket::low, 10), (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_EQ(bucket_range(SeedingBucket::mid, 10), (std::pair<std::size_t, std::size_t>{3, 7}));
  EXPECT_EQ(bucket_range(SeedingBucket::high, 10), (std::pair<std::size_t, std::size_t>{8, 10}));
  EXPECT_EQ(bucket_range(SeedingBucket::low, 1), (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(Seeding, MinorityCountUniformWithinBucket) {
  std::mt19937 gen(1);
  const auto g = testing::random_graph(gen, 100, 0.05, 0.5);
  for (auto [bucket, lo] : {std::pair{SeedingBucket::low, 0}, std::pair{SeedingBucket::high, 8}}) {
    Rng rng(3);
    std::vector<std::size_t> hits(11, 0);
    const std::size_t trials = 30000;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto seeds = select_seeds(g, 10, bucket, rng);
      ASSERT_EQ(seeds.size(), 10u);
      ASSERT_TRUE(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
      std::size_t k = 0;
      for (NodeId v : seeds) k += g.group_of(v) == N;
      ++hits[k];
    }
    for (int k = 0; k <= 10; ++k) {
      if (k >= lo && k < lo + 3) {
        testing::expect_frequency(hits[k], trials, 1.0 / 3.0);
      } else {
        EXPECT_EQ(hits[k], 0u);
      }
    }
  }
}

TEST(Seeding, SingleLowSeedIsMajority) {
  const auto g = make_graph({N, J, N}, {{0, 1}, {1, 2}});
  Rng rng(4);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_seeds(g, 1, SeedingBucket::low, rng), (std::vector<NodeId>{1}));
}

TEST(Seeding, UnsatisfiableBucketReportsMaximum) {
  const auto g = make_graph({J, J, J, J, J, J, J, J, N, N}, {});
  Rng rng(1);
  try {
    select_seeds(g, 10, SeedingBucket::mid, rng);
    FAIL() << "expected SeedingError";
  } catch (const SeedingError& e) {
    EXPECT_EQ(e.max_achievable_minority(), 2u);
  }
}

TEST(Rates, WithinAndBetween) {
  ContagionConfig c;
  c.r_within = 0.7;
  c.r_between = 0.3;
  EXPECT_EQ(transmission_rate(J, J, c), 0.7);
  EXPECT_EQ(transmission_rate(N, J, c), 0.3);
  c.r_between = 0.7;
  for (Group a : {J, N})
    for (Group b : {J, N}) EXPECT_EQ(transmission_rate(a, b, c), 0.7);
  c.r_between = 0.8;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Step, TwoSameGroupExposures) {
  // v = 0 (maj) with infected maj neighbors 1 and 2.
  const auto g = make_graph({J, J, J}, {{0, 1}, {0, 2}});
  const std::vector<NodeId> seeds{1, 2};
  SpreadState state(g, seeds);
  const auto e = state.eligible(ContagionConfig{});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NEAR(e[0].second, 1.0 - 0.3 * 0.3, 1e-12);
}

TEST(Step, ComplexThresholdIsInclusive) {
  std::vector<Group> groups(11, J);
  groups[1] = N;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId leaf = 1; leaf <= 10; ++leaf) edges.emplace_back(0, leaf);
  const auto g = make_graph(groups, edges);
  ContagionConfig c;
  c.kind = ContagionKind::complex;
  c.activation_threshold = 0.1;
  c.r_between = 0.3;
  const std::vector<NodeId> seeds{1};
  const auto e = SpreadState(g, seeds).eligible(c);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].first, 0u);
  EXPECT_NEAR(e[0].second, 0.3, 1e-12);
  c.activation_threshold = 0.11;
  EXPECT_TRUE(SpreadState(g, seeds).eligible(c).empty());
}

TEST(Step, UnexposedNodesNeverInfected) {
  const auto g = make_graph({J, J, J}, {{0, 1}});
  Rng rng(1);
  const std::vector<NodeId> seeds{0};
  for (int i = 0; i < 100; ++i) {
    for (NodeId v : step(g, seeds, certain(), rng)) EXPECT_NE(v, 2u);
  }
}

TEST(Step, FrequenciesMatchClosedForm) {
  // Infected {0 (maj), 3 (min)}; susceptible 1 (maj), 2 (min), 4 (maj).
  const auto g = make_graph({J, J, N, N, J}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {3, 4}, {0, 4}, {1, 2}});
  ContagionConfig c;
  c.r_within = 0.6;
  c.r_between = 0.25;
  const std::vector<NodeId> infected{0, 3};
  // Closed form per susceptible node: 1 - prod over infected neighbors (1 - r).
  auto exact = [&](NodeId v) {
    double escape = 1.0;
    for (NodeId u : g.neighbors(v)) {
      if (u == 0 || u == 3) escape *= 1.0 - (g.group_of(u) == g.group_of(v) ? 0.6 : 0.25);
    }
    return 1.0 - escape;
  };
  Rng rng(21);
  const std::size_t trials = 120000;
  std::vector<std::size_t> hits(5, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    for (NodeId v : step(g, infected, c, rng)) ++hits[v];
  }
  EXPECT_EQ(hits[0] + hits[3], 0u);
  for (NodeId v : {1u, 2u, 4u}) testing::expect_frequency(hits[v], trials, exact(v));
}

TEST(Simulate, TriangleCertainSpread) {
  const auto g = testing::complete_graph(3);
  Rng rng(1);
  const std::vector<NodeId> seeds{0};
  const auto trace = simulate_from(g, seeds, certain(), rng);
  EXPECT_EQ(trace.T, 1u);
  EXPECT_EQ(trace.terminal_reason, Termination::all_infected);
  EXPECT_EQ(trace.infected_maj.back(), 3u);
}

TEST(Simulate, PathFromEnd) {
  for (std::size_t n : {2u, 5u, 17u}) {
    Rng rng(1);
    const std::vector<NodeId> seeds{0};
    EXPECT_EQ(simulate_from(testing::path_graph(n), seeds, certain(), rng).T, n - 1);
  }
}

TEST(Simulate, ComplexStallsAtZero) {
  ContagionConfig c = certain();
  c.kind = ContagionKind::complex;
  c.activation_threshold = 0.6;
  Rng rng(1);
  const std::vector<NodeId> seeds{0};
  const auto trace = simulate_from(testing::path_graph(5), seeds, c, rng);
  EXPECT_EQ(trace.T, 0u);
  EXPECT_EQ(trace.terminal_reason, Termination::stalled);
  EXPECT_THROW(equality_curve(trace, testing::path_graph(5), 10), DegenerateTrace);
}

TEST(Simulate, StepCap) {
  ContagionConfig c = certain();
  c.max_steps = 3;
  Rng rng(1);
  const std::vector<NodeId> seeds{0};
  const auto trace = simulate_from(testing::path_graph(10), seeds, c, rng);
  EXPECT_EQ(trace.terminal_reason, Termination::step_cap);
  EXPECT_EQ(trace.T, 3u);
}

TEST(Simulate, CertainSpreadTakesSeedEccentricity) {
  std::mt19937 gen(31);
  int checked = 0;
  for (int trial = 0; trial < 300 && checked < 80; ++trial) {
    const auto g = testing::random_graph(gen, 4 + trial % 20, 0.2);
    if (!is_connected(g)) continue;
    ++checked;
    std::vector<NodeId> seeds{0};
    if (g.node_count() > 6) seeds.push_back(static_cast<NodeId>(g.node_count() - 1));
    const auto d = testing::floyd_warshall(g);
    std::uint32_t ecc = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::uint32_t best = testing::kInf;
      for (NodeId s : seeds) best = std::min(best, d[s][v]);
      ecc = std::max(ecc, best);
    }
    Rng rng(trial);
    EXPECT_EQ(simulate_from(g, seeds, certain(), rng).T, ecc);
  }
}

TEST(Simulate, SimpleEqualsComplexWithZeroThreshold) {
  std::mt19937 gen(8);
  const auto g = largest_connected_component(testing::random_graph(gen, 300, 0.02));
  ContagionConfig simple;
  simple.r_between = 0.3;
  simple.rng_seed = 99;
  ContagionConfig complex = simple;
  complex.kind = ContagionKind::complex;
  complex.activation_threshold = 0.0;
  const auto a = simulate(g, simple);
  const auto b = simulate(g, complex);
  EXPECT_EQ(a.infected_maj, b.infected_maj);
  EXPECT_EQ(a.infected_min, b.infected_min);
  EXPECT_EQ(a.seeds, b.seeds);
}

TEST(Simulate, TraceInvariants) {
  std::mt19937 gen(12);
  const auto g = largest_connected_component(testing::random_graph(gen, 400, 0.015));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ContagionConfig c;
    c.kind = seed % 2 ? ContagionKind::complex : ContagionKind::simple;
    c.r_between = 0.3;
    c.rng_seed = seed;
    const auto trace = simulate(g, c);
    ASSERT_EQ(trace.infected_maj.size(), trace.T + 1);
    EXPECT_EQ(trace.infected_maj[0] + trace.infected_min[0], 10u);
    for (std::size_t t = 1; t <= trace.T; ++t) {
      EXPECT_GE(trace.infected_maj[t], trace.infected_maj[t - 1]);
      EXPECT_GE(trace.infected_min[t], trace.infected_min[t - 1]);
    }
    if (trace.T > 0) {
      EXPECT_GT(trace.infected_maj[trace.T] + trace.infected_min[trace.T],
                trace.infected_maj[trace.T - 1] + trace.infected_min[trace.T - 1]);
    }
    const auto eff = efficiency_curve(trace, g);
    EXPECT_DOUBLE_EQ(eff[0], 10.0 / g.node_count());
    if (trace.terminal_reason == Termination::all_infected) {
      EXPECT_DOUBLE_EQ(eff.back(), 1.0);
      if (trace.T > 0) {
        EXPECT_EQ(equality_curve(trace, g, 20).delta.back(), 0.0);
      }
    }
    if (trace.T > 0) {
      for (double d : equality_curve(trace, g, 20).delta) {
        EXPECT_GE(d, -1.0);
        EXPECT_LE(d, 1.0);
      }
    }
  }
}

TEST(EqualityCurve, RelativeGap) {
  EXPECT_NEAR(relative_gap(0.3, 0.1), 0.5, 1e-12);
  EXPECT_EQ(relative_gap(0.4, 0.4), 0.0);
  EXPECT_EQ(relative_gap(0.0, 0.0), 0.0);
}

TEST(EqualityCurve, BinsSampleNearestStep) {
  // 10 maj, 10 min; T = 4 with known counts.
  std::vector<Group> groups(20, J);
  for (std::size_t i = 10; i < 20; ++i) groups[i] = N;
  const auto g = make_graph(groups, {});
  SpreadTrace trace;
  trace.infected_maj = {1, 2, 3, 6, 10};
  trace.infected_min = {0, 0, 1, 2, 10};
  trace.T = 4;
  const auto curve = equality_curve(trace, g, 2);
  // b=1 -> t=2: 0.3 vs 0.1; b=2 -> t=4: equal.
  ASSERT_EQ(curve.delta.size(), 2u);
  EXPECT_NEAR(curve.delta[0], 0.5, 1e-12);
  EXPECT_EQ(curve.delta[1], 0.0);
  EXPECT_EQ(nearest_step(1, 4, 2), 1u);  // 0.5 rounds up
  EXPECT_EQ(nearest_step(1, 3, 2), 1u);  // 0.667
}

TEST(EqualityCurve, SymmetricStructureHasNoMeanGap) {
  const auto g = alternating_circulant(200);
  const std::size_t runs = 240, bins = 20;
  std::vector<double> sum(bins, 0.0), sq(bins, 0.0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    ContagionConfig c;
    c.r_within = c.r_between = 0.5;
    c.bucket = SeedingBucket::mid;
    c.rng_seed = derive_seed(1234, {r});
    const auto delta = equality_curve(simulate(g, c), g, bins).delta;
    for (std::size_t b = 0; b < bins; ++b) {
      sum[b] += delta[b];
      sq[b] += delta[b] * delta[b];
    }
  }
  for (std::size_t b = 0; b < bins; ++b) {
    const double mean = sum[b] / runs;
    const double var = (sq[b] - runs * mean * mean) / (runs - 1);
    const double se = std::sqrt(std::max(var, 0.0) / runs);
    EXPECT_LE(std::abs(mean), 3 * se + 1e-12) << "bin " << b;
  }
}

}  // namespace
}  // namespace fairnet
