#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mnsbm/errors.hpp"
#include "mnsbm/superposition.hpp"
#include "mnsbm/synth.hpp"
#include "oracles.hpp"
#include "posterior_checks.hpp"

namespace mnsbm {
namespace {

ObservedGraph graph_of(std::size_t n, std::vector<Dyad> edges) {
  ObservedGraph g;
  g.n = n;
  g.edges = std::move(edges);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

ObservedGraph random_graph(std::size_t n, double p, Rng& rng) {
  ObservedGraph g;
  g.n = n;
  std::bernoulli_distribution coin(p);
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j)
      if (coin(rng)) g.edges.push_back({i, j});
  return g;
}

// Every vertex in block 0 of every subnetwork with the given block rates.
EnsembleState single_block_ensemble(const ObservedGraph& g, const HeldoutSet& h,
                                    std::vector<double> rates) {
  EnsembleState ens = make_ensemble(g, h, rates.size());
  const std::vector<std::uint32_t> zeros(g.n, 0);
  initialize_ensemble(ens, 1);
  for (std::size_t s = 0; s < rates.size(); ++s) {
    auto& sub = ens.subs[s];
    sub.z = Assignment::from_labels(zeros);
    sub.stats = block_stats(sub.z, ens.layer(s));
    sub.eta = RateMatrix(1);
    sub.eta.set(0, 0, rates[s]);
  }
  return ens;
}

TEST(TotalRate, SumsSubnetworkRates) {
  const ObservedGraph g = graph_of(2, {{0, 1}});
  EXPECT_NEAR(total_rate(single_block_ensemble(g, {}, {0.7}), {0, 1}), 0.7, 1e-15);
  EXPECT_NEAR(total_rate(single_block_ensemble(g, {}, {0.3, 0.5}), {0, 1}), 0.8, 1e-15);
  const double abc = total_rate(single_block_ensemble(g, {}, {0.2, 0.9, 1.3}), {0, 1});
  const double cab = total_rate(single_block_ensemble(g, {}, {1.3, 0.2, 0.9}), {0, 1});
  EXPECT_NEAR(abc, 2.4, 1e-14);
  EXPECT_NEAR(abc, cab, 1e-14);
}

TEST(TotalRate, FloorsUnderflowedRates) {
  const ObservedGraph g = graph_of(2, {{0, 1}});
  EXPECT_EQ(total_rate(single_block_ensemble(g, {}, {0.0}), {0, 1}), kRateFloor);
}

TEST(SampleTotalCount, NonLinkIsZero) {
  Rng rng(1);
  for (double eta : {1e-6, 0.5, 40.0}) EXPECT_EQ(sample_total_count(0, eta, rng), 0u);
}

TEST(SampleTotalCount, RejectsDegenerateRate) {
  Rng rng(1);
  EXPECT_THROW(sample_total_count(1, 0.0, rng), ArgumentError);
  EXPECT_THROW(sample_total_count(1, -1.0, rng), ArgumentError);
}

TEST(SampleTotalCount, ZeroTruncatedLaw) {
  Rng rng(2);
  const int draws = 100000;
  const double eta = std::log(2.0);
  int ones = 0;
  for (int t = 0; t < draws; ++t) {
    const auto k = sample_total_count(1, eta, rng);
    ASSERT_GE(k, 1u);
    ones += k == 1;
  }
  // P(1) = eta e^-eta / (1 - e^-eta) = ln 2 at eta = ln 2
  const double p = std::log(2.0);
  EXPECT_NEAR(ones / double(draws), p, 3 * std::sqrt(p * (1 - p) / draws));
}

TEST(SampleTotalCount, ZeroTruncatedMeanInBothRegimes) {
  Rng rng(3);
  const int draws = 100000;
  for (double eta : {0.05, 2.0, 12.0, 45.0}) {
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < draws; ++t) {
      const double k = sample_total_count(1, eta, rng);
      sum += k;
      sum2 += k * k;
    }
    const double z = -std::expm1(-eta);
    const double mean = eta / z;
    const double var = (eta + eta * eta) / z - mean * mean;
    EXPECT_NEAR(sum / draws, mean, 3 * std::sqrt(var / draws) + 1e-12) << "eta=" << eta;
  }
}

TEST(SplitCount, ZeroTotal) {
  Rng rng(4);
  const std::vector<double> rates{0.3, 0.7};
  EXPECT_EQ(split_count(0, rates, rng), (std::vector<std::uint32_t>{0, 0}));
}

TEST(SplitCount, RejectsEmptyRates) {
  Rng rng(4);
  EXPECT_THROW(split_count(3, std::vector<double>{}, rng), ArgumentError);
}

TEST(SplitCount, TwoEqualRatesFollowMultinomial) {
  Rng rng(5);
  const std::vector<double> rates{1.0, 1.0};
  const int draws = 100000;
  std::map<std::uint32_t, int> first;
  for (int t = 0; t < draws; ++t) ++first[split_count(2, rates, rng)[0]];
  for (auto [k, p] : {std::pair{2u, 0.25}, std::pair{1u, 0.5}, std::pair{0u, 0.25}})
    EXPECT_NEAR(first[k] / double(draws), p, 3 * std::sqrt(p * (1 - p) / draws));
}

TEST(SplitCount, ConservesTotal) {
  Rng rng(6);
  std::uniform_real_distribution<double> rate(1e-12, 5.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> rates(1 + t % 5);
    for (double& r : rates) r = rate(rng);
    const auto out = split_count(7, rates, rng);
    ASSERT_EQ(std::accumulate(out.begin(), out.end(), 0u), 7u);
  }
}

TEST(ResampleEdges, EmptyGraphIsUnchanged) {
  const ObservedGraph g = graph_of(4, {});
  EnsembleState ens = make_ensemble(g, {}, 2);
  initialize_ensemble(ens, 3);
  const EnsembleState before = ens;
  resample_edges(ens, SweepContext{});
  EXPECT_EQ(ens, before);
}

TEST(ResampleEdges, SingleSubnetworkTakesTheWholeCount) {
  Rng rng(7);
  const ObservedGraph g = random_graph(30, 0.3, rng);
  EnsembleState ens = make_ensemble(g, {}, 1);
  initialize_ensemble(ens, 7);
  resample_edges(ens, SweepContext{7, 0, 1});
  for (std::size_t d = 0; d < ens.constrained; ++d) EXPECT_GE(ens.counts[d], 1u);
  EXPECT_EQ(check_invariants(ens), "");
}

TEST(FullSweep, SoakKeepsInvariants) {
  Rng rng(8);
  const ObservedGraph g = random_graph(25, 0.25, rng);
  Rng split_rng(9);
  const HoldoutSplit split = split_holdout(g, 0.1, split_rng);
  EnsembleState ens = make_ensemble(split.train, split.test, 3);
  initialize_ensemble(ens, 10);
  ASSERT_EQ(check_invariants(ens), "");
  for (std::uint64_t t = 0; t < 1000; ++t) {
    full_sweep(ens, SweepContext{10, t, 2});
    ASSERT_EQ(check_invariants(ens), "") << "sweep " << t;
  }
}

TEST(FullSweep, ParallelMatchesSerialReference) {
  // > kDyadBlockSize dyads so several edge blocks are in play
  Rng rng(12);
  const SyntheticNetwork net = generate(planted_params(90, 3, 5), rng);
  ASSERT_GT(net.graph.edge_count(), kDyadBlockSize);
  Rng split_rng(13);
  const HoldoutSplit split = split_holdout(net.graph, 0.05, split_rng);
  EnsembleState parallel = make_ensemble(split.train, split.test, 3);
  initialize_ensemble(parallel, 14);
  EnsembleState serial = parallel;
  for (std::uint64_t t = 0; t < 30; ++t) {
    full_sweep(parallel, SweepContext{14, t, 4});
    reference::full_sweep(serial, SweepContext{14, t, 1});
    ASSERT_EQ(parallel, serial) << "sweep " << t;
  }
}

TEST(FullSweep, PermutingSubnetworksCommutesWithASweep) {
  Rng rng(15);
  const ObservedGraph g = random_graph(20, 0.3, rng);
  EnsembleState ens = make_ensemble(g, {}, 3);
  initialize_ensemble(ens, 16);
  for (std::uint64_t t = 0; t < 5; ++t) full_sweep(ens, SweepContext{16, t, 1});

  const std::vector<std::size_t> perm{2, 0, 1};  // new slot k holds old subnetwork perm[k]
  auto permuted = [&](const EnsembleState& e) {
    EnsembleState out = e;
    const std::size_t S = e.S();
    for (std::size_t k = 0; k < S; ++k) {
      out.subs[k] = e.subs[perm[k]];
      for (std::size_t d = 0; d < e.dyads.size(); ++d)
        out.counts[d * S + k] = e.counts[d * S + perm[k]];
    }
    return out;
  };
  EnsembleState a = ens;
  EnsembleState b = permuted(ens);
  full_sweep(a, SweepContext{16, 5, 1});
  full_sweep(b, SweepContext{16, 5, 1});
  EXPECT_EQ(permuted(a), b);
}

TEST(RunChain, RecordCount) {
  const ObservedGraph g = graph_of(4, {{0, 1}, {1, 2}, {2, 3}});
  SweepConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 5;
  cfg.thinning = 1;
  EXPECT_EQ(run_chain(g, {}, 2, cfg).records.size(), 5u);
  cfg.thinning = 3;
  EXPECT_EQ(run_chain(g, {}, 2, cfg).records.size(), 2u);
  EXPECT_EQ(ChainTrace::expected_records(10, 5, 3), 2u);
}

TEST(RunChain, RejectsBadConfig) {
  const ObservedGraph g = graph_of(3, {{0, 1}});
  SweepConfig cfg;
  cfg.iterations = 5;
  cfg.burn_in = 5;
  EXPECT_THROW(run_chain(g, {}, 1, cfg), ArgumentError);
  cfg.burn_in = 0;
  EXPECT_THROW(run_chain(g, {}, 0, cfg), ArgumentError);
}

TEST(RunChain, CancellationTruncatesCleanly) {
  const ObservedGraph g = graph_of(3, {{0, 1}});
  SweepConfig cfg;
  cfg.iterations = 50;
  cfg.burn_in = 0;
  cfg.thinning = 1;
  std::atomic<bool> stop{true};
  const ChainTrace t = run_chain(g, {}, 1, cfg, &stop);
  EXPECT_TRUE(t.records.empty());
  EXPECT_EQ(t.n, 3u);
}

TEST(RunChain, IdenticalAcrossWorkerCounts) {
  Rng rng(17);
  const ObservedGraph g = random_graph(40, 0.2, rng);
  Rng split_rng(18);
  const HoldoutSplit split = split_holdout(g, 0.1, split_rng);
  SweepConfig cfg;
  cfg.iterations = 40;
  cfg.burn_in = 10;
  cfg.thinning = 3;
  cfg.master_seed = 99;
  cfg.record_counts = true;
  cfg.parallel_workers = 1;
  const ChainTrace one = run_chain(split.train, split.test, 3, cfg);
  cfg.parallel_workers = 8;
  const ChainTrace eight = run_chain(split.train, split.test, 3, cfg);
  EXPECT_EQ(one, eight);
}

// S = 1 with fixed hyperparameters: the counts integrate out to a
// Bernoulli(1 - e^-eta) likelihood per dyad.
TEST(FullSweep, SingleSubnetworkStarGraphPosterior) {
  const ObservedGraph g = graph_of(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  EXPECT_LE(testing::single_network_tv(g, {1.0, 1.0, 1.0}, 100000, 21), 0.02);
}

TEST(FullSweep, SingleSubnetworkTwoComponentPosterior) {
  const ObservedGraph g = graph_of(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}});
  EXPECT_LE(testing::single_network_tv(g, {1.0, 1.0, 1.0}, 100000, 22), 0.02);
}

TEST(FullSweep, TwoSubnetworkJointPosterior) {
  const testing::JointCheck check = testing::two_network_path_tv({1.0, 1.0, 4.0}, 400000, 31);
  EXPECT_GT(check.kept_fraction, 0.9);
  EXPECT_LE(check.tv, 0.03);
}

}  // namespace
}  // namespace mnsbm
