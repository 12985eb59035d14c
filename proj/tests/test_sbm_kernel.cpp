#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "mnsbm/errors.hpp"
#include "mnsbm/math.hpp"
#include "mnsbm/sbm_kernel.hpp"
#include "oracles.hpp"

namespace mnsbm {
namespace {

using testing::canonical;
using testing::set_partitions;

// Dense-count fixture: a support list over the given dyads with one layer.
struct Layer {
  std::vector<Dyad> dyads;
  std::vector<std::uint32_t> counts;
  std::vector<Dyad> excluded_dyads;
  Adjacency support;
  Adjacency excluded;
  std::size_t n;

  Layer(std::size_t n_, std::vector<std::pair<Dyad, std::uint32_t>> entries,
        std::vector<Dyad> excl = {})
      : excluded_dyads(std::move(excl)), n(n_) {
    for (auto [d, c] : entries) {
      dyads.push_back(d);
      counts.push_back(c);
    }
    support = Adjacency::build(n, dyads);
    excluded = Adjacency::build(n, excluded_dyads);
  }
  LayerView view() const {
    return LayerView{&support, excluded_dyads.empty() ? nullptr : &excluded, counts, 1, 0};
  }
};

TEST(Assignment, FromLabelsCompactsInFirstAppearanceOrder) {
  const std::vector<std::uint32_t> labels{7, 3, 7, 9};
  const Assignment a = Assignment::from_labels(labels);
  EXPECT_EQ(a.z, (std::vector<std::uint32_t>{0, 1, 0, 2}));
  EXPECT_EQ(a.sizes, (std::vector<std::uint32_t>{2, 1, 1}));
  EXPECT_TRUE(a.valid());
}

TEST(CrpLogDensity, TwoVertexPartitions) {
  const std::vector<std::uint32_t> same{0, 0};
  const std::vector<std::uint32_t> apart{0, 1};
  EXPECT_NEAR(crp_log_density(Assignment::from_labels(same), 1.0), std::log(0.5), 1e-14);
  EXPECT_NEAR(crp_log_density(Assignment::from_labels(apart), 1.0), std::log(0.5), 1e-14);
}

TEST(CrpLogDensity, SingleVertexHasProbabilityOne) {
  const std::vector<std::uint32_t> one{0};
  for (double alpha : {0.1, 1.0, 7.5})
    EXPECT_NEAR(crp_log_density(Assignment::from_labels(one), alpha), 0.0, 1e-13);
}

TEST(CrpLogDensity, NormalisesOverAllPartitions) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (double alpha : {0.3, 1.0, 2.5}) {
      double total = 0.0;
      for (const auto& rgs : set_partitions(n))
        total += std::exp(crp_log_density(Assignment::from_labels(rgs), alpha));
      EXPECT_NEAR(total, 1.0, 1e-10) << "n=" << n << " alpha=" << alpha;
    }
  }
}

TEST(CrpLogDensity, MatchesSequentialSeatingProduct) {
  for (const auto& rgs : set_partitions(5))
    EXPECT_NEAR(crp_log_density(Assignment::from_labels(rgs), 0.7),
                std::log(testing::crp_probability(rgs, 0.7)), 1e-12);
}

TEST(CrpLogDensity, RejectsNonPositiveAlpha) {
  const std::vector<std::uint32_t> one{0};
  EXPECT_THROW(crp_log_density(Assignment::from_labels(one), 0.0), ArgumentError);
}

TEST(SampleCrp, SingleVertexAlwaysOneBlock) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(sample_crp(1, 3.0, rng).block_count(), 1u);
}

TEST(SampleCrp, TwoVerticesShareABlockHalfTheTime) {
  Rng rng(2);
  const int draws = 100000;
  int same = 0;
  for (int t = 0; t < draws; ++t) same += sample_crp(2, 1.0, rng).block_count() == 1;
  const double sigma = std::sqrt(0.25 / draws);
  EXPECT_NEAR(same / double(draws), 0.5, 3 * sigma);
}

TEST(SampleCrp, PartitionFrequenciesPassChiSquare) {
  // n = 4 has 15 set partitions; chi-square 0.999 quantile at 14 dof is 36.12
  const double alpha = 0.5;
  const int draws = 1000000;
  Rng rng(3);
  std::map<std::vector<std::uint32_t>, int> observed;
  for (int t = 0; t < draws; ++t) ++observed[canonical(sample_crp(4, alpha, rng).z)];
  double chi2 = 0.0;
  for (const auto& rgs : set_partitions(4)) {
    const double expected = draws * testing::crp_probability(rgs, alpha);
    const double o = observed[rgs];
    chi2 += (o - expected) * (o - expected) / expected;
  }
  EXPECT_LT(chi2, 36.12);
}

TEST(BlockStats, SingleBlock) {
  Layer layer(3, {{{0, 1}, 2}, {{0, 2}, 0}, {{1, 2}, 1}});
  const std::vector<std::uint32_t> labels{0, 0, 0};
  const BlockStats s = block_stats(Assignment::from_labels(labels), layer.view());
  EXPECT_EQ(s.edges(0, 0), 3);
  EXPECT_EQ(s.dyads(0, 0), 3);
}

TEST(BlockStats, TwoBlocks) {
  Layer layer(3, {{{0, 1}, 2}, {{0, 2}, 0}, {{1, 2}, 1}});
  const std::vector<std::uint32_t> labels{0, 1, 1};
  const BlockStats s = block_stats(Assignment::from_labels(labels), layer.view());
  EXPECT_EQ(s.edges(0, 1), 2);
  EXPECT_EQ(s.edges(1, 1), 1);
  EXPECT_EQ(s.dyads(0, 1), 2);
  EXPECT_EQ(s.dyads(1, 1), 1);
  EXPECT_EQ(s.edges(0, 0), 0);
  EXPECT_EQ(s.dyads(0, 0), 0);
}

TEST(BlockStats, ExcludedDyadLeavesBothCounts) {
  Layer layer(3, {{{0, 1}, 2}, {{0, 2}, 0}, {{1, 2}, 1}}, {Dyad{0, 1}});
  const std::vector<std::uint32_t> labels{0, 0, 0};
  const BlockStats s = block_stats(Assignment::from_labels(labels), layer.view());
  EXPECT_EQ(s.edges(0, 0), 1);
  EXPECT_EQ(s.dyads(0, 0), 2);
}

TEST(CollapsedLogLikelihood, SingleDyadClosedForms) {
  const std::vector<std::uint32_t> labels{0, 0};
  for (auto [count, expected] : {std::pair{0u, 0.5}, std::pair{1u, 0.25}}) {
    Layer layer(2, {{{0, 1}, count}});
    const Assignment z = Assignment::from_labels(labels);
    const BlockStats s = block_stats(z, layer.view());
    EXPECT_NEAR(collapsed_log_likelihood(s, layer.view(), 1.0, 1.0), std::log(expected), 1e-13);
  }
}

TEST(CollapsedLogLikelihood, RejectsBadPrior) {
  Layer layer(2, {{{0, 1}, 1}});
  const std::vector<std::uint32_t> labels{0, 0};
  const BlockStats s = block_stats(Assignment::from_labels(labels), layer.view());
  EXPECT_THROW(collapsed_log_likelihood(s, layer.view(), 0.0, 1.0), ArgumentError);
  EXPECT_THROW(collapsed_log_likelihood(s, layer.view(), 1.0, -1.0), ArgumentError);
}

TEST(CollapsedLogLikelihood, MatchesQuadratureOnRandomFourVertexInstances) {
  Rng rng(11);
  std::uniform_int_distribution<std::uint32_t> count(0, 4);
  std::uniform_real_distribution<double> hyper(0.3, 4.0);
  const auto partitions = set_partitions(4);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<std::uint32_t>> dense(4, std::vector<std::uint32_t>(4, 0));
    std::vector<std::pair<Dyad, std::uint32_t>> entries;
    for (Vertex i = 0; i < 4; ++i)
      for (Vertex j = i + 1; j < 4; ++j) {
        dense[i][j] = count(rng);
        entries.push_back({{i, j}, dense[i][j]});
      }
    Layer layer(4, entries);
    const auto& rgs = partitions[static_cast<std::size_t>(trial) % partitions.size()];
    const double kappa = hyper(rng);
    const double lambda = hyper(rng);
    const Assignment z = Assignment::from_labels(rgs);
    const double closed = collapsed_log_likelihood(block_stats(z, layer.view()), layer.view(),
                                                   kappa, lambda);
    // the posterior helper adds log CRP; remove it to isolate the likelihood
    const double quad = testing::log_poisson_sbm_posterior(rgs, dense, 1.0, kappa, lambda) -
                        std::log(testing::crp_probability(rgs, 1.0));
    EXPECT_NEAR(closed, quad, 1e-6) << "trial " << trial;
  }
}

TEST(SampleEta, ConjugatePosteriorMean) {
  BlockStats stats{BlockMatrix<std::int64_t>(1), BlockMatrix<std::int64_t>(1)};
  stats.edges.set(0, 0, 3);
  stats.dyads.set(0, 0, 4);
  Rng rng(5);
  const int draws = 100000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) sum += sample_eta(stats, 1.0, 1.0, rng)(0, 0);
  // Gamma(4, 5): mean 0.8, variance 4 / 25
  EXPECT_NEAR(sum / draws, 0.8, 3 * std::sqrt(0.16 / draws));
}

TEST(SampleEta, NoDataFallsBackToPrior) {
  BlockStats stats{BlockMatrix<std::int64_t>(1), BlockMatrix<std::int64_t>(1)};
  Rng rng(6);
  const int draws = 100000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) sum += sample_eta(stats, 2.0, 4.0, rng)(0, 0);
  EXPECT_NEAR(sum / draws, 0.5, 3 * std::sqrt(2.0 / 16.0 / draws));
}

TEST(SampleEta, DeterministicUnderSeed) {
  BlockStats stats{BlockMatrix<std::int64_t>(3), BlockMatrix<std::int64_t>(3)};
  stats.edges.set(0, 2, 5);
  stats.dyads.set(0, 2, 9);
  Rng a(77), b(77);
  EXPECT_EQ(sample_eta(stats, 1.5, 0.5, a), sample_eta(stats, 1.5, 0.5, b));
}

TEST(GibbsSweep, SingleVertexUnchanged) {
  Layer layer(1, {});
  const std::vector<std::uint32_t> labels{0};
  Assignment z = Assignment::from_labels(labels);
  BlockStats s = block_stats(z, layer.view());
  Rng rng(1);
  gibbs_sweep_z(z, s, layer.view(), Hyperparams{}, rng);
  EXPECT_EQ(z.z, labels);
}

TEST(GibbsSweep, IncrementalStatsMatchRecomputation) {
  Rng rng(21);
  std::uniform_int_distribution<std::uint32_t> count(1, 3);
  std::bernoulli_distribution present(0.3);
  const std::size_t n = 40;
  std::vector<std::pair<Dyad, std::uint32_t>> entries;
  std::vector<Dyad> excluded;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) {
      if (present(rng)) entries.push_back({{i, j}, count(rng)});
      else if (present(rng) && present(rng)) excluded.push_back({i, j});
    }
  Layer layer(n, entries, excluded);
  Assignment z = sample_crp(n, 2.0, rng);
  BlockStats s = block_stats(z, layer.view());
  const Hyperparams hp{1.5, 0.8, 1.2};
  for (int sweep = 0; sweep < 50; ++sweep) {
    gibbs_sweep_z(z, s, layer.view(), hp, rng);
    ASSERT_TRUE(z.valid());
    ASSERT_EQ(s, block_stats(z, layer.view())) << "sweep " << sweep;
  }
}

TEST(GibbsSweep, StarGraphPosteriorMatchesEnumeration) {
  // n = 5 star centred on 0, unit counts on the spokes
  const Hyperparams hp{1.0, 1.0, 1.0};
  std::vector<std::vector<std::uint32_t>> dense(5, std::vector<std::uint32_t>(5, 0));
  std::vector<std::pair<Dyad, std::uint32_t>> entries;
  for (Vertex j = 1; j < 5; ++j) {
    dense[0][j] = 1;
    entries.push_back({{0, j}, 1});
  }
  Layer layer(5, entries);

  const auto partitions = set_partitions(5);
  ASSERT_EQ(partitions.size(), 52u);
  std::vector<double> log_post;
  for (const auto& rgs : partitions)
    log_post.push_back(testing::log_poisson_sbm_posterior(rgs, dense, hp.alpha, hp.kappa, hp.lambda));
  const auto probs = testing::normalise_log(log_post);
  std::map<std::vector<std::uint32_t>, double> exact;
  for (std::size_t k = 0; k < partitions.size(); ++k) exact[partitions[k]] = probs[k];

  Rng rng(99);
  Assignment z = sample_crp(5, 1.0, rng);
  BlockStats s = block_stats(z, layer.view());
  for (int t = 0; t < 1000; ++t) gibbs_sweep_z(z, s, layer.view(), hp, rng);
  const int samples = 100000;
  std::map<std::vector<std::uint32_t>, double> empirical;
  for (int t = 0; t < samples; ++t) {
    gibbs_sweep_z(z, s, layer.view(), hp, rng);
    empirical[canonical(z.z)] += 1.0 / samples;
  }
  EXPECT_LE(testing::total_variation(empirical, exact), 0.02);
}

TEST(MhHyperparams, DetailedBalanceIdentity) {
  const double lt = -3.2, lt_prop = -1.7, theta = 0.9, theta_prop = 1.4;
  EXPECT_NEAR(mh_log_acceptance(lt, lt_prop, theta, theta_prop) +
                  mh_log_acceptance(lt_prop, lt, theta_prop, theta),
              0.0, 1e-15);
}

TEST(MhHyperparams, RejectedProposalLeavesStateUnchanged) {
  // a huge step proposes absurd values that the prior rejects almost surely
  const std::vector<std::uint32_t> labels{0, 0, 1};
  const Assignment z = Assignment::from_labels(labels);
  Layer layer(3, {{{0, 1}, 3}});
  const BlockStats s = block_stats(z, layer.view());
  const Hyperparams hp{2.0, 2.0, 2.0};
  int unchanged = 0;
  Rng rng(8);
  for (int t = 0; t < 200; ++t) unchanged += mh_update_hyperparams(hp, z, s, rng, 50.0) == hp;
  EXPECT_GT(unchanged, 150);
}

TEST(MhHyperparams, AlphaChainRecoversPriorOnSingleVertex) {
  // n = 1: the CRP term is constant so alpha follows its Gamma(2, 1) prior
  const std::vector<std::uint32_t> labels{0};
  const Assignment z = Assignment::from_labels(labels);
  Layer layer(1, {});
  const BlockStats s = block_stats(z, layer.view());
  Hyperparams hp;
  Rng rng(12);
  const int burn = 20000, draws = 2000000, thin = 20;
  for (int t = 0; t < burn; ++t) hp = mh_update_hyperparams(hp, z, s, rng, 1.0);
  double sum = 0.0, sum2 = 0.0;
  int kept = 0;
  for (int t = 0; t < draws; ++t) {
    hp = mh_update_hyperparams(hp, z, s, rng, 1.0);
    if (t % thin) continue;
    sum += hp.alpha;
    sum2 += hp.alpha * hp.alpha;
    ++kept;
  }
  const double mean = sum / kept;
  const double var = sum2 / kept - mean * mean;
  // thinned draws are close to independent; allow for residual correlation
  EXPECT_NEAR(mean, 2.0, 3 * std::sqrt(2.0 / kept) * 2.0);
  EXPECT_NEAR(var, 2.0, 0.1);
}

}  // namespace
}  // namespace mnsbm
