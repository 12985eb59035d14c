#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "mnsbm/math.hpp"

namespace mnsbm {
namespace {

TEST(LogGamma, MatchesStdAcrossRange) {
  for (double x = 1e-6; x < 1e7; x *= 1.07) {
    const double want = std::lgamma(x);
    EXPECT_NEAR(log_gamma(x), want, 1e-10 * std::max(1.0, std::abs(want))) << "x=" << x;
  }
}

TEST(LogGamma, IntegerFactorials) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-14);
  EXPECT_NEAR(log_gamma(2.0), 0.0, 1e-14);
  EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-13);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(M_PI), 1e-13);
}

TEST(Gamma21Prior, Density) {
  EXPECT_NEAR(log_gamma21_prior(1.0), -1.0, 1e-15);
  EXPECT_NEAR(log_gamma21_prior(2.0), std::log(2.0) - 2.0, 1e-15);
}

TEST(SampleLogCategorical, FollowsWeights) {
  Rng rng(3);
  const int draws = 100000;
  std::map<std::size_t, int> hits;
  for (int t = 0; t < draws; ++t) {
    std::vector<double> w{std::log(1.0) - 800, std::log(2.0) - 800, std::log(7.0) - 800};
    ++hits[sample_log_categorical(w, rng)];
  }
  const double p[] = {0.1, 0.2, 0.7};
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(hits[k] / double(draws), p[k], 3 * std::sqrt(p[k] * (1 - p[k]) / draws));
}

TEST(SampleLogCategorical, NegativeInfinityNeverChosen) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> w{-INFINITY, 0.0, -INFINITY};
    EXPECT_EQ(sample_log_categorical(w, rng), 1u);
  }
}

}  // namespace
}  // namespace mnsbm
