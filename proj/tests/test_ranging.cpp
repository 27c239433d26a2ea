#include <gtest/gtest.h>

#include <vector>

#include "anchorguard/ranging.hpp"
#include "oracles.hpp"

using namespace anchorguard;

TEST(Ranging, ExactReturnsTrueDistance) {
  Rng rng{1};
  EXPECT_DOUBLE_EQ(measure(5.0, RangingModel::exact(), rng), 5.0);
  const auto m = measure(3, Point2{0, 0}, 7, Point2{3, 4}, RangingModel::exact(), rng);
  EXPECT_EQ(m.from_id, 3);
  EXPECT_EQ(m.to_id, 7);
  EXPECT_DOUBLE_EQ(m.distance, 5.0);
}

TEST(Ranging, ZeroSigmaIsBitwiseExactAndDrawsNothing) {
  Rng used{123}, untouched{123};
  for (auto model : {RangingModel::gaussian(0.0), RangingModel::log_normal(0.0)})
    for (double d : {0.0, 1.5, 123.456}) EXPECT_EQ(measure(d, model, used), d);
  EXPECT_EQ(used(), untouched());
}

TEST(Ranging, GaussianMoments) {
  Rng rng{7};
  std::vector<double> v;
  for (int k = 0; k < 20000; ++k) v.push_back(measure(100.0, RangingModel::gaussian(2.0), rng));
  EXPECT_NEAR(oracle::mean(v), 100.0, 0.06);
  EXPECT_NEAR(oracle::stddev(v), 2.0, 0.05);
}

TEST(Ranging, GaussianClampsAtZero) {
  Rng rng{9};
  for (int k = 0; k < 5000; ++k) EXPECT_GE(measure(0.1, RangingModel::gaussian(5.0), rng), 0.0);
}

TEST(Ranging, LogNormalIsMultiplicative) {
  Rng rng{3};
  std::vector<double> logs;
  for (int k = 0; k < 20000; ++k) {
    const double m = measure(50.0, RangingModel::log_normal(0.1), rng);
    ASSERT_GT(m, 0.0);
    logs.push_back(std::log(m / 50.0));
  }
  EXPECT_NEAR(oracle::mean(logs), 0.0, 0.003);
  EXPECT_NEAR(oracle::stddev(logs), 0.1, 0.003);
  EXPECT_EQ(measure(0.0, RangingModel::log_normal(0.5), rng), 0.0);
}

TEST(Ranging, SameSeedSameDraws) {
  Rng a{55}, b{55};
  for (int k = 0; k < 100; ++k)
    EXPECT_EQ(measure(10.0, RangingModel::gaussian(1.0), a), measure(10.0, RangingModel::gaussian(1.0), b));
}

TEST(Ranging, Names) {
  EXPECT_EQ(to_string(RangingKind::Exact), "exact");
  EXPECT_EQ(to_string(RangingKind::GaussianAdditive), "gaussian");
  EXPECT_EQ(to_string(RangingKind::LogNormalMultiplicative), "lognormal");
}

TEST(Random, DerivedSeedsDifferByTag) {
  EXPECT_NE(derive_seed(42, {1}), derive_seed(42, {2}));
  EXPECT_NE(derive_seed(42, {1}), derive_seed(43, {1}));
  EXPECT_EQ(derive_seed(42, {1, 2}), derive_seed(42, {1, 2}));
}
