#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "anchorguard/mahalanobis.hpp"

using namespace anchorguard;

namespace {

struct Suspect {
  int anchor_id;
  Point2 observed_pos;
  Point2 reference_pos;
};

}  // namespace

TEST(Covariance, HandComputed) {
  // about (0,0): sxx = 2, syy = 2, sxy = 0 with n - 1 = 3
  const std::vector<Point2> pts{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const auto c = covariance(pts, {0, 0});
  EXPECT_DOUBLE_EQ(c.s11, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.s22, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.s12, 0.0);
  EXPECT_DOUBLE_EQ(c.det, 4.0 / 9.0);

  const std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const auto l = covariance(line, {1.5, 1.5});
  EXPECT_NEAR(l.s12, l.s11, 1e-15);
  EXPECT_NEAR(l.det, 0.0, 1e-15);
  EXPECT_THROW(invert(l), SingularCovariance);
}

TEST(Covariance, TooFewPoints) {
  const std::vector<Point2> two{{0, 0}, {1, 1}};
  EXPECT_THROW(covariance(two, {0, 0}), InsufficientData);
}

TEST(Covariance, DeterminantFromCorrelation) {
  const auto c = CovarianceMatrix2::from_entries(4.0, 9.0, 3.0);
  EXPECT_DOUBLE_EQ(c.correlation(), 0.5);
  EXPECT_DOUBLE_EQ(c.det, 27.0);
  EXPECT_NEAR(c.det_from_correlation(), 27.0, 1e-12);
}

TEST(Invert, ProducesIdentity) {
  const auto c = CovarianceMatrix2::from_entries(4.0, 9.0, 3.0);
  const Matrix2 p = as_matrix(c) * invert(c);
  EXPECT_NEAR(p(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(p(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(p(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(p(1, 1), 1.0, 1e-15);
  EXPECT_THROW(invert(CovarianceMatrix2::from_entries(0, 0, 0)), SingularCovariance);
}

TEST(Distance, IdentityIsEuclidean) {
  const Matrix2 id = Matrix2::identity();
  EXPECT_DOUBLE_EQ(distance_to_centroid({3, 4}, {0, 0}, id), 5.0);
  EXPECT_DOUBLE_EQ(pairwise_distance({1, 1}, {4, 5}, id), 5.0);
}

TEST(Distance, DiagonalScaling) {
  const auto c = CovarianceMatrix2::from_entries(4.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(distance_to_centroid({2, 0}, {0, 0}, invert(c)), 1.0);
  EXPECT_DOUBLE_EQ(distance_to_centroid({0, 2}, {0, 0}, invert(c)), 2.0);
}

TEST(Distance, SymmetricAndNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 200; ++k) {
    const double a = 0.1 + std::abs(u(rng)), b = 0.1 + std::abs(u(rng));
    const double s12 = 0.9 * std::sqrt(a * b) * u(rng) / 10.0;
    const Matrix2 inv = invert(CovarianceMatrix2::from_entries(a, b, s12));
    const Point2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
    EXPECT_GE(pairwise_distance(p, q, inv), 0.0);
    EXPECT_NEAR(pairwise_distance(p, q, inv), pairwise_distance(q, p, inv), 1e-12);
    EXPECT_EQ(pairwise_distance(p, p, inv), 0.0);
  }
}

TEST(Chi2, CutoffClosedForm) {
  EXPECT_NEAR(chi2_cutoff(0.05), 2.4477468306808166, 1e-12);
  EXPECT_NEAR(chi2_cutoff(0.01), 3.0348542587702925, 1e-12);
  EXPECT_THROW(chi2_cutoff(0.0), std::invalid_argument);
  EXPECT_THROW(chi2_cutoff(1.0), std::invalid_argument);
}

TEST(Chi2, EmpiricalCoverageOfStandardNormal) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const double cut = chi2_cutoff(0.05);
  int over = 0;
  const int total = 100000;
  for (int k = 0; k < total; ++k) over += std::hypot(n(rng), n(rng)) > cut ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(over) / total, 0.05, 0.003);
}

TEST(ConfirmOutliers, SeparatesFarSuspect) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.5);
  std::vector<Point2> refs;
  for (int k = 0; k < 40; ++k) refs.push_back({100 + n(rng), 200 + n(rng)});
  const std::vector<Suspect> suspects{{1, {130, 200}, {100, 200}}, {2, {100.2, 200.1}, {100, 200}}};
  const auto scores = confirm_outliers(suspects, refs, {100, 200}, chi2_cutoff(0.05));
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].anchor_id, 1);
  EXPECT_TRUE(scores[0].outlier);
  EXPECT_FALSE(scores[1].outlier);
  EXPECT_DOUBLE_EQ(scores[0].threshold, chi2_cutoff(0.05));
}

TEST(ConfirmOutliers, VarianceFloorRescuesDegenerateSamples) {
  const std::vector<Point2> identical(5, Point2{1, 1});
  const std::vector<Suspect> s{{0, {1.001, 1}, {1, 1}}};
  EXPECT_THROW(confirm_outliers(s, identical, {1, 1}, 2.0), SingularCovariance);
  const auto scores = confirm_outliers(s, identical, {1, 1}, 2.0, 1e-4);
  EXPECT_NEAR(scores[0].d, 0.1, 1e-12);
  EXPECT_FALSE(scores[0].outlier);
}
