#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "clnash/basis.hpp"
#include "fixtures.hpp"

using clnash::BasisSet;
using clnash::FeatureMap;
using clnash::Mat;
using clnash::Vec;

namespace {

Vec V(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double d : v) out(k++) = d;
  return out;
}

long Binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(QuadraticBasis, ScalarSquare) {
  const BasisSet b({clnash::QuadraticBasis(1)});
  EXPECT_DOUBLE_EQ(b.Features(0, V({3}))(0), 9.0);
  EXPECT_DOUBLE_EQ(b.Features(0, V({2}))(0), 4.0);
}

TEST(QuadraticBasis, TwoDimensionalOrder) {
  const BasisSet b({clnash::QuadraticBasis(2)});
  EXPECT_EQ(b.Features(0, V({1, 2})), V({1, 2, 4}));
  EXPECT_EQ(b.Features(0, V({0, 1})), V({0, 0, 1}));
}

TEST(QuadraticBasis, TwoDimensionalJacobian) {
  const BasisSet b({clnash::QuadraticBasis(2)});
  const Mat expect = (Mat(3, 2) << 2, 0, 2, 1, 0, 4).finished();
  EXPECT_EQ(b.Jacobian(0, V({1, 2})), expect);
  const Mat expect2 = (Mat(3, 2) << 2, 0, 0, 1, 0, 0).finished();
  EXPECT_EQ(b.Jacobian(0, V({1, 0})), expect2);
}

TEST(QuadraticBasis, ScalarJacobian) {
  const BasisSet b({clnash::QuadraticBasis(1)});
  EXPECT_DOUBLE_EQ(b.Jacobian(0, V({2}))(0, 0), 4.0);
}

TEST(QuadraticBasis, FeatureCount) {
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(clnash::QuadraticBasis(n).feature_count, n * (n + 1) / 2);
}

TEST(Features, VanishAtOrigin) {
  for (int n = 1; n <= 3; ++n)
    for (int d = 2; d <= 4; ++d) {
      const BasisSet b({clnash::PolynomialBasis(n, d)});
      EXPECT_TRUE(b.Features(0, Vec::Zero(n)).isZero(0.0));
      EXPECT_TRUE(b.Jacobian(0, Vec::Zero(n)).isZero(0.0));
    }
}

TEST(PolynomialBasis, DegreeTwoIsQuadratic) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 4; ++n) {
    const FeatureMap q = clnash::QuadraticBasis(n), p = clnash::PolynomialBasis(n, 2);
    ASSERT_EQ(q.feature_count, p.feature_count);
    for (int s = 0; s < 5; ++s) {
      const Vec x = fixtures::RandomVec(rng, n);
      EXPECT_EQ(q.features(x), p.features(x));
      EXPECT_EQ(q.jacobian(x), p.jacobian(x));
    }
  }
}

TEST(PolynomialBasis, FeatureCountIsMonomialsOfDegreeTwoToD) {
  for (int n = 1; n <= 3; ++n)
    for (int d = 2; d <= 5; ++d)
      EXPECT_EQ(clnash::PolynomialBasis(n, d).feature_count, Binomial(n + d, d) - 1 - n);
}

TEST(PolynomialBasis, HandValueDegreeThree) {
  // n = 2, degree 3: x0^2, x0 x1, x1^2, x0^3, x0^2 x1, x0 x1^2, x1^3.
  const FeatureMap p = clnash::PolynomialBasis(2, 3);
  EXPECT_EQ(p.features(V({2, 3})), V({4, 6, 9, 8, 12, 18, 27}));
}

TEST(PolynomialBasis, RejectsDegreeBelowTwo) {
  EXPECT_THROW(clnash::PolynomialBasis(2, 1), clnash::ConfigError);
}

// Every shipped basis against central differences, n = 1, 2, 3.
TEST(JacobianProperty, MatchesFiniteDifferences) {
  std::mt19937_64 rng(99);
  for (int n = 1; n <= 3; ++n) {
    std::vector<FeatureMap> maps{clnash::QuadraticBasis(n)};
    for (int d = 2; d <= 4; ++d) maps.push_back(clnash::PolynomialBasis(n, d));
    for (const FeatureMap& m : maps)
      for (int s = 0; s < 10; ++s) {
        const Vec x = fixtures::RandomVec(rng, n, -2, 2);
        EXPECT_LE(clnash::JacobianRelativeError(m, x), 1e-6) << m.name << " n=" << n;
      }
  }
}

TEST(JacobianProperty, FiniteDifferenceCatchesAWrongJacobian) {
  FeatureMap bad = clnash::QuadraticBasis(1);
  bad.jacobian = [](const Vec& x) { return Mat::Constant(1, 1, 3 * x(0)); };
  EXPECT_GT(clnash::JacobianRelativeError(bad, V({1.0})), 0.1);
}

TEST(WeightConvention, QuadraticFormIsExact) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 4; ++n) {
    const BasisSet b({clnash::QuadraticBasis(n)});
    for (int s = 0; s < 20; ++s) {
      Mat P = Mat::Random(n, n);
      P = 0.5 * (P + P.transpose()).eval();
      const Vec w = clnash::QuadraticWeightsFromMatrix(P);
      EXPECT_LE((w - fixtures::WeightsOf(P)).cwiseAbs().maxCoeff(), 0.0);
      const Vec x = fixtures::RandomVec(rng, n);
      EXPECT_NEAR(w.dot(b.Features(0, x)), x.dot(P * x), 1e-12);
      EXPECT_LE((clnash::QuadraticMatrixFromWeights(w, n) - P).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(WeightConvention, OffDiagonalDoubling) {
  const Mat P = (Mat(2, 2) << 1, 0.5, 0.5, 2).finished();
  EXPECT_EQ(clnash::QuadraticWeightsFromMatrix(P), V({1, 1, 2}));
  EXPECT_EQ(clnash::QuadraticWeightsFromMatrix(Mat::Identity(2, 2)), V({1, 0, 1}));
}

TEST(BasisSet, RejectsFeaturesNotVanishingAtOrigin) {
  FeatureMap m = clnash::QuadraticBasis(1);
  m.features = [](const Vec& x) { return Vec::Constant(1, x(0) * x(0) + 1.0); };
  EXPECT_THROW(BasisSet({m}), clnash::ConfigError);
}

TEST(BasisSet, NonFiniteOutputEchoesState) {
  FeatureMap m = clnash::QuadraticBasis(1);
  m.features = [](const Vec& x) {
    return Vec::Constant(1, x(0) > 1 ? std::numeric_limits<double>::infinity() : x(0) * x(0));
  };
  const BasisSet b({m});
  try {
    b.Features(0, V({2.5}));
    FAIL() << "expected NonFiniteError";
  } catch (const clnash::NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("2.5"), std::string::npos) << e.what();
  }
}

TEST(BasisSet, WrongStateLength) {
  const BasisSet b({clnash::QuadraticBasis(2)});
  EXPECT_THROW(b.Features(0, V({1})), clnash::DimensionError);
}

TEST(BasisSet, AllQuadraticFlag) {
  EXPECT_TRUE(BasisSet({clnash::QuadraticBasis(2), clnash::QuadraticBasis(2)}).all_quadratic());
  EXPECT_FALSE(BasisSet({clnash::QuadraticBasis(2), clnash::PolynomialBasis(2, 3)}).all_quadratic());
}
